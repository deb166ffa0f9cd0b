#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>

namespace clchain {

/// Thread-safe memo table. Concurrent fills of the same key may compute
/// twice; the first stored value wins, so callers always see one value.
template <class Key, class Value>
class MemoCache {
 public:
  template <class F>
  Value get_or_compute(const Key& key, F&& compute) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) return it->second;
    }
    Value value = compute();
    std::unique_lock lock(mutex_);
    return table_.try_emplace(key, std::move(value)).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<Key, Value> table_;
};

}  // namespace clchain
