#include "clchain/grouptype.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "clchain/numeric.hpp"

namespace clchain {

GroupType GroupType::make(std::vector<int> parts) {
  for (int x : parts) {
    if (x < 0) throw InvalidPartition("negative part " + std::to_string(x));
  }
  std::erase(parts, 0);
  std::sort(parts.begin(), parts.end(), std::greater<>());
  return GroupType(std::move(parts));
}

GroupType GroupType::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  std::vector<int> parts;
  if (text.empty()) return GroupType();
  while (true) {
    const auto comma = text.find(',');
    const auto token = trim(text.substr(0, comma));
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      throw InvalidPartition("malformed partition '" + std::string(text) + "'");
    }
    parts.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return make(std::move(parts));
}

std::string GroupType::str() const {
  if (parts_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(parts_[i]);
  }
  return out;
}

int GroupType::order_exp() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

int GroupType::multiplicity(int j) const {
  return static_cast<int>(std::count(parts_.begin(), parts_.end(), j));
}

GroupType GroupType::conjugate() const {
  std::vector<int> out(static_cast<std::size_t>(exponent()), 0);
  for (int x : parts_) {
    for (int j = 0; j < x; ++j) ++out[static_cast<std::size_t>(j)];
  }
  return GroupType(std::move(out));
}

std::strong_ordering GroupType::operator<=>(const GroupType& other) const {
  if (auto c = order_exp() <=> other.order_exp(); c != 0) return c;
  // Descending lexicographic: larger leading parts come first.
  return std::lexicographical_compare_three_way(other.parts_.begin(), other.parts_.end(),
                                                parts_.begin(), parts_.end());
}

std::string ModuleType::str() const {
  if (free_rank == 0) return torsion.str();
  return torsion.str() + "+Z^" + std::to_string(free_rank);
}

ModuleType ModuleType::parse(std::string_view text) {
  const auto plus = text.find('+');
  if (plus == std::string_view::npos) return {GroupType::parse(text), 0};
  auto rest = text.substr(plus + 1);
  if (rest.substr(0, 2) != "Z^") throw InvalidPartition("malformed module type '" + std::string(text) + "'");
  rest.remove_prefix(2);
  int k = 0;
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || k < 0) {
    throw InvalidPartition("malformed free rank in '" + std::string(text) + "'");
  }
  return {GroupType::parse(text.substr(0, plus)), k};
}

std::strong_ordering ModuleType::operator<=>(const ModuleType& other) const {
  if (auto c = free_rank <=> other.free_rank; c != 0) return c;
  return torsion <=> other.torsion;
}

void WindowSpec::validate() const {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime, got " + std::to_string(p));
  if (max_order_exp < 0) throw std::invalid_argument("window exponent must be >= 0");
}

GroupType conjugate(const GroupType& t) { return t.conjugate(); }

bool surjects_onto(const GroupType& src, const GroupType& dst) {
  if (dst.rank() > src.rank()) return false;
  for (std::size_t i = 0; i < dst.parts().size(); ++i) {
    if (dst.parts()[i] > src.parts()[i]) return false;
  }
  return true;
}

namespace {

void partitions_rec(int remaining, int max_part, std::vector<int>& cur, std::vector<GroupType>& out) {
  if (remaining == 0) {
    out.push_back(GroupType::make(cur));
    return;
  }
  for (int x = std::min(remaining, max_part); x >= 1; --x) {
    cur.push_back(x);
    partitions_rec(remaining - x, x, cur, out);
    cur.pop_back();
  }
}

void downset_rec(const GroupType& f, std::size_t i, int bound, std::vector<int>& cur,
                 std::vector<GroupType>& out) {
  if (i == f.parts().size()) {
    out.push_back(GroupType::make(cur));
    return;
  }
  for (int x = std::min(bound, f.parts()[i]); x >= 0; --x) {
    cur.push_back(x);
    downset_rec(f, i + 1, x, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<GroupType> partitions_of(int n) {
  std::vector<GroupType> out;
  std::vector<int> cur;
  if (n >= 0) partitions_rec(n, n, cur, out);
  return out;
}

std::vector<GroupType> enumerate_window(const WindowSpec& w) {
  std::vector<GroupType> out;
  for (int n = 0; n <= w.max_order_exp; ++n) {
    auto layer = partitions_of(n);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::vector<GroupType> downset(const GroupType& f) {
  std::vector<GroupType> out;
  std::vector<int> cur;
  downset_rec(f, 0, f.exponent(), cur, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

long partition_count(int n) {
  if (n < 0) return 0;
  std::vector<long> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int i = 1; i <= n; ++i) {
    long s = 0;
    for (int k = 1;; ++k) {
      const int g1 = k * (3 * k - 1) / 2;
      const int g2 = k * (3 * k + 1) / 2;
      if (g1 > i) break;
      const long sign = (k % 2 == 1) ? 1 : -1;
      s += sign * p[static_cast<std::size_t>(i - g1)];
      if (g2 <= i) s += sign * p[static_cast<std::size_t>(i - g2)];
    }
    p[static_cast<std::size_t>(i)] = s;
  }
  return p[static_cast<std::size_t>(n)];
}

}  // namespace clchain
