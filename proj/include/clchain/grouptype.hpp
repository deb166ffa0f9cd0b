#pragma once

// Isomorphism types of finite abelian p-groups and finitely generated
// Z_p-modules, encoded by partitions.

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clchain {

struct InvalidPartition : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The group (+)_i Z/p^{parts[i]}, with parts weakly decreasing and >= 1.
/// The empty partition is the trivial group.
class GroupType {
 public:
  GroupType() = default;

  /// Sorts descending and drops zeros; throws InvalidPartition on a negative
  /// part.
  static GroupType make(std::vector<int> parts);
  static GroupType make(std::initializer_list<int> parts) {
    return make(std::vector<int>(parts));
  }
  static GroupType cyclic(int exponent) { return make({exponent}); }

  /// "2,1" or "0" (trivial). The empty string also parses as trivial.
  static GroupType parse(std::string_view text);
  std::string str() const;

  const std::vector<int>& parts() const { return parts_; }
  int order_exp() const;
  int rank() const { return static_cast<int>(parts_.size()); }
  int exponent() const { return parts_.empty() ? 0 : parts_.front(); }
  bool is_trivial() const { return parts_.empty(); }
  /// Part i, or 0 beyond the rank.
  int part(std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

  /// Multiplicity of part value j.
  int multiplicity(int j) const;

  GroupType conjugate() const;

  bool operator==(const GroupType&) const = default;
  /// Canonical order: order_exp ascending, then parts lexicographically
  /// descending. Extends the quotient partial order.
  std::strong_ordering operator<=>(const GroupType& other) const;

 private:
  explicit GroupType(std::vector<int> sorted) : parts_(std::move(sorted)) {}
  std::vector<int> parts_;
};

/// Torsion part plus free rank; an element of X_k.
struct ModuleType {
  GroupType torsion;
  int free_rank = 0;

  std::string str() const;
  /// "2,1+Z^1" style; a bare partition means free rank 0.
  static ModuleType parse(std::string_view text);

  bool operator==(const ModuleType&) const = default;
  std::strong_ordering operator<=>(const ModuleType& other) const;
};

/// Truncation of X_0 to { G : |G| <= p^max_order_exp }.
struct WindowSpec {
  long p = 2;
  int max_order_exp = 0;

  /// Throws std::invalid_argument unless p is prime and m >= 0.
  void validate() const;
  bool contains(const GroupType& g) const { return g.order_exp() <= max_order_exp; }
  bool operator==(const WindowSpec&) const = default;
};

GroupType conjugate(const GroupType& t);

/// True iff dst is a quotient of src, i.e. dst_i <= src_i for all i.
bool surjects_onto(const GroupType& src, const GroupType& dst);

/// All partitions of n, lexicographically descending.
std::vector<GroupType> partitions_of(int n);

/// All types in the window in canonical order.
std::vector<GroupType> enumerate_window(const WindowSpec& w);

/// All quotient types of f in canonical order (trivial first, f last).
std::vector<GroupType> downset(const GroupType& f);

/// Number of partitions of n, by the pentagonal-number recurrence.
long partition_count(int n);

}  // namespace clchain

template <>
struct std::hash<clchain::GroupType> {
  std::size_t operator()(const clchain::GroupType& g) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (int x : g.parts()) h = (h ^ static_cast<std::size_t>(x)) * 0x100000001b3ULL;
    return h;
  }
};
