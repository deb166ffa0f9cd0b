#pragma once

// Explicitly materialized finite abelian p-groups: every element is stored,
// so everything here is brute force. Used as the independent oracle for the
// counting formulas and for the small-group kernels.

#include <cstdint>
#include <functional>
#include <vector>

#include "clchain/grouptype.hpp"

namespace clchain {

struct BruteForceBoundExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caps the size of explicitly enumerated groups at p^max_order_exp.
struct BruteForceBound {
  int max_order_exp = 8;
  void check(long p, int order_exp, const char* what) const;
};

using Element = std::uint32_t;

/// Subset of a materialized group as a bitset over element indices.
class ElementSet {
 public:
  explicit ElementSet(std::size_t universe = 0) : bits_((universe + 63) / 64, 0) {}
  void insert(Element e) { bits_[e >> 6] |= (std::uint64_t{1} << (e & 63)); }
  bool contains(Element e) const { return (bits_[e >> 6] >> (e & 63)) & 1U; }
  std::size_t count() const;
  bool operator==(const ElementSet&) const = default;
  const std::vector<std::uint64_t>& words() const { return bits_; }

 private:
  std::vector<std::uint64_t> bits_;
};

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const noexcept;
};

class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup(long p, GroupType type);

  long p() const { return p_; }
  const GroupType& type() const { return type_; }
  std::size_t size() const { return size_; }
  int rank() const { return type_.rank(); }

  /// Coordinate i lives in Z/moduli()[i].
  const std::vector<std::int64_t>& moduli() const { return moduli_; }
  std::vector<std::int64_t> coords(Element e) const;
  Element encode(const std::vector<std::int64_t>& coords) const;

  Element zero() const { return 0; }
  Element add(Element a, Element b) const;
  Element neg(Element a) const;
  Element scale(Element a, std::int64_t k) const;
  /// Standard generator e_i.
  Element generator(int i) const;
  /// log_p of the order of a.
  int order_exp(Element a) const { return order_exp_[a]; }

  /// Subgroup generated by the given elements.
  ElementSet span(const std::vector<Element>& gens) const;
  /// Every subgroup, each exactly once.
  std::vector<ElementSet> all_subgroups() const;

  /// Isomorphism type of a subgroup / of the quotient by a subgroup.
  GroupType subgroup_type(const ElementSet& s) const;
  GroupType quotient_type(const ElementSet& s) const;

  /// Kernel of the character x -> sum_i a_i x_i / p^{lambda_i} mod 1.
  ElementSet character_kernel(Element a) const;

  /// Calls f(images) for every homomorphism from `source` into this group,
  /// given by the images of the standard generators of `source`.
  void for_each_hom_from(const GroupType& source,
                         const std::function<void(const std::vector<Element>&)>& f) const;

 private:
  GroupType type_from_torsion_counts(const std::vector<std::size_t>& counts) const;

  long p_;
  GroupType type_;
  std::vector<std::int64_t> moduli_;
  std::vector<std::size_t> strides_;
  std::size_t size_;
  std::vector<std::uint8_t> order_exp_;
  std::vector<Element> times_p_;
};

}  // namespace clchain
