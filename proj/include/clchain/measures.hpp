#pragma once

// Exact-rational measures on a window of group types. Everything is stored
// with c0 stripped off (mu0(G) is kept as 1/#Aut(G)); the constant enters
// only through IntervalScalar when a report needs an actual probability.

#include <map>
#include <optional>
#include <stdexcept>

#include "json.hpp"

#include "clchain/grouptype.hpp"
#include "clchain/numeric.hpp"

namespace clchain {

using Json = nlohmann::ordered_json;

struct WindowMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Closed rational interval [lo, hi].
struct IntervalScalar {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains(const IntervalScalar& o) const { return lo <= o.lo && o.hi <= hi; }

  IntervalScalar operator*(const Rational& s) const;
  IntervalScalar operator*(const IntervalScalar& o) const;
  IntervalScalar operator+(const IntervalScalar& o) const { return {lo + o.lo, hi + o.hi}; }
  /// Quotient of positive intervals.
  IntervalScalar operator/(const IntervalScalar& o) const;

  Json to_json() const;
};

/// Enclosure of c_k = prod_{i>k} (1 - p^{-i}) from the first `terms` factors.
IntervalScalar c_constant(long p, int k, int terms);

/// 1/#Aut(G).
Rational mu0_unnormalized(long p, const GroupType& g);

/// 1/(|H_tors|^k #Aut(H_tors)) for k = free rank.
Rational mu_k_unnormalized(long p, const ModuleType& h);

/// Finitely supported measure on a window. A tail of nullopt means the mass
/// outside the window is unknown.
struct WindowMeasure {
  WindowSpec window;
  std::map<GroupType, Rational> entries;
  std::optional<Rational> tail = Rational(0);

  Rational at(const GroupType& g) const;
  /// Adds x to entry g (entry dropped if it becomes zero).
  void add(const GroupType& g, const Rational& x);
  Rational window_mass() const;

  Json to_json() const;
  static WindowMeasure from_json(const Json& j);
};

/// The c0-stripped mu0 restricted to the window; tail unknown.
WindowMeasure mu0_measure(const WindowSpec& w);

/// G -> #Sur(G,F)/#Aut(G) on the window; tail unknown.
WindowMeasure moment_measure(const GroupType& f, const WindowSpec& w);

/// sum_G a(G) b(G) #Aut(G): the measure inner product divided by c0 when
/// both arguments are c0-stripped.
Rational inner_product(const WindowMeasure& a, const WindowMeasure& b);

struct L1Distance {
  Rational window;
  /// |tail_a - tail_b| when both tails are known.
  std::optional<Rational> tail_difference;

  /// Total variation, (window + tail difference)/2; a lower bound when the
  /// tails are unknown.
  Rational tv() const { return (window + tail_difference.value_or(0)) / 2; }
};

L1Distance l1_distance(const WindowMeasure& a, const WindowMeasure& b);

}  // namespace clchain
