#pragma once

// One-step transition kernels of the chain and their powers, as exact
// rational rows. Targets outside the window are never materialized; their
// total mass is kept in `tail`.

#include <functional>
#include <map>

#include "clchain/abelian.hpp"
#include "clchain/grouptype.hpp"
#include "clchain/measures.hpp"
#include "clchain/numeric.hpp"

namespace clchain {

template <class Source, class Target = GroupType>
struct KernelRow {
  Source source;
  WindowSpec window;
  std::map<Target, Rational> probs;
  Rational tail = 0;

  Rational prob(const Target& t) const {
    auto it = probs.find(t);
    return it == probs.end() ? Rational(0) : it->second;
  }
  void add(const Target& t, const Rational& x) {
    if (x != 0) probs[t] += x;
  }
  Rational total() const {
    Rational s = tail;
    for (const auto& [t, x] : probs) s += x;
    return s;
  }
};

using GroupRow = KernelRow<GroupType>;
using ExtensionRow = KernelRow<GroupType, ModuleType>;
using QuotientRow = KernelRow<ModuleType>;

/// Row as a probability measure on its window.
WindowMeasure as_measure(const GroupRow& row);
/// WindowMeasure schema plus "source".
Json row_to_json(const GroupRow& row);

/// Kernel of a uniform character of F, by materializing F and all of its
/// characters.
GroupRow delta0_small(long p, const GroupType& f, const BruteForceBound& bound = {});

/// F/<f> for uniform f in F, by materializing F.
GroupRow delta0_quotient_form(long p, const GroupType& f, const BruteForceBound& bound = {});

/// Same distribution as the two above, computed from valuation classes of f
/// without materializing F. Memoized; no size limit.
GroupRow delta0_row(long p, const GroupType& f);

/// d*(G) = ker(phi) x Z_p for a uniform character phi.
ExtensionRow dstar_kernel(long p, const GroupType& g);

/// Quotient of H = K x Z_p (free rank 1) by a Haar-random element.
GroupRow d_kernel(long p, const ModuleType& h, const WindowSpec& w);

/// Delta_0 = d d*, one step. Memoized per (p, G, m).
GroupRow delta0_kernel(long p, const GroupType& g, const WindowSpec& w);

/// Distribution of d^k(B x Z_p^k). `core` holds the c0-stripped sums
/// sum_C n(B,C;G) #Inj(C,(Q_p/Z_p)^k)/|C|^k / #Aut(G), which increase in k
/// towards #Sur(G,B)/#Aut(G); `row` holds the probabilities, equal to
/// prod_{i<=k}(1 - p^{-i}) times the core.
struct DkRow {
  GroupRow row;
  std::map<GroupType, Rational> core;
};
DkRow dk_from_base_kernel(long p, const GroupType& b, int k, const WindowSpec& w,
                          const BruteForceBound& bound = {});

/// Kernel of a uniform homomorphism F -> (Q_p/Z_p)^n (n-fold delta0).
GroupRow delta0_iterate(long p, const GroupType& f, int n);

/// Exact window entries of Delta_0^n(delta_G), through
/// Delta_0^n(G) = d^n(ker(G -> (Q_p/Z_p)^n) x Z_p^n).
GroupRow exact_power_row(long p, const GroupType& g, int n, const WindowSpec& w,
                         const BruteForceBound& bound = {});

using StepFn = std::function<GroupRow(const GroupType&)>;

/// The one-step Delta_0 rows on window w.
StepFn delta0_step(long p, const WindowSpec& w);

/// Pushforward of a probability measure; escaping mass is added to the tail.
WindowMeasure apply_kernel(const WindowMeasure& nu, const StepFn& step);

/// n-fold apply_kernel. Window entries are lower bounds for the true
/// entries of Delta_0^n nu: paths that leave the window are dropped.
WindowMeasure chain_power(const WindowMeasure& nu, int n, const StepFn& step);

/// Exact window entries of Delta_0^n nu.
WindowMeasure exact_power(const WindowMeasure& nu, int n, const BruteForceBound& bound = {});

/// Visits one representative per orbit of coordinate-wise valuation vectors:
/// f(coords, count) where count is the number of elements of K in the class.
void for_each_valuation_class(long p, const GroupType& k,
                              const std::function<void(const std::vector<std::int64_t>&, const Integer&)>& f);

}  // namespace clchain
