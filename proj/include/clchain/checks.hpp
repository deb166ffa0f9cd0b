#pragma once

// Verification routines shared by the CLI and the acceptance suite. Each
// returns a pass flag plus a JSON record of exact residuals.

#include <cstdint>
#include <string>
#include <vector>

#include "clchain/abelian.hpp"
#include "clchain/kernels.hpp"
#include "clchain/measures.hpp"

namespace clchain {

struct RunConfig {
  long p = 2;
  int window = 6;
  BruteForceBound bound;
  Rational tolerance = Rational(1, 1000);
  std::uint64_t seed = 1;
  std::string out;

  Json to_json() const;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  Json details;
};

/// mu0(G) P(G -> G') = mu0(G') P(G' -> G) for every ordered window pair.
CheckResult check_reversibility(long p, const WindowSpec& w);

/// mu0(G) P(G -d*-> (K,1)) = (c1/c0) mu1((K,1)) P((K,1) -d-> G), c1/c0 = p/(p-1).
CheckResult check_two_level_balance(long p, const WindowSpec& w);

/// delta0_small = delta0_quotient_form = delta0_row for all |F| <= p^max_order_exp.
CheckResult check_duality(long p, int max_order_exp, const BruteForceBound& bound = {});

/// Certified basis identity for all |F| <= p^max_f and all window G'.
CheckResult check_basis(long p, const WindowSpec& w, int max_f, const Rational& rel_tol,
                        const BruteForceBound& bound = {});

/// Curious formula for all |F1|,|F2| <= p^max_f; the c0 comparison is made
/// only when compare_c0 is set.
CheckResult check_curious(long p, int max_f, const WindowSpec& w, bool compare_c0, const Rational& rel_tol,
                          const BruteForceBound& bound = {});

/// c0 x sum_{window} #Sur(G,B)/#Aut(G) in [1 - tol, 1], partials monotone.
CheckResult check_moments(long p, const WindowSpec& w, const std::vector<GroupType>& bs, const Rational& tol);

/// Exact eigenvectors for all |F| <= p^max_f, with the eigenvalue
/// multiplicities of the spectrum.
CheckResult check_eigen(long p, int max_f, const BruteForceBound& bound = {});

/// Formula counts against brute force for |A|,|B| <= p^max_order_exp, plus
/// the injection ratios for rank <= 2 and k <= max_k.
CheckResult check_counting(long p, int max_order_exp, int max_k);

/// d^k(B x Z_p^k) core entries increase in k and approach Moment[B].
CheckResult check_limit(long p, const GroupType& b, const WindowSpec& w, int max_k, const Rational& l1_tol,
                        const BruteForceBound& bound = {});

/// One-step bordered-matrix sampling against the exact Delta_0 row.
CheckResult check_monte_carlo(long p, const GroupType& g, std::uint64_t samples, std::uint64_t seed,
                              const WindowSpec& w, double alpha = 0.001);

/// Two-step composition: exact Delta_0^2 rows against the independent
/// oracle, truncated chain_power against a truncated enumeration, and
/// border(2,2) sampling against the exact row.
CheckResult check_composability(long p, const std::vector<GroupType>& sources, const WindowSpec& w,
                                std::uint64_t samples, std::uint64_t seed, const BruteForceBound& bound = {});

/// TV(Delta_0^k delta_G, mu0|window) for k = 0..max_k and the fitted ratio
/// over k >= fit_from.
struct ConvergenceReport {
  std::vector<IntervalScalar> tv;
  double fitted_ratio = 0;
};
ConvergenceReport convergence(long p, const GroupType& source, const WindowSpec& w, int max_k, int fit_from,
                              const BruteForceBound& bound = {});
CheckResult check_convergence(long p, const WindowSpec& w, int max_k, int fit_from, double tol);

/// Independent computations used only as cross-checks.
namespace oracle {

/// Delta_0^2 window entries from G: two uniform characters cut out K, the
/// first Haar element is put in the form (k, p^v, 0) by GL_2(Z_p), and the
/// second is one d step on the resulting rank-one module.
GroupRow delta0_squared(long p, const GroupType& g, const WindowSpec& w, const BruteForceBound& bound = {});

/// Truncated two-step Delta_0 from G with every group materialized:
/// characters enumerated, every element of K enumerated, every valuation
/// solved by a fresh SNF. Same truncation as chain_power.
GroupRow truncated_two_step(long p, const GroupType& g, const WindowSpec& w, const BruteForceBound& bound = {});

/// One Delta_0 step computed the same brute-force way.
GroupRow delta0_step_brute(long p, const GroupType& g, const WindowSpec& w, const BruteForceBound& bound = {});

}  // namespace oracle

}  // namespace clchain
