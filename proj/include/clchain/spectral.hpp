#pragma once

// Moment-basis spectral theory of the chain: the triangular delta0 matrix on
// a downset, its eigenvectors e_F, the eigenmeasures E_F = Moment(e_F), the
// unitarity (curious) identity, and decay experiments.

#include <map>
#include <vector>

#include "clchain/abelian.hpp"
#include "clchain/grouptype.hpp"
#include "clchain/measures.hpp"

namespace clchain {

/// delta0 restricted to functions supported on downset(F); column j is the
/// image of 1_{basis[j]}.
struct DownsetMatrix {
  GroupType f;
  std::vector<GroupType> basis;
  std::vector<std::vector<Rational>> entries;

  std::size_t index_of(const GroupType& g) const;
  bool is_upper_triangular() const;
};

DownsetMatrix delta0_downset_matrix(long p, const GroupType& f, const BruteForceBound& bound = {});

struct EigenVector {
  GroupType f;
  Rational eigenvalue;
  std::map<GroupType, Rational> coeffs;
  /// Largest |entry| of (M - eigenvalue) e; zero when the solve is exact.
  Rational residual;
};

EigenVector e_vector(long p, const GroupType& f, const BruteForceBound& bound = {});

/// sum_{F'} e_F[F'] Moment[F'] on the window.
WindowMeasure E_measure(long p, const GroupType& f, const WindowSpec& w, const BruteForceBound& bound = {});

/// Certified enclosure of E[ sum_F a_F #Sur(Delta_0(G), F) ]. The window
/// horizon grows until the interval width is at most rel_tol * |window sum|
/// (or abs_tol).
struct ExpectationInterval {
  IntervalScalar value;
  int horizon = 0;
  Rational tail;
};
ExpectationInterval expected_sur_interval(long p, const GroupType& g, const std::map<GroupType, Rational>& coeffs,
                                          const Rational& rel_tol, const Rational& abs_tol = 0);

/// #Aut(G') (Delta_0 Moment[F])(G') enclosed, against
/// (1/|F|) sum_{f in F} #Sur(G', F/<f>).
struct BasisCheck {
  GroupType g;
  GroupType f;
  ExpectationInterval lhs;
  Rational rhs;
  bool contains = false;
  bool width_ok = false;
};
BasisCheck basis_check(long p, const GroupType& g, const GroupType& f, const Rational& rel_tol,
                       const BruteForceBound& bound = {});

/// Window residual of Delta_0 E_F = E_F/|F|: for each window G the certified
/// interval for (Delta_0 E_F)(G) must contain E_F(G)/|F|; residual_bound is
/// the summed interval widths (an L1 bound on the window residual).
struct EigenResidual {
  GroupType f;
  Rational residual_bound;
  bool all_contained = true;
};
EigenResidual eigen_residual(long p, const GroupType& f, const WindowSpec& w, const Rational& rel_tol,
                             const BruteForceBound& bound = {});

struct CuriousReport {
  GroupType f1;
  GroupType f2;
  WindowSpec window;
  /// Partial sums over |G| <= p^n for n = 0..m.
  std::vector<Rational> partials;
  Rational lhs_partial;
  IntervalScalar lhs_times_c0;
  Rational rhs;
  Integer subgroup_oracle;

  bool rhs_is_oracle() const { return rhs == Rational(subgroup_oracle); }
  bool partials_monotone() const;
  /// Whether c0 x LHS lies within rel_tol * RHS of RHS.
  bool within(const Rational& rel_tol) const;
};

/// sum_{G'} #Sur(F1,G')#Sur(F2,G')/#Aut(G') over common quotients.
Rational curious_rhs(long p, const GroupType& f1, const GroupType& f2, const BruteForceBound& bound = {});

CuriousReport curious_check(long p, const GroupType& f1, const GroupType& f2, const WindowSpec& w,
                            int c0_terms = 80, const BruteForceBound& bound = {});

/// Gram matrix of the images c0^{1/2} #Sur(., F)/#Aut(.) two ways.
struct GramReport {
  std::vector<GroupType> fs;
  std::vector<std::vector<IntervalScalar>> window;
  std::vector<std::vector<Rational>> exact;
  bool symmetric = true;
  bool within(const Rational& rel_tol) const;
};
GramReport fourier_gram(long p, const std::vector<GroupType>& fs, const WindowSpec& w,
                        const BruteForceBound& bound = {});

struct LeadingTermReport {
  /// Coefficients of nu in the e_F basis.
  std::map<GroupType, Rational> expansion;
  /// T = p^t is the smallest |F| with a nonzero coefficient.
  int t = 0;
  /// Angle (radians) between T^n Delta_0^n nu and sum_{|F|=T} a_F E_F on
  /// the window, for n = 0..N, and the relative L1 gap.
  std::vector<double> angles;
  std::vector<double> relative_gaps;
};
LeadingTermReport leading_term(const WindowMeasure& nu, int steps, const BruteForceBound& bound = {});

/// Coefficients a_F with nu = sum a_F e_F (nu finitely supported).
std::map<GroupType, Rational> e_expansion(const WindowMeasure& nu, const BruteForceBound& bound = {});

/// Power iteration of the truncated Delta_0 on a zero-mass start vector:
/// ratios of successive window L1 norms.
struct GapEstimate {
  std::vector<double> ratios;
  double estimate = 0;
};
GapEstimate spectral_gap_estimate(const WindowSpec& w, int steps);

/// Angle in the #Aut-weighted inner product, in radians.
double measure_angle(const WindowMeasure& a, const WindowMeasure& b);

}  // namespace clchain
