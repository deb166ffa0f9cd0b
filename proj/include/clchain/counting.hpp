#pragma once

// Exact counts of homomorphisms, automorphisms, surjections and injections
// between finite abelian p-groups.

#include <vector>

#include "clchain/abelian.hpp"
#include "clchain/grouptype.hpp"
#include "clchain/numeric.hpp"

namespace clchain {

using CountValue = Integer;

/// Injections B -> G with a given quotient type G / alpha(B). The count is
/// the raw number of injections, not divided by #Aut(B).
struct SubgroupTypeCount {
  GroupType ambient;
  GroupType sub;
  GroupType quotient;
  CountValue count;
};

/// #Hom(A,B) = p^{sum_{i,j} min(a_i, b_j)}.
CountValue hom_count(long p, const GroupType& a, const GroupType& b);

/// #Aut(A) = p^{sum_j (a'_j)^2} prod_i prod_{k=1}^{m_i} (1 - p^{-k}), a' the
/// conjugate partition and m_i the multiplicity of part i.
CountValue aut_count(long p, const GroupType& a);

/// Number of subgroups of B isomorphic to `sub`, by enumerating every
/// subgroup of B. Requires |B| within the bound.
CountValue subgroup_count(long p, const GroupType& b, const GroupType& sub,
                          const BruteForceBound& bound = {});

/// #Sur(A,B) by Moebius inversion of #Hom(A,B) = sum_{S <= B} #Sur(A,S)
/// over the subgroup-type lattice of B. Only B is enumerated, so A may be
/// arbitrarily large.
CountValue sur_count(long p, const GroupType& a, const GroupType& b, const BruteForceBound& bound = {});

/// #Inj(B,G) grouped by quotient type, enumerating homomorphisms B -> G.
std::vector<SubgroupTypeCount> inj_count_with_quotient(long p, const GroupType& b, const GroupType& g,
                                                       const BruteForceBound& bound = {});

/// #Inj(F, (Q_p/Z_p)^k) / |F|^k for F of rank r: prod_{j<r} (1 - p^{j-k}).
Rational inj_ratio_qpzp(long p, int rank, int k);

/// Number of subgroups of F1 x F2 that project onto both factors.
CountValue linked_subgroup_count(long p, const GroupType& f1, const GroupType& f2,
                                 const BruteForceBound& bound = {});

/// Brute-force oracle: groups are materialized and maps are enumerated via
/// the images of generators. Independent of the formulas above.
namespace brute {

CountValue hom_count(long p, const GroupType& a, const GroupType& b);
CountValue sur_count(long p, const GroupType& a, const GroupType& b);
CountValue inj_count(long p, const GroupType& a, const GroupType& b);
CountValue aut_count(long p, const GroupType& a);
/// Ratio of injective to all homomorphisms F -> (Q_p/Z_p)^k, realized inside
/// (p^{-e} Z/Z)^k with e the exponent of F.
Rational inj_ratio_qpzp(long p, const GroupType& f, int k);

}  // namespace brute

}  // namespace clchain
