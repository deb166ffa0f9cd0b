#include <gtest/gtest.h>

#include <numeric>

#include "clchain/randmat.hpp"
#include "clchain/snf.hpp"

using namespace clchain;

namespace {

GroupType T(const char* s) { return GroupType::parse(s); }

MatrixModPN diag(long p, int precision, std::vector<std::uint64_t> d) {
  MatrixModPN m(p, precision, static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

// Determinant over Z by cofactor expansion on small matrices.
Integer det(const std::vector<std::vector<Integer>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  Integer total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Integer>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Integer> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != j) row.push_back(a[i][c]);
      }
      minor.push_back(row);
    }
    const Integer term = a[0][j] * det(minor);
    total += (j % 2 == 0) ? term : Integer(-term);
  }
  return total;
}

void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

int valuation(long p, Integer x) {
  if (x == 0) return -1;
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

// Elementary divisors over Z from gcds of k x k minors, reduced to their
// p-adic valuations. Independent of the modular elimination.
std::vector<int> determinantal_valuations(const MatrixModPN& m) {
  const int n = m.rows;
  std::vector<Integer> dk{1};
  for (int k = 1; k <= n; ++k) {
    std::vector<std::vector<int>> rows, cols;
    std::vector<int> cur;
    subsets(n, k, 0, cur, rows);
    subsets(m.cols, k, 0, cur, cols);
    Integer g = 0;
    for (const auto& rs : rows) {
      for (const auto& cs : cols) {
        std::vector<std::vector<Integer>> sub;
        for (int r : rs) {
          std::vector<Integer> row;
          for (int c : cs) row.push_back(Integer(std::to_string(m.at(r, c))));
          sub.push_back(row);
        }
        Integer d = det(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    }
    dk.push_back(g);
  }
  std::vector<int> out;
  for (int k = 1; k <= n; ++k) out.push_back(valuation(m.p, dk[static_cast<std::size_t>(k)]) - valuation(m.p, dk[static_cast<std::size_t>(k - 1)]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ModPN, Arithmetic) {
  const ModPN r(3, 4);
  EXPECT_EQ(r.modulus(), 81U);
  EXPECT_EQ(r.reduce(-1), 80U);
  EXPECT_EQ(r.valuation(0), 4);
  EXPECT_EQ(r.valuation(18), 2);
  EXPECT_EQ(r.mul(r.inverse(5), 5), 1U);
  EXPECT_EQ(r.pow_p(2), 9U);
  EXPECT_THROW(ModPN(2, 63), std::invalid_argument);
}

TEST(Snf, FrozenExamples) {
  auto a = snf_valuations(diag(2, 5, {2, 4}));
  EXPECT_TRUE(a.certified);
  EXPECT_EQ(a.valuations, (std::vector<int>{1, 2}));

  MatrixModPN zero(2, 3, 1, 1);
  auto b = snf_valuations(zero);
  EXPECT_FALSE(b.certified);
  EXPECT_EQ(b.valuations, std::vector<int>{3});
  EXPECT_FALSE(cokernel_type(zero).has_value());

  EXPECT_EQ(cokernel_type(diag(3, 6, {1, 3, 3}))->torsion, T("1,1"));
  EXPECT_EQ(cokernel_type(diag(5, 6, {1, 1, 1}))->torsion, GroupType());
}

TEST(Snf, TallMatricesHaveFreeRank) {
  SeededRng rng(7, 1, 0);
  for (int i = 0; i < 50; ++i) {
    MatrixModPN m = haar_matrix(2, 40, 4, 3, rng);
    auto t = cokernel_type(m);
    if (t) EXPECT_EQ(t->free_rank, 1);
  }
}

TEST(Snf, RepresentRoundTrip) {
  const MatrixModPN m = represent(2, T("2,1"), 3, 10);
  EXPECT_EQ(m.at(0, 0), 4U);
  EXPECT_EQ(m.at(1, 1), 2U);
  EXPECT_EQ(m.at(2, 2), 1U);
  EXPECT_EQ(m.at(0, 1), 0U);
  const MatrixModPN id = represent(3, GroupType(), 2, 5);
  EXPECT_EQ(id.at(0, 0), 1U);
  EXPECT_EQ(id.at(1, 1), 1U);
  for (long p : {2L, 3L}) {
    for (const auto& g : enumerate_window({p, 6})) {
      EXPECT_EQ(cokernel_type(represent(p, g, g.rank() + 1, 12))->torsion, g);
    }
  }
  EXPECT_THROW(represent(2, T("1,1,1"), 2, 5), SizeTooSmall);
}

TEST(Snf, AgreesWithDeterminantalDivisors) {
  SeededRng rng(2024, 99, 0);
  for (int i = 0; i < 100; ++i) {
    const MatrixModPN m = haar_matrix(2, 30, 4, 4, rng);
    const SnfResult r = snf_valuations(m);
    if (!r.certified) continue;
    EXPECT_EQ(r.valuations, determinantal_valuations(m)) << "sample " << i;
  }
  // structured matrices with large elementary divisors
  for (int i = 0; i < 40; ++i) {
    MatrixModPN m = haar_matrix(3, 20, 3, 3, rng);
    for (int c = 0; c < 3; ++c) m.at(0, c) = m.ring().mul(m.at(0, c), 27);
    for (int c = 0; c < 3; ++c) m.at(1, c) = m.ring().mul(m.at(1, c), 3);
    const SnfResult r = snf_valuations(m);
    if (r.certified) EXPECT_EQ(r.valuations, determinantal_valuations(m));
  }
}

TEST(Snf, ColumnOpsDiagonalize) {
  SeededRng rng(5, 5, 5);
  for (int i = 0; i < 30; ++i) {
    const MatrixModPN m = haar_matrix(2, 16, 3, 3, rng);
    std::vector<std::uint64_t> c;
    const SnfResult r = snf_valuations(m, &c);
    if (!r.certified) continue;
    // M C has column j divisible by exactly p^{v_j} in some order: check via
    // the valuation multiset of column contents.
    const ModPN ring = m.ring();
    std::vector<int> col_vals;
    for (int j = 0; j < 3; ++j) {
      int v = ring.precision();
      for (int row = 0; row < 3; ++row) {
        std::uint64_t s = 0;
        for (int k = 0; k < 3; ++k) s = ring.add(s, ring.mul(m.at(row, k), c[static_cast<std::size_t>(k * 3 + j)]));
        v = std::min(v, ring.valuation(s));
      }
      col_vals.push_back(v);
    }
    std::sort(col_vals.begin(), col_vals.end());
    EXPECT_EQ(col_vals, r.valuations);
  }
}

TEST(Snf, QuotientHelpers) {
  // Z/4 x Z/2 modulo (2,1) is Z/4.
  EXPECT_EQ(quotient_by_elements(2, T("2,1"), {{2, 1}}), T("2"));
  EXPECT_EQ(quotient_by_elements(2, T("2,1"), {{1, 0}}), T("1"));
  EXPECT_EQ(quotient_by_elements(3, T("1,1"), {}), T("1,1"));
  // Z_p^2 / <(p,0),(1,p^2)>
  EXPECT_EQ(quotient_type(2, {{2, 0}, {1, 4}}, 3), T("3"));
  EXPECT_EQ(type_from_valuations({0, 2, 0, 1}), T("2,1"));
}
