#include <gtest/gtest.h>

#include "clchain/abelian.hpp"
#include "clchain/checks.hpp"
#include "clchain/counting.hpp"
#include "clchain/kernels.hpp"
#include "clchain/snf.hpp"

using namespace clchain;

namespace {

GroupType T(const char* s) { return GroupType::parse(s); }

// d on K x Z_p with every element k of K and every valuation v solved by its
// own SNF of [[D_K, k], [0, p^v]].
GroupRow d_direct(long p, const GroupType& k, const WindowSpec& w) {
  GroupRow row{k, w, {}, 0};
  const FiniteAbelianGroup grp(p, k);
  const Rational per_element = ratio(1, Integer(static_cast<unsigned long>(grp.size())));
  const int r = k.rank();
  Rational mass = 0;
  for (int v = 0; k.order_exp() + v <= w.max_order_exp; ++v) {
    const Rational pv = (1 - Rational(1, p)) * (v == 0 ? Rational(1) : inv_pow(p, static_cast<unsigned long>(v)));
    for (Element e = 0; e < grp.size(); ++e) {
      std::vector<std::vector<std::int64_t>> cols;
      for (int i = 0; i < r; ++i) {
        std::vector<std::int64_t> c(static_cast<std::size_t>(r + 1), 0);
        c[static_cast<std::size_t>(i)] = grp.moduli()[static_cast<std::size_t>(i)];
        cols.push_back(c);
      }
      std::vector<std::int64_t> h = grp.coords(e);
      std::int64_t pv_int = 1;
      for (int i = 0; i < v; ++i) pv_int *= p;
      h.push_back(pv_int);
      cols.push_back(h);
      const GroupType q = quotient_type(p, cols, k.order_exp() + v);
      row.add(q, pv * per_element);
      mass += pv * per_element;
    }
  }
  row.tail = 1 - mass;
  return row;
}

}  // namespace

TEST(Delta0, SmallExamples) {
  for (long p : {2L, 3L, 5L}) {
    const GroupRow r = delta0_small(p, T("1"));
    EXPECT_EQ(r.prob(T("1")), Rational(1, p));
    EXPECT_EQ(r.prob(GroupType()), Rational(p - 1, p));
    EXPECT_EQ(r.tail, 0);
    EXPECT_EQ(delta0_small(p, GroupType()).prob(GroupType()), 1);
  }
  const GroupRow klein = delta0_small(2, T("1,1"));
  EXPECT_EQ(klein.probs.size(), 2U);
  EXPECT_EQ(klein.prob(T("1,1")), Rational(1, 4));
  EXPECT_EQ(klein.prob(T("1")), Rational(3, 4));

  const GroupRow z4 = delta0_quotient_form(2, T("2"));
  EXPECT_EQ(z4.prob(GroupType()), Rational(1, 2));
  EXPECT_EQ(z4.prob(T("1")), Rational(1, 4));
  EXPECT_EQ(z4.prob(T("2")), Rational(1, 4));
}

TEST(Delta0, ThreeFormsAgree) {
  for (long p : {2L, 3L}) {
    for (const auto& f : enumerate_window({p, 4})) {
      const GroupRow a = delta0_small(p, f);
      EXPECT_EQ(a.probs, delta0_quotient_form(p, f).probs) << f.str();
      EXPECT_EQ(a.probs, delta0_row(p, f).probs) << f.str();
      EXPECT_EQ(a.prob(f), ratio(1, ipow(p, static_cast<unsigned long>(f.order_exp()))));
      EXPECT_EQ(a.total(), 1);
      for (const auto& [k, x] : a.probs) EXPECT_TRUE(surjects_onto(f, k));
    }
  }
  // beyond the brute-force bound only the valuation-class form applies
  EXPECT_THROW(delta0_small(2, T("5,4"), BruteForceBound{8}), BruteForceBoundExceeded);
  EXPECT_EQ(delta0_row(2, T("5,4")).total(), 1);
}

TEST(DStar, Rows) {
  const ExtensionRow t = dstar_kernel(2, GroupType());
  EXPECT_EQ(t.probs.size(), 1U);
  EXPECT_EQ(t.prob(ModuleType{GroupType(), 1}), 1);
  const ExtensionRow one = dstar_kernel(3, T("1"));
  EXPECT_EQ(one.prob(ModuleType{T("1"), 1}), Rational(1, 3));
  EXPECT_EQ(one.prob(ModuleType{GroupType(), 1}), Rational(2, 3));
  for (const auto& g : enumerate_window({2, 4})) {
    for (const auto& [h, x] : dstar_kernel(2, g).probs) {
      EXPECT_EQ(h.free_rank, 1);
      EXPECT_TRUE(surjects_onto(g, h.torsion));
    }
  }
}

TEST(DKernel, FreeModule) {
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, 10};
    const GroupRow r = d_kernel(p, ModuleType{GroupType(), 1}, w);
    EXPECT_EQ(r.prob(GroupType()), 1 - Rational(1, p));
    for (int v = 1; v <= 10; ++v) {
      EXPECT_EQ(r.prob(GroupType::cyclic(v)), (1 - Rational(1, p)) * inv_pow(p, static_cast<unsigned long>(v)));
    }
    EXPECT_EQ(r.tail, inv_pow(p, 11));
    EXPECT_EQ(r.total(), 1);
  }
  EXPECT_EQ(d_kernel(2, ModuleType{T("1"), 1}, {2, 6}).prob(GroupType()), 0);
}

TEST(DKernel, StabilizedMatchesDirectSnf) {
  for (long p : {2L, 3L}) {
    const int m = p == 2 ? 9 : 7;
    for (const auto& k : enumerate_window({p, p == 2 ? 5 : 4})) {
      const GroupRow fast = d_kernel(p, ModuleType{k, 1}, {p, m});
      const GroupRow slow = d_direct(p, k, {p, m});
      EXPECT_EQ(fast.probs, slow.probs) << p << " " << k.str();
      EXPECT_EQ(fast.tail, slow.tail) << p << " " << k.str();
    }
  }
}

TEST(Delta0Kernel, Examples) {
  for (long p : {2L, 3L}) {
    const GroupRow r = delta0_kernel(p, GroupType(), {p, 8});
    EXPECT_EQ(r.prob(GroupType()), 1 - Rational(1, p));
    for (int v = 1; v <= 8; ++v) {
      EXPECT_EQ(r.prob(GroupType::cyclic(v)), (1 - Rational(1, p)) * inv_pow(p, static_cast<unsigned long>(v)));
    }
  }
  EXPECT_EQ(delta0_kernel(2, T("1"), {2, 6}).prob(GroupType()), Rational(1, 4));
}

TEST(Delta0Kernel, RowsAndPositivity) {
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, p == 2 ? 7 : 5};
    for (const auto& g : enumerate_window(w)) {
      const GroupRow r = delta0_kernel(p, g, w);
      EXPECT_EQ(r.total(), 1) << g.str();
      EXPECT_GE(r.tail, 0);
      EXPECT_GT(r.prob(g), 0) << g.str();
      for (const auto& [h, x] : r.probs) {
        EXPECT_GT(x, 0);
        EXPECT_TRUE(w.contains(h));
        EXPECT_LE(h.rank(), g.rank() + 1);
      }
    }
  }
}

TEST(Delta0Kernel, Reversible) {
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, p == 2 ? 6 : 5};
    const auto states = enumerate_window(w);
    for (const auto& g : states) {
      const GroupRow rg = delta0_kernel(p, g, w);
      for (const auto& h : states) {
        EXPECT_EQ(mu0_unnormalized(p, g) * rg.prob(h), mu0_unnormalized(p, h) * delta0_kernel(p, h, w).prob(g))
            << g.str() << " " << h.str();
      }
    }
  }
}

TEST(Delta0Kernel, TwoLevelBalance) {
  // mu0(G) P_{d*}(G -> K x Z_p) = mu1(K x Z_p) P_d(K x Z_p -> G) with
  // c1/c0 = p/(p-1).
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, 5};
    for (const auto& g : enumerate_window(w)) {
      for (const auto& [h, x] : dstar_kernel(p, g).probs) {
        const Rational lhs = mu0_unnormalized(p, g) * x;
        const Rational rhs = Rational(p, p - 1) * mu_k_unnormalized(p, h) * d_kernel(p, h, w).prob(g);
        EXPECT_EQ(lhs, rhs) << g.str() << " " << h.str();
      }
    }
  }
}

TEST(Dk, BaseTrivialReproducesD) {
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, 6};
    const DkRow dk = dk_from_base_kernel(p, GroupType(), 1, w);
    const GroupRow d = d_kernel(p, ModuleType{GroupType(), 1}, w);
    EXPECT_EQ(dk.row.probs, d.probs);
    EXPECT_EQ(dk.row.tail, d.tail);
  }
}

TEST(Dk, IncreasesToMoment) {
  const WindowSpec w{2, 6};
  const GroupType b = T("1");
  std::map<GroupType, Rational> prev;
  for (int k = 1; k <= 10; ++k) {
    const DkRow dk = dk_from_base_kernel(2, b, k, w);
    EXPECT_EQ(dk.row.total(), 1);
    for (const auto& g : enumerate_window(w)) {
      const Rational now = dk.core.count(g) ? dk.core.at(g) : Rational(0);
      EXPECT_LE(now, ratio(sur_count(2, g, b), aut_count(2, g)));
      if (prev.count(g)) EXPECT_GE(now, prev.at(g)) << g.str() << " k=" << k;
    }
    prev = dk.core;
  }
  const DkRow k8 = dk_from_base_kernel(2, b, 8, w);
  for (const auto& g : enumerate_window(w)) {
    const Rational target = ratio(sur_count(2, g, b), aut_count(2, g));
    const Rational got = k8.core.count(g) ? k8.core.at(g) : Rational(0);
    EXPECT_LT(to_double(target - got), 1e-2) << g.str();
  }
}

TEST(Dk, MatchesRowProbabilities) {
  // row = prod_{i<=k}(1-p^{-i}) * core
  for (int k = 1; k <= 4; ++k) {
    Rational ck = 1;
    for (int i = 1; i <= k; ++i) ck *= 1 - inv_pow(3, static_cast<unsigned long>(i));
    const DkRow dk = dk_from_base_kernel(3, T("1"), k, {3, 5});
    for (const auto& [g, x] : dk.row.probs) EXPECT_EQ(x, ck * dk.core.at(g));
  }
}

TEST(Chain, ApplyAndPowers) {
  const WindowSpec w{2, 7};
  const StepFn step = delta0_step(2, w);
  WindowMeasure point{w, {{GroupType(), 1}}, 0};
  const WindowMeasure once = apply_kernel(point, step);
  EXPECT_EQ(once.entries, as_measure(delta0_kernel(2, GroupType(), w)).entries);
  EXPECT_EQ(chain_power(point, 0, step).entries, point.entries);

  WindowMeasure nu = point;
  Rational prev_tail = 0;
  for (int n = 1; n <= 5; ++n) {
    nu = apply_kernel(nu, step);
    EXPECT_GE(*nu.tail, prev_tail);
    EXPECT_EQ(nu.window_mass() + *nu.tail, 1);
    prev_tail = *nu.tail;
  }
  EXPECT_EQ(chain_power(point, 5, step).entries, nu.entries);
}

TEST(Chain, ParallelMatchesSequential) {
  const WindowSpec w{3, 6};
  const StepFn step = delta0_step(3, w);
  const WindowMeasure mu{w, mu0_measure(w).entries, 0};
  Rational total = mu.window_mass();
  WindowMeasure normalized = mu;
  for (auto& [g, x] : normalized.entries) x /= total;
  const WindowMeasure par = apply_kernel(normalized, step);
  WindowMeasure seq{w, {}, 0};
  for (const auto& [g, x] : normalized.entries) {
    const GroupRow r = step(g);
    for (const auto& [h, y] : r.probs) seq.add(h, x * y);
    *seq.tail += x * r.tail;
  }
  EXPECT_EQ(par.entries, seq.entries);
  EXPECT_EQ(par.tail, seq.tail);
}

TEST(Chain, StationarityResidual) {
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, 6};
    WindowMeasure mu = mu0_measure(w);
    const Rational mass = mu.window_mass();
    for (auto& [g, x] : mu.entries) x /= mass;
    mu.tail = 0;
    const WindowMeasure image = apply_kernel(mu, delta0_step(p, w));
    EXPECT_LE(l1_distance(image, mu).window, 2 * *image.tail);
  }
}

TEST(ExactPower, TwoStepsMatchOracles) {
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, p == 2 ? 7 : 5};
    for (const char* g : {"0", "1", "2,1"}) {
      const GroupRow exact = exact_power_row(p, T(g), 2, w);
      EXPECT_EQ(exact.probs, oracle::delta0_squared(p, T(g), w).probs) << p << " " << g;
      EXPECT_EQ(exact.total(), 1);
      const WindowMeasure point{w, {{T(g), 1}}, 0};
      const WindowMeasure chained = chain_power(point, 2, delta0_step(p, w));
      EXPECT_EQ(chained.entries, oracle::truncated_two_step(p, T(g), w).probs) << p << " " << g;
      for (const auto& [h, x] : exact.probs) EXPECT_GE(x, chained.at(h));
    }
  }
}

TEST(ExactPower, TrivialSourceClosedForm) {
  // n steps from the trivial group: cokernel of an n x n Haar matrix.
  for (long p : {2L, 3L}) {
    const WindowSpec w{p, 6};
    for (int n = 1; n <= 5; ++n) {
      const GroupRow r = exact_power_row(p, GroupType(), n, w);
      Rational cn = 1;
      for (int i = 1; i <= n; ++i) cn *= 1 - inv_pow(p, static_cast<unsigned long>(i));
      for (const auto& g : enumerate_window(w)) {
        EXPECT_EQ(r.prob(g), cn * inj_ratio_qpzp(p, g.rank(), n) / Rational(aut_count(p, g))) << g.str() << " n=" << n;
      }
    }
  }
}
