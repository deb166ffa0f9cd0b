#include "clchain/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "clchain/counting.hpp"
#include "clchain/kernels.hpp"
#include "clchain/parallel.hpp"

namespace clchain {

namespace {

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

}  // namespace

std::size_t DownsetMatrix::index_of(const GroupType& g) const {
  auto it = std::find(basis.begin(), basis.end(), g);
  if (it == basis.end()) throw std::out_of_range("type " + g.str() + " is not in the downset of " + f.str());
  return static_cast<std::size_t>(it - basis.begin());
}

bool DownsetMatrix::is_upper_triangular() const {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (entries[i][j] != 0) return false;
    }
  }
  return true;
}

DownsetMatrix delta0_downset_matrix(long p, const GroupType& f, const BruteForceBound& bound) {
  DownsetMatrix m{f, downset(f), {}};
  const std::size_t n = m.basis.size();
  m.entries.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [q, x] : delta0_quotient_form(p, m.basis[j], bound).probs) m.entries[m.index_of(q)][j] = x;
  }
  return m;
}

EigenVector e_vector(long p, const GroupType& f, const BruteForceBound& bound) {
  const DownsetMatrix m = delta0_downset_matrix(p, f, bound);
  const std::size_t n = m.basis.size();
  const std::size_t top = n - 1;  // f is last in its downset
  EigenVector ev{f, m.entries[top][top], {}, 0};
  std::vector<Rational> e(n, Rational(0));
  e[top] = 1;
  for (std::size_t i = top; i-- > 0;) {
    Rational s = 0;
    for (std::size_t j = i + 1; j < n; ++j) s += m.entries[i][j] * e[j];
    e[i] = -s / (m.entries[i][i] - ev.eigenvalue);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Rational r = -ev.eigenvalue * e[i];
    for (std::size_t j = 0; j < n; ++j) r += m.entries[i][j] * e[j];
    ev.residual = std::max(ev.residual, abs(r));
    if (e[i] != 0) ev.coeffs[m.basis[i]] = e[i];
  }
  return ev;
}

WindowMeasure E_measure(long p, const GroupType& f, const WindowSpec& w, const BruteForceBound& bound) {
  WindowMeasure out{w, {}, std::nullopt};
  const EigenVector ev = e_vector(p, f, bound);
  for (const auto& g : enumerate_window(w)) {
    Rational s = 0;
    for (const auto& [fp, a] : ev.coeffs) {
      if (surjects_onto(g, fp)) s += a * sur_count(p, g, fp, bound);
    }
    out.add(g, s / aut_count(p, g));
  }
  return out;
}

ExpectationInterval expected_sur_interval(long p, const GroupType& g, const std::map<GroupType, Rational>& coeffs,
                                          const Rational& rel_tol, const Rational& abs_tol) {
  // Delta_0(G) has rank <= rank(G)+1, so 0 <= #Sur(H,F) <= |F|^{rank(G)+1}.
  const int r = g.rank() + 1;
  Rational up = 0, down = 0;
  for (const auto& [f, a] : coeffs) {
    if (f.rank() > r) continue;
    const Rational cap = a * ipow(p, static_cast<unsigned long>(f.order_exp() * r));
    if (a > 0) {
      up += cap;
    } else {
      down -= cap;
    }
  }
  constexpr int kMaxHorizon = 400;
  for (int horizon = g.order_exp() + 8;; horizon += 8) {
    const GroupRow row = delta0_kernel(p, g, {p, horizon});
    Rational s = 0;
    for (const auto& [h, x] : row.probs) {
      for (const auto& [f, a] : coeffs) {
        if (surjects_onto(h, f)) s += x * a * sur_count(p, h, f);
      }
    }
    const Rational slack = row.tail * (up + down);
    if (slack <= rel_tol * abs(s) || slack <= abs_tol || horizon >= kMaxHorizon) {
      return {{s - row.tail * down, s + row.tail * up}, horizon, row.tail};
    }
  }
}

BasisCheck basis_check(long p, const GroupType& g, const GroupType& f, const Rational& rel_tol,
                       const BruteForceBound& bound) {
  BasisCheck c{g, f, expected_sur_interval(p, g, {{f, 1}}, rel_tol / 2), 0, false, false};
  for (const auto& [q, x] : delta0_quotient_form(p, f, bound).probs) {
    if (surjects_onto(g, q)) c.rhs += x * sur_count(p, g, q, bound);
  }
  c.contains = c.lhs.value.contains(c.rhs);
  c.width_ok = c.lhs.value.width() <= rel_tol * c.rhs;
  return c;
}

EigenResidual eigen_residual(long p, const GroupType& f, const WindowSpec& w, const Rational& rel_tol,
                             const BruteForceBound& bound) {
  const EigenVector ev = e_vector(p, f, bound);
  const WindowMeasure e = E_measure(p, f, w, bound);
  const std::vector<GroupType> states = enumerate_window(w);
  std::vector<ExpectationInterval> intervals(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    intervals[i] = expected_sur_interval(p, states[i], ev.coeffs, rel_tol, rel_tol);
  });
  EigenResidual out{f, 0, true};
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Integer aut = aut_count(p, states[i]);
    // (Delta_0 E_F)(G) = E[sum a #Sur(Delta_0 G, .)] / #Aut(G).
    const IntervalScalar image = intervals[i].value * ratio(1, aut);
    const Rational target = e.at(states[i]) * ev.eigenvalue;
    if (!image.contains(target)) out.all_contained = false;
    out.residual_bound += image.width();
  }
  return out;
}

bool CuriousReport::partials_monotone() const {
  for (std::size_t i = 1; i < partials.size(); ++i) {
    if (partials[i] < partials[i - 1]) return false;
  }
  return true;
}

bool CuriousReport::within(const Rational& rel_tol) const {
  return abs(lhs_times_c0.lo - rhs) <= rel_tol * rhs && abs(lhs_times_c0.hi - rhs) <= rel_tol * rhs;
}

Rational curious_rhs(long p, const GroupType& f1, const GroupType& f2, const BruteForceBound& bound) {
  Rational s = 0;
  for (const auto& g : downset(f1)) {
    if (!surjects_onto(f2, g)) continue;
    s += ratio(sur_count(p, f1, g, bound) * sur_count(p, f2, g, bound), aut_count(p, g));
  }
  return s;
}

CuriousReport curious_check(long p, const GroupType& f1, const GroupType& f2, const WindowSpec& w, int c0_terms,
                            const BruteForceBound& bound) {
  CuriousReport r{f1, f2, w, {}, 0, {}, 0, 0};
  r.partials.assign(static_cast<std::size_t>(w.max_order_exp) + 1, Rational(0));
  for (const auto& g : enumerate_window(w)) {
    if (!surjects_onto(g, f1) || !surjects_onto(g, f2)) continue;
    r.partials[static_cast<std::size_t>(g.order_exp())] +=
        ratio(sur_count(p, g, f1, bound) * sur_count(p, g, f2, bound), aut_count(p, g));
  }
  for (std::size_t n = 1; n < r.partials.size(); ++n) r.partials[n] += r.partials[n - 1];
  r.lhs_partial = r.partials.back();
  r.lhs_times_c0 = c_constant(p, 0, c0_terms) * r.lhs_partial;
  r.rhs = curious_rhs(p, f1, f2, bound);
  r.subgroup_oracle = linked_subgroup_count(p, f1, f2, bound);
  return r;
}

bool GramReport::within(const Rational& rel_tol) const {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const Rational& x = exact[i][j];
      if (abs(window[i][j].lo - x) > rel_tol * x || abs(window[i][j].hi - x) > rel_tol * x) return false;
    }
  }
  return symmetric;
}

GramReport fourier_gram(long p, const std::vector<GroupType>& fs, const WindowSpec& w, const BruteForceBound& bound) {
  GramReport r{fs, {}, {}, true};
  const std::size_t n = fs.size();
  r.window.assign(n, std::vector<IntervalScalar>(n));
  r.exact.assign(n, std::vector<Rational>(n));
  std::vector<WindowMeasure> images;
  for (const auto& f : fs) images.push_back(moment_measure(f, w));
  const IntervalScalar c0 = c_constant(p, 0, 80);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r.window[i][j] = c0 * inner_product(images[i], images[j]);
      r.exact[i][j] = curious_rhs(p, fs[i], fs[j], bound);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (r.exact[i][j] != r.exact[j][i] || r.window[i][j].lo != r.window[j][i].lo) r.symmetric = false;
    }
  }
  return r;
}

std::map<GroupType, Rational> e_expansion(const WindowMeasure& nu, const BruteForceBound& bound) {
  std::map<GroupType, Rational> residual(nu.entries.begin(), nu.entries.end());
  std::map<GroupType, Rational> a;
  // Peel off the canonically largest remaining type; e_F only touches types
  // below F.
  while (!residual.empty()) {
    auto top = std::prev(residual.end());
    const GroupType f = top->first;
    const Rational coeff = top->second;
    if (coeff == 0) {
      residual.erase(top);
      continue;
    }
    a[f] = coeff;
    for (const auto& [g, x] : e_vector(nu.window.p, f, bound).coeffs) {
      residual[g] -= coeff * x;
    }
    residual.erase(f);
  }
  return a;
}

double measure_angle(const WindowMeasure& a, const WindowMeasure& b) {
  const double ab = to_double(inner_product(a, b));
  const double aa = to_double(inner_product(a, a));
  const double bb = to_double(inner_product(b, b));
  if (aa == 0 || bb == 0) return 0;
  const double c = std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
  return std::acos(c);
}

LeadingTermReport leading_term(const WindowMeasure& nu, int steps, const BruteForceBound& bound) {
  const long p = nu.window.p;
  LeadingTermReport r;
  r.expansion = e_expansion(nu, bound);
  if (r.expansion.empty()) throw std::invalid_argument("leading_term: zero measure");
  r.t = r.expansion.begin()->first.order_exp();
  for (const auto& [f, a] : r.expansion) r.t = std::min(r.t, f.order_exp());

  WindowMeasure predicted{nu.window, {}, std::nullopt};
  for (const auto& [f, a] : r.expansion) {
    if (f.order_exp() != r.t) continue;
    for (const auto& [g, x] : E_measure(p, f, nu.window, bound).entries) predicted.add(g, a * x);
  }
  Rational predicted_l1 = 0;
  for (const auto& [g, x] : predicted.entries) predicted_l1 += abs(x);

  WindowMeasure start = nu;
  start.tail = 0;
  for (int n = 0; n <= steps; ++n) {
    WindowMeasure scaled = exact_power(start, n, bound);
    const Integer scale = ipow(p, static_cast<unsigned long>(r.t * n));
    for (auto& [g, x] : scaled.entries) x *= scale;
    r.angles.push_back(measure_angle(scaled, predicted));
    r.relative_gaps.push_back(to_double(l1_distance(scaled, predicted).window / predicted_l1));
  }
  return r;
}

GapEstimate spectral_gap_estimate(const WindowSpec& w, int steps) {
  const long p = w.p;
  // Zero total mass, i.e. orthogonal to the stationary direction.
  WindowMeasure nu{w, {{GroupType(), Rational(1)}, {GroupType::cyclic(1), Rational(-1)}}, Rational(0)};
  const StepFn step = delta0_step(p, w);
  GapEstimate g;
  auto norm = [](const WindowMeasure& m) {
    Rational s = 0;
    for (const auto& [t, x] : m.entries) s += abs(x);
    return s;
  };
  // Leakage through the window edge slowly reintroduces the stationary
  // direction; project it back out after every step.
  WindowMeasure pi = mu0_measure(w);
  const Rational pi_mass = pi.window_mass();
  Rational prev = norm(nu);
  for (int n = 0; n < steps; ++n) {
    nu = apply_kernel(nu, step);
    nu.tail = 0;
    const Rational drift = nu.window_mass() / pi_mass;
    for (const auto& [t, x] : pi.entries) nu.add(t, -drift * x);
    const Rational cur = norm(nu);
    g.ratios.push_back(to_double(cur / prev));
    prev = cur;
  }
  g.estimate = g.ratios.empty() ? 0 : g.ratios.back();
  return g;
}

}  // namespace clchain
