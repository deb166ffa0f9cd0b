#include "clchain/checks.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "clchain/counting.hpp"
#include "clchain/memo.hpp"
#include "clchain/parallel.hpp"
#include "clchain/randmat.hpp"
#include "clchain/snf.hpp"
#include "clchain/spectral.hpp"
#include "clchain/stats.hpp"

namespace clchain {

namespace {

std::vector<GroupType> types_up_to(long p, int max_order_exp) { return enumerate_window({p, max_order_exp}); }

// Records at most a handful of failures so reports stay readable.
struct FailureLog {
  Json items = Json::array();
  std::size_t total = 0;
  void add(Json j) {
    ++total;
    if (items.size() < 10) items.push_back(std::move(j));
  }
};

// Type of (K x Z_p)/<(x, p^v)> by a fresh SNF at full precision.
GroupType bordered_quotient(long p, const GroupType& k, const std::vector<std::int64_t>& x, int v) {
  const int r = k.rank();
  std::vector<std::vector<std::int64_t>> cols;
  for (int i = 0; i < r; ++i) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(r) + 1, 0);
    c[static_cast<std::size_t>(i)] = ipow(p, static_cast<unsigned long>(k.parts()[static_cast<std::size_t>(i)])).get_si();
    cols.push_back(std::move(c));
  }
  std::vector<std::int64_t> last(x);
  last.push_back(ipow(p, static_cast<unsigned long>(v)).get_si());
  cols.push_back(std::move(last));
  return quotient_type(p, cols, k.order_exp() + v);
}

std::vector<Cell> cells_against(const GroupRow& row, const std::map<ModuleType, std::uint64_t>& counts) {
  std::vector<Cell> cells;
  std::uint64_t outside = 0;
  std::map<GroupType, std::uint64_t> inside;
  for (const auto& [t, n] : counts) {
    if (t.free_rank != 0 || !row.window.contains(t.torsion)) {
      outside += n;
    } else {
      inside[t.torsion] += n;
    }
  }
  for (const auto& g : enumerate_window(row.window)) {
    const Rational pr = row.prob(g);
    const auto it = inside.find(g);
    const std::uint64_t obs = it == inside.end() ? 0 : it->second;
    if (pr == 0 && obs == 0) continue;
    cells.push_back({g.str(), to_double(pr), obs});
  }
  cells.push_back({"outside", to_double(row.tail), outside});
  return cells;
}

Json chi_json(const ChiSquareResult& c) {
  Json j;
  j["statistic"] = c.statistic;
  j["dof"] = c.dof;
  j["p_value"] = c.p_value;
  j["min_cell_p"] = c.min_cell_p;
  j["cell_threshold"] = c.cell_threshold;
  j["impossible_outcome"] = c.impossible_outcome;
  j["pass"] = c.pass();
  return j;
}

}  // namespace

Json RunConfig::to_json() const {
  Json j;
  j["p"] = p;
  j["window"] = window;
  j["brute_force_max_order_exp"] = bound.max_order_exp;
  j["tolerance"] = to_string(tolerance);
  j["seed"] = seed;
  j["out"] = out;
  return j;
}

CheckResult check_reversibility(long p, const WindowSpec& w) {
  const auto states = enumerate_window(w);
  std::vector<GroupRow> rows(states.size());
  parallel_for(states.size(), [&](std::size_t i) { rows[i] = delta0_kernel(p, states[i], w); });
  FailureLog fails;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (rows[i].total() != 1) fails.add({{"row", states[i].str()}, {"total", to_string(rows[i].total())}});
    for (std::size_t j = 0; j < states.size(); ++j) {
      ++pairs;
      const Rational lhs = mu0_unnormalized(p, states[i]) * rows[i].prob(states[j]);
      const Rational rhs = mu0_unnormalized(p, states[j]) * rows[j].prob(states[i]);
      if (lhs != rhs) fails.add({{"G", states[i].str()}, {"H", states[j].str()}, {"residual", to_string(lhs - rhs)}});
    }
  }
  CheckResult r{"reversibility", fails.total == 0, {}};
  r.details = {{"p", p}, {"m", w.max_order_exp}, {"pairs", pairs}, {"failures", fails.total}, {"examples", fails.items}};
  return r;
}

CheckResult check_two_level_balance(long p, const WindowSpec& w) {
  const Rational c1_over_c0(p, p - 1);
  FailureLog fails;
  std::size_t pairs = 0;
  const auto states = enumerate_window(w);
  for (const auto& k : states) {
    const ModuleType h{k, 1};
    const GroupRow down = d_kernel(p, h, w);
    for (const auto& g : states) {
      ++pairs;
      const Rational lhs = mu0_unnormalized(p, g) * dstar_kernel(p, g).prob(h);
      const Rational rhs = c1_over_c0 * mu_k_unnormalized(p, h) * down.prob(g);
      if (lhs != rhs) fails.add({{"G", g.str()}, {"K", k.str()}, {"residual", to_string(lhs - rhs)}});
    }
  }
  CheckResult r{"two_level_balance", fails.total == 0, {}};
  r.details = {{"p", p}, {"m", w.max_order_exp}, {"pairs", pairs}, {"failures", fails.total}, {"examples", fails.items}};
  return r;
}

CheckResult check_duality(long p, int max_order_exp, const BruteForceBound& bound) {
  FailureLog fails;
  const auto fs = types_up_to(p, max_order_exp);
  for (const auto& f : fs) {
    const GroupRow a = delta0_small(p, f, bound);
    const GroupRow b = delta0_quotient_form(p, f, bound);
    const GroupRow c = delta0_row(p, f);
    if (a.probs != b.probs || b.probs != c.probs) fails.add({{"F", f.str()}});
  }
  CheckResult r{"duality", fails.total == 0, {}};
  r.details = {{"p", p}, {"max_order_exp", max_order_exp}, {"types", fs.size()}, {"failures", fails.total},
               {"examples", fails.items}};
  return r;
}

CheckResult check_basis(long p, const WindowSpec& w, int max_f, const Rational& rel_tol,
                        const BruteForceBound& bound) {
  const auto states = enumerate_window(w);
  const auto fs = types_up_to(p, max_f);
  std::vector<std::vector<BasisCheck>> results(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    for (const auto& f : fs) results[i].push_back(basis_check(p, states[i], f, rel_tol, bound));
  });
  FailureLog fails;
  Rational worst_width = 0;
  int max_horizon = 0;
  for (const auto& per_state : results) {
    for (const auto& c : per_state) {
      const Rational rel = c.rhs == 0 ? c.lhs.value.width() : Rational(c.lhs.value.width() / c.rhs);
      worst_width = std::max(worst_width, rel);
      max_horizon = std::max(max_horizon, c.lhs.horizon);
      if (!c.contains || !c.width_ok) {
        fails.add({{"G", c.g.str()}, {"F", c.f.str()}, {"lo", to_double(c.lhs.value.lo)},
                   {"hi", to_double(c.lhs.value.hi)}, {"rhs", to_double(c.rhs)}});
      }
    }
  }
  CheckResult r{"basis", fails.total == 0, {}};
  r.details = {{"p", p},
               {"m", w.max_order_exp},
               {"cases", states.size() * fs.size()},
               {"worst_relative_width", to_double(worst_width)},
               {"max_horizon", max_horizon},
               {"failures", fails.total},
               {"examples", fails.items}};
  return r;
}

CheckResult check_curious(long p, int max_f, const WindowSpec& w, bool compare_c0, const Rational& rel_tol,
                          const BruteForceBound& bound) {
  const auto fs = types_up_to(p, max_f);
  std::vector<std::pair<GroupType, GroupType>> pairs;
  for (const auto& a : fs) {
    for (const auto& b : fs) pairs.emplace_back(a, b);
  }
  // The brute-force side is symmetric; count each unordered pair once.
  MemoCache<std::pair<GroupType, GroupType>, Integer> linked;
  std::vector<Json> rows(pairs.size());
  std::vector<char> ok(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [f1, f2] = pairs[i];
    const auto key = f1 < f2 ? std::make_pair(f1, f2) : std::make_pair(f2, f1);
    const Integer oracle = linked.get_or_compute(key, [&] { return linked_subgroup_count(p, key.first, key.second, bound); });
    const Rational rhs = curious_rhs(p, f1, f2, bound);
    bool pass = rhs == Rational(oracle);
    Json j{{"F1", f1.str()}, {"F2", f2.str()}, {"rhs", to_string(rhs)}, {"oracle", oracle.get_str()}};
    if (compare_c0) {
      const CuriousReport rep = curious_check(p, f1, f2, w, 80, bound);
      pass = pass && rep.within(rel_tol) && rep.partials_monotone();
      j["lhs_times_c0"] = rep.lhs_times_c0.to_json();
      j["relative_gap"] = to_double(abs(rep.lhs_times_c0.lo - rhs) / rhs);
      j["monotone"] = rep.partials_monotone();
    }
    rows[i] = std::move(j);
    ok[i] = pass;
  });
  FailureLog fails;
  double worst_gap = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (rows[i].contains("relative_gap")) worst_gap = std::max(worst_gap, rows[i]["relative_gap"].get<double>());
    if (!ok[i]) fails.add(rows[i]);
  }
  CheckResult r{"curious", fails.total == 0, {}};
  r.details = {{"p", p}, {"pairs", pairs.size()}, {"compare_c0", compare_c0}, {"failures", fails.total},
               {"examples", fails.items}};
  if (compare_c0) {
    r.details["m"] = w.max_order_exp;
    r.details["worst_relative_gap"] = worst_gap;
  }
  return r;
}

CheckResult check_moments(long p, const WindowSpec& w, const std::vector<GroupType>& bs, const Rational& tol) {
  const IntervalScalar c0 = c_constant(p, 0, 80);
  CheckResult r{"moments", true, Json::array()};
  for (const auto& b : bs) {
    std::vector<Rational> partial(static_cast<std::size_t>(w.max_order_exp) + 1, Rational(0));
    for (const auto& [g, x] : moment_measure(b, w).entries) partial[static_cast<std::size_t>(g.order_exp())] += x;
    bool monotone = true;
    for (std::size_t n = 1; n < partial.size(); ++n) {
      const Rational before = partial[n - 1];
      partial[n] += before;
      if (partial[n] < before) monotone = false;
    }
    const IntervalScalar total = c0 * partial.back();
    const bool pass = monotone && total.lo >= 1 - tol && total.hi <= 1;
    r.pass = r.pass && pass;
    r.details.push_back({{"B", b.str()},
                         {"c0_times_sum", total.to_json()},
                         {"gap", to_double(1 - total.lo)},
                         {"monotone", monotone},
                         {"pass", pass}});
  }
  r.details = {{"p", p}, {"m", w.max_order_exp}, {"moments", r.details}};
  return r;
}

CheckResult check_eigen(long p, int max_f, const BruteForceBound& bound) {
  FailureLog fails;
  std::map<Rational, int> multiplicity;
  const auto fs = types_up_to(p, max_f);
  std::vector<EigenVector> evs(fs.size());
  std::vector<DownsetMatrix> ms(fs.size());
  parallel_for(fs.size(), [&](std::size_t i) {
    evs[i] = e_vector(p, fs[i], bound);
    ms[i] = delta0_downset_matrix(p, fs[i], bound);
  });
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const Rational expected = inv_pow(p, static_cast<unsigned long>(fs[i].order_exp()));
    bool diag_ok = ms[i].is_upper_triangular();
    for (std::size_t d = 0; d < ms[i].basis.size(); ++d) {
      diag_ok = diag_ok && ms[i].entries[d][d] == inv_pow(p, static_cast<unsigned long>(ms[i].basis[d].order_exp()));
    }
    if (evs[i].residual != 0 || evs[i].eigenvalue != expected || !diag_ok) {
      fails.add({{"F", fs[i].str()}, {"residual", to_string(evs[i].residual)}, {"eigenvalue", to_string(evs[i].eigenvalue)}});
    }
    ++multiplicity[evs[i].eigenvalue];
  }
  Json spectrum = Json::array();
  bool multiplicities_ok = true;
  for (int j = 0; j <= max_f; ++j) {
    const Rational lambda = inv_pow(p, static_cast<unsigned long>(j));
    const int seen = multiplicity.count(lambda) ? multiplicity[lambda] : 0;
    const long expected = partition_count(j);
    multiplicities_ok = multiplicities_ok && seen == expected;
    spectrum.push_back({{"eigenvalue", to_string(lambda)}, {"multiplicity", seen}, {"partitions", expected}});
  }
  std::size_t listed = 0;
  for (const auto& [lambda, n] : multiplicity) listed += static_cast<std::size_t>(n);
  multiplicities_ok = multiplicities_ok && listed == fs.size();
  CheckResult r{"eigen", fails.total == 0 && multiplicities_ok, {}};
  r.details = {{"p", p}, {"max_order_exp", max_f}, {"types", fs.size()}, {"spectrum", spectrum},
               {"failures", fails.total}, {"examples", fails.items}};
  return r;
}

CheckResult check_counting(long p, int max_order_exp, int max_k) {
  const auto types = types_up_to(p, max_order_exp);
  std::vector<std::pair<GroupType, GroupType>> pairs;
  for (const auto& a : types) {
    for (const auto& b : types) pairs.emplace_back(a, b);
  }
  std::vector<Json> bad(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [a, b] = pairs[i];
    Json j = Json::object();
    if (hom_count(p, a, b) != brute::hom_count(p, a, b)) j["hom"] = "mismatch";
    if (hom_count(p, a, b) != hom_count(p, b, a)) j["hom_symmetry"] = "mismatch";
    const Integer sur = sur_count(p, a, b);
    if (sur != brute::sur_count(p, a, b)) j["sur"] = "mismatch";
    if ((sur > 0) != surjects_onto(a, b)) j["sur_positive"] = "mismatch";
    Integer inj = 0;
    for (const auto& e : inj_count_with_quotient(p, b, a)) inj += e.count;
    if (inj != brute::inj_count(p, b, a)) j["inj"] = "mismatch";
    Integer via_subgroups = 0;
    for (const auto& s : downset(b)) via_subgroups += sur_count(p, a, s) * subgroup_count(p, b, s);
    if (via_subgroups != hom_count(p, a, b)) j["hom_subgroup_sum"] = "mismatch";
    if (!j.empty()) {
      j["A"] = a.str();
      j["B"] = b.str();
    }
    bad[i] = std::move(j);
  });
  FailureLog fails;
  for (const auto& a : types) {
    if (aut_count(p, a) != brute::aut_count(p, a)) fails.add({{"aut", a.str()}});
  }
  for (auto& j : bad) {
    if (!j.empty()) fails.add(std::move(j));
  }
  std::size_t ratios = 0;
  for (const auto& f : types) {
    if (f.rank() > 2) continue;
    for (int k = 0; k <= max_k; ++k) {
      ++ratios;
      const Rational formula = inj_ratio_qpzp(p, f.rank(), k);
      const Rational brute_ratio = brute::inj_ratio_qpzp(p, f, k);
      if (formula != brute_ratio) {
        fails.add({{"inj_ratio", f.str()}, {"k", k}, {"formula", to_string(formula)}, {"brute", to_string(brute_ratio)}});
      }
    }
  }
  CheckResult r{"counting", fails.total == 0, {}};
  r.details = {{"p", p},           {"max_order_exp", max_order_exp}, {"pairs", pairs.size()},
               {"ratios", ratios}, {"failures", fails.total},        {"examples", fails.items}};
  return r;
}

CheckResult check_limit(long p, const GroupType& b, const WindowSpec& w, int max_k, const Rational& l1_tol,
                        const BruteForceBound& bound) {
  std::vector<DkRow> rows;
  for (int k = 1; k <= max_k; ++k) rows.push_back(dk_from_base_kernel(p, b, k, w, bound));
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (const auto& [g, x] : rows[i - 1].core) {
      auto it = rows[i].core.find(g);
      if (it == rows[i].core.end() || it->second < x) monotone = false;
    }
  }
  const WindowMeasure moment = moment_measure(b, w);
  Json l1 = Json::array();
  Rational last = 0;
  for (const auto& row : rows) {
    WindowMeasure core{w, {}, std::nullopt};
    for (const auto& [g, x] : row.core) core.add(g, x);
    last = l1_distance(core, moment).window;
    l1.push_back(to_double(last));
  }
  CheckResult r{"limit", monotone && last <= l1_tol, {}};
  r.details = {{"p", p}, {"B", b.str()}, {"m", w.max_order_exp}, {"monotone", monotone}, {"l1_by_k", l1},
               {"final_l1", to_double(last)}};
  return r;
}

CheckResult check_monte_carlo(long p, const GroupType& g, std::uint64_t samples, std::uint64_t seed,
                              const WindowSpec& w, double alpha) {
  ExperimentSpec spec;
  spec.construction = Construction::delta0;
  spec.p = p;
  spec.source = {g, 0};
  spec.samples = samples;
  spec.seed = seed;
  const ExperimentResult res = run_experiment(spec);
  const ChiSquareResult chi = chi_square_test(cells_against(delta0_kernel(p, g, w), res.counts), alpha);
  CheckResult r{"monte_carlo_delta0", chi.pass() && res.unresolved_rate() < 0.01, {}};
  r.details = {{"p", p}, {"G", g.str()}, {"m", w.max_order_exp}, {"samples", samples}, {"seed", seed},
               {"unresolved_rate", res.unresolved_rate()}, {"chi_square", chi_json(chi)}};
  return r;
}

CheckResult check_composability(long p, const std::vector<GroupType>& sources, const WindowSpec& w,
                                std::uint64_t samples, std::uint64_t seed, const BruteForceBound& bound) {
  CheckResult r{"composability", true, Json::array()};
  for (const auto& g : sources) {
    const GroupRow exact = exact_power_row(p, g, 2, w, bound);
    const GroupRow oracle_row = oracle::delta0_squared(p, g, w, bound);
    const bool exact_ok = exact.probs == oracle_row.probs && exact.tail == oracle_row.tail;

    const WindowMeasure start{w, {{g, Rational(1)}}, Rational(0)};
    const WindowMeasure chained = chain_power(start, 2, delta0_step(p, w));
    const GroupRow truncated = oracle::truncated_two_step(p, g, w, bound);
    bool truncated_ok = *chained.tail == truncated.tail && chained.entries.size() == truncated.probs.size();
    for (const auto& [t, x] : chained.entries) truncated_ok = truncated_ok && truncated.prob(t) == x;

    // Paths through states outside the window are all that chain_power drops.
    const Rational first_tail = delta0_kernel(p, g, w).tail;
    bool enclosed = true;
    for (const auto& t : enumerate_window(w)) {
      const Rational gap = exact.prob(t) - chained.at(t);
      enclosed = enclosed && gap >= 0 && gap <= first_tail;
    }

    ExperimentSpec spec;
    spec.construction = Construction::composability;
    spec.p = p;
    spec.source = {g, 0};
    spec.samples = samples;
    spec.seed = seed;
    const ExperimentResult res = run_experiment(spec);
    const ChiSquareResult joint = chi_square_test(cells_against(exact, res.counts));
    const ChiSquareResult sequential = chi_square_test(cells_against(exact, res.sequential_counts));
    const double unresolved = static_cast<double>(res.unresolved) / (2.0 * static_cast<double>(samples));

    const bool pass = exact_ok && truncated_ok && enclosed && joint.pass() && sequential.pass() && unresolved < 0.01;
    r.pass = r.pass && pass;
    r.details.push_back({{"G", g.str()},
                         {"exact_equals_oracle", exact_ok},
                         {"chain_power_equals_truncated_enumeration", truncated_ok},
                         {"chain_power_enclosed", enclosed},
                         {"border22_vs_exact", chi_json(joint)},
                         {"sequential_vs_exact", chi_json(sequential)},
                         {"unresolved_rate", unresolved},
                         {"pass", pass}});
  }
  r.details = {{"p", p}, {"m", w.max_order_exp}, {"samples", samples}, {"seed", seed}, {"sources", r.details}};
  return r;
}

ConvergenceReport convergence(long p, const GroupType& source, const WindowSpec& w, int max_k, int fit_from,
                              const BruteForceBound& bound) {
  const IntervalScalar c0 = c_constant(p, 0, 100);
  const auto states = enumerate_window(w);
  ConvergenceReport rep;
  std::vector<double> mid;
  for (int k = 0; k <= max_k; ++k) {
    const GroupRow row = exact_power_row(p, source, k, w, bound);
    IntervalScalar tv{0, 0};
    for (const auto& g : states) {
      const Rational inv_aut = mu0_unnormalized(p, g);
      const Rational x = row.prob(g);
      const Rational lo = c0.lo * inv_aut, hi = c0.hi * inv_aut;
      // |x - c| for c in [lo, hi].
      const Rational far = std::max(abs(x - lo), abs(x - hi));
      const Rational near = (x >= lo && x <= hi) ? Rational(0) : std::min(abs(x - lo), abs(x - hi));
      tv.lo += near / 2;
      tv.hi += far / 2;
    }
    rep.tv.push_back(tv);
    mid.push_back(to_double(tv.midpoint()));
  }
  rep.fitted_ratio = fitted_decay_ratio(mid, static_cast<std::size_t>(fit_from));
  return rep;
}

CheckResult check_convergence(long p, const WindowSpec& w, int max_k, int fit_from, double tol) {
  const ConvergenceReport rep = convergence(p, GroupType(), w, max_k, fit_from);
  Json tv = Json::array();
  bool decreasing = true;
  for (std::size_t k = 0; k < rep.tv.size(); ++k) {
    tv.push_back(to_double(rep.tv[k].midpoint()));
    if (k > 0 && rep.tv[k].hi > rep.tv[k - 1].lo) decreasing = false;
  }
  const double target = 1.0 / static_cast<double>(p);
  CheckResult r{"convergence", std::abs(rep.fitted_ratio - target) <= tol, {}};
  r.details = {{"p", p},           {"m", w.max_order_exp}, {"max_k", max_k},   {"fit_from", fit_from},
               {"tv", tv},         {"tv_decreasing", decreasing}, {"fitted_ratio", rep.fitted_ratio},
               {"target", target}};
  return r;
}

namespace oracle {

GroupRow delta0_step_brute(long p, const GroupType& g, const WindowSpec& w, const BruteForceBound& bound) {
  static MemoCache<std::tuple<long, int, GroupType>, GroupRow> cache;
  return cache.get_or_compute({p, w.max_order_exp, g}, [&] {
    GroupRow row{g, w, {}, 0};
    Rational mass = 0;
    for (const auto& [k, pk] : delta0_small(p, g, bound).probs) {
      const FiniteAbelianGroup kg(p, k);
      const Rational per_element = pk / Rational(ipow(p, static_cast<unsigned long>(k.order_exp())));
      for (Element x = 0; x < kg.size(); ++x) {
        const auto coords = kg.coords(x);
        for (int v = 0; k.order_exp() + v <= w.max_order_exp; ++v) {
          const Rational pr = per_element * (1 - inv_pow(p, 1)) * inv_pow(p, static_cast<unsigned long>(v));
          row.add(bordered_quotient(p, k, coords, v), pr);
          mass += pr;
        }
      }
    }
    row.tail = 1 - mass;
    return row;
  });
}

GroupRow truncated_two_step(long p, const GroupType& g, const WindowSpec& w, const BruteForceBound& bound) {
  GroupRow row{g, w, {}, 0};
  Rational mass = 0;
  for (const auto& [h, x] : delta0_step_brute(p, g, w, bound).probs) {
    for (const auto& [t, y] : delta0_step_brute(p, h, w, bound).probs) {
      row.add(t, x * y);
      mass += x * y;
    }
  }
  row.tail = 1 - mass;
  return row;
}

GroupRow delta0_squared(long p, const GroupType& g, const WindowSpec& w, const BruteForceBound& bound) {
  bound.check(p, g.order_exp(), "delta0_squared");
  const FiniteAbelianGroup grp(p, g);
  std::vector<ElementSet> kernels;
  for (Element a = 0; a < grp.size(); ++a) kernels.push_back(grp.character_kernel(a));
  std::map<GroupType, Integer> pair_counts;
  for (Element a = 0; a < grp.size(); ++a) {
    for (Element b = 0; b < grp.size(); ++b) {
      ElementSet both(grp.size());
      for (Element x = 0; x < grp.size(); ++x) {
        if (kernels[a].contains(x) && kernels[b].contains(x)) both.insert(x);
      }
      pair_counts[grp.subgroup_type(both)] += 1;
    }
  }
  const Integer pairs = ipow(p, static_cast<unsigned long>(2 * g.order_exp()));
  GroupRow row{g, w, {}, 0};
  Rational mass = 0;
  for (const auto& [k, n] : pair_counts) {
    const FiniteAbelianGroup kg(p, k);
    const Rational per_element = ratio(n, pairs) / Rational(ipow(p, static_cast<unsigned long>(k.order_exp())));
    for (Element x = 0; x < kg.size(); ++x) {
      const auto coords = kg.coords(x);
      for (int v = 0; k.order_exp() + v <= w.max_order_exp; ++v) {
        // First Haar element of Z_p^2 has valuation v w.p. (1-p^-2) p^{-2v}.
        const Rational pv = (1 - inv_pow(p, 2)) * inv_pow(p, static_cast<unsigned long>(2 * v));
        const GroupType q = bordered_quotient(p, k, coords, v);
        for (const auto& [t, y] : d_kernel(p, ModuleType{q, 1}, w).probs) {
          row.add(t, per_element * pv * y);
          mass += per_element * pv * y;
        }
      }
    }
  }
  row.tail = 1 - mass;
  return row;
}

}  // namespace oracle

}  // namespace clchain
