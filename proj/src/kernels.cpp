#include "clchain/kernels.hpp"

#include <cstdlib>
#include <tuple>

#include "clchain/counting.hpp"
#include "clchain/memo.hpp"
#include "clchain/parallel.hpp"
#include "clchain/snf.hpp"

namespace clchain {

unsigned worker_count() {
  if (const char* env = std::getenv("CLCHAIN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

Integer factorial(int n) {
  Integer r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

Rational haar_valuation_prob(long p, int v) {
  return (1 - inv_pow(p, 1)) * inv_pow(p, static_cast<unsigned long>(v));
}

// Mass of v >= first under the Haar valuation law.
Rational haar_valuation_tail(long p, int first) {
  return first <= 0 ? Rational(1) : inv_pow(p, static_cast<unsigned long>(first));
}

std::int64_t small_pow(long p, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

// Elementary divisors (zeros kept) of [[diag(p^lambda), k], [0, p^v]].
std::vector<int> bordered_valuations(long p, const GroupType& kt, const std::vector<std::int64_t>& k, int v) {
  const int r = kt.rank();
  MatrixModPN m(p, kt.order_exp() + v + 1, r + 1, r + 1);
  const ModPN ring = m.ring();
  for (int i = 0; i < r; ++i) {
    m.at(i, i) = ring.pow_p(kt.parts()[static_cast<std::size_t>(i)]);
    m.at(i, r) = ring.reduce(k[static_cast<std::size_t>(i)]);
  }
  m.at(r, r) = ring.pow_p(v);
  const SnfResult res = snf_valuations(std::move(m));
  if (!res.certified) throw std::logic_error("bordered matrix is singular");
  return res.valuations;
}

GroupType bump_largest(std::vector<int> valuations, int extra) {
  auto it = std::max_element(valuations.begin(), valuations.end());
  *it += extra;
  return GroupType::make(std::move(valuations));
}

}  // namespace

WindowMeasure as_measure(const GroupRow& row) {
  WindowMeasure m{row.window, {}, row.tail};
  for (const auto& [g, x] : row.probs) m.add(g, x);
  return m;
}

Json row_to_json(const GroupRow& row) {
  Json j;
  j["source"] = row.source.str();
  for (const auto& [key, val] : as_measure(row).to_json().items()) j[key] = val;
  return j;
}

void for_each_valuation_class(long p, const GroupType& k,
                              const std::function<void(const std::vector<std::int64_t>&, const Integer&)>& f) {
  // Blocks of equal parts; within a block only the multiset of valuations
  // matters, since permuting equal coordinates is an automorphism.
  std::vector<std::pair<int, int>> blocks;
  for (int part : k.parts()) {
    if (!blocks.empty() && blocks.back().first == part) {
      ++blocks.back().second;
    } else {
      blocks.emplace_back(part, 1);
    }
  }
  std::vector<std::int64_t> coords;
  coords.reserve(static_cast<std::size_t>(k.rank()));
  std::function<void(std::size_t, Integer)> over_blocks = [&](std::size_t b, Integer weight) {
    if (b == blocks.size()) {
      f(coords, weight);
      return;
    }
    const auto [lambda, mult] = blocks[b];
    // Nondecreasing valuation sequences a_1 <= ... <= a_mult in [0, lambda].
    std::vector<int> seq;
    std::function<void(int)> choose = [&](int lo) {
      if (static_cast<int>(seq.size()) == mult) {
        Integer w = factorial(mult);
        for (std::size_t i = 0; i < seq.size();) {
          std::size_t j = i;
          while (j < seq.size() && seq[j] == seq[i]) ++j;
          w /= factorial(static_cast<int>(j - i));
          i = j;
        }
        for (int a : seq) {
          if (a < lambda) w *= (p - 1) * ipow(p, static_cast<unsigned long>(lambda - a - 1));
        }
        for (int a : seq) coords.push_back(a < lambda ? small_pow(p, a) : 0);
        over_blocks(b + 1, weight * w);
        coords.resize(coords.size() - seq.size());
        return;
      }
      for (int a = lo; a <= lambda; ++a) {
        seq.push_back(a);
        choose(a);
        seq.pop_back();
      }
    };
    choose(0);
  };
  over_blocks(0, 1);
}

GroupRow delta0_small(long p, const GroupType& f, const BruteForceBound& bound) {
  bound.check(p, f.order_exp(), "delta0_small");
  FiniteAbelianGroup group(p, f);
  std::map<GroupType, Integer> counts;
  for (Element a = 0; a < group.size(); ++a) counts[group.subgroup_type(group.character_kernel(a))] += 1;
  GroupRow row{f, {p, f.order_exp()}, {}, 0};
  const Integer n = ipow(p, static_cast<unsigned long>(f.order_exp()));
  for (const auto& [k, c] : counts) row.add(k, ratio(c, n));
  return row;
}

GroupRow delta0_quotient_form(long p, const GroupType& f, const BruteForceBound& bound) {
  bound.check(p, f.order_exp(), "delta0_quotient_form");
  FiniteAbelianGroup group(p, f);
  std::map<GroupType, Integer> counts;
  for (Element x = 0; x < group.size(); ++x) counts[group.quotient_type(group.span({x}))] += 1;
  GroupRow row{f, {p, f.order_exp()}, {}, 0};
  const Integer n = ipow(p, static_cast<unsigned long>(f.order_exp()));
  for (const auto& [q, c] : counts) row.add(q, ratio(c, n));
  return row;
}

GroupRow delta0_row(long p, const GroupType& f) {
  static MemoCache<std::pair<long, GroupType>, GroupRow> cache;
  return cache.get_or_compute({p, f}, [&] {
    GroupRow row{f, {p, f.order_exp()}, {}, 0};
    const Integer n = ipow(p, static_cast<unsigned long>(f.order_exp()));
    for_each_valuation_class(p, f, [&](const std::vector<std::int64_t>& x, const Integer& count) {
      row.add(quotient_by_elements(p, f, {x}), ratio(count, n));
    });
    return row;
  });
}

ExtensionRow dstar_kernel(long p, const GroupType& g) {
  const GroupRow base = delta0_row(p, g);
  ExtensionRow row{g, base.window, {}, 0};
  for (const auto& [k, x] : base.probs) row.add(ModuleType{k, 1}, x);
  return row;
}

GroupRow d_kernel(long p, const ModuleType& h, const WindowSpec& w) {
  if (h.free_rank != 1) throw std::invalid_argument("d_kernel: source must have free rank 1");
  const GroupType& kt = h.torsion;
  GroupRow row{kt, w, {}, 0};
  const int ord = kt.order_exp();
  const int max_v = w.max_order_exp - ord;  // output order is |K| p^v
  row.tail = haar_valuation_tail(p, max_v + 1);
  if (max_v < 0) return row;
  const int e = kt.exponent();
  const Integer n = ipow(p, static_cast<unsigned long>(ord));
  for_each_valuation_class(p, kt, [&](const std::vector<std::int64_t>& k, const Integer& count) {
    const Rational share = ratio(count, n);
    for (int v = 0; v <= std::min(max_v, e); ++v) {
      row.add(GroupType::make(bordered_valuations(p, kt, k, v)), share * haar_valuation_prob(p, v));
    }
    if (max_v > e) {
      // Past v = e only the largest elementary divisor moves.
      const std::vector<int> base = bordered_valuations(p, kt, k, e);
      for (int v = e + 1; v <= max_v; ++v) {
        row.add(bump_largest(base, v - e), share * haar_valuation_prob(p, v));
      }
    }
  });
  return row;
}

GroupRow delta0_kernel(long p, const GroupType& g, const WindowSpec& w) {
  static MemoCache<std::tuple<long, int, GroupType>, GroupRow> cache;
  return cache.get_or_compute({p, w.max_order_exp, g}, [&] {
    GroupRow row{g, w, {}, 0};
    for (const auto& [h, x] : dstar_kernel(p, g).probs) {
      const GroupRow step = d_kernel(p, h, w);
      for (const auto& [t, y] : step.probs) row.add(t, x * y);
      row.tail += x * step.tail;
    }
    return row;
  });
}

DkRow dk_from_base_kernel(long p, const GroupType& b, int k, const WindowSpec& w, const BruteForceBound& bound) {
  if (k < 1) throw std::invalid_argument("dk_from_base_kernel: k must be >= 1");
  Rational c0_over_ck = 1;
  for (int i = 1; i <= k; ++i) c0_over_ck *= 1 - inv_pow(p, static_cast<unsigned long>(i));
  DkRow out{GroupRow{b, w, {}, 0}, {}};
  Rational mass = 0;
  for (const auto& g : enumerate_window(w)) {
    if (!surjects_onto(g, b)) continue;
    Rational s = 0;
    for (const auto& entry : inj_count_with_quotient(p, b, g, bound)) {
      s += entry.count * inj_ratio_qpzp(p, entry.quotient.rank(), k);
    }
    if (s == 0) continue;
    s /= aut_count(p, g);
    out.core[g] = s;
    out.row.add(g, c0_over_ck * s);
    mass += c0_over_ck * s;
  }
  out.row.tail = 1 - mass;
  return out;
}

GroupRow delta0_iterate(long p, const GroupType& f, int n) {
  GroupRow row{f, {p, f.order_exp()}, {{f, 1}}, 0};
  for (int step = 0; step < n; ++step) {
    GroupRow next{f, row.window, {}, 0};
    for (const auto& [k, x] : row.probs) {
      for (const auto& [q, y] : delta0_row(p, k).probs) next.add(q, x * y);
    }
    row = std::move(next);
  }
  return row;
}

GroupRow exact_power_row(long p, const GroupType& g, int n, const WindowSpec& w, const BruteForceBound& bound) {
  GroupRow row{g, w, {}, 0};
  if (n == 0) {
    if (w.contains(g)) {
      row.add(g, 1);
    } else {
      row.tail = 1;
    }
    return row;
  }
  Rational mass = 0;
  for (const auto& [k, x] : delta0_iterate(p, g, n).probs) {
    for (const auto& [t, y] : dk_from_base_kernel(p, k, n, w, bound).row.probs) {
      row.add(t, x * y);
      mass += x * y;
    }
  }
  row.tail = 1 - mass;
  return row;
}

StepFn delta0_step(long p, const WindowSpec& w) {
  return [p, w](const GroupType& g) { return delta0_kernel(p, g, w); };
}

WindowMeasure apply_kernel(const WindowMeasure& nu, const StepFn& step) {
  if (!nu.tail) throw std::invalid_argument("apply_kernel: needs a probability measure with known tail");
  std::vector<std::pair<GroupType, Rational>> items(nu.entries.begin(), nu.entries.end());
  std::vector<GroupRow> rows(items.size());
  parallel_for(items.size(), [&](std::size_t i) { rows[i] = step(items[i].first); });
  WindowMeasure out{nu.window, {}, *nu.tail};
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!(rows[i].window == nu.window)) throw WindowMismatch("kernel row window differs from the measure");
    const Rational& x = items[i].second;
    for (const auto& [t, y] : rows[i].probs) out.add(t, x * y);
    *out.tail += x * rows[i].tail;
  }
  return out;
}

WindowMeasure chain_power(const WindowMeasure& nu, int n, const StepFn& step) {
  WindowMeasure m = nu;
  for (int i = 0; i < n; ++i) m = apply_kernel(m, step);
  return m;
}

WindowMeasure exact_power(const WindowMeasure& nu, int n, const BruteForceBound& bound) {
  if (!nu.tail) throw std::invalid_argument("exact_power: needs a probability measure with known tail");
  std::vector<std::pair<GroupType, Rational>> items(nu.entries.begin(), nu.entries.end());
  std::vector<GroupRow> rows(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    rows[i] = exact_power_row(nu.window.p, items[i].first, n, nu.window, bound);
  });
  WindowMeasure out{nu.window, {}, *nu.tail};
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (const auto& [t, y] : rows[i].probs) out.add(t, items[i].second * y);
    *out.tail += items[i].second * rows[i].tail;
  }
  return out;
}

}  // namespace clchain
