#include "clchain/counting.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "clchain/memo.hpp"
#include "clchain/snf.hpp"

namespace clchain {

namespace {

using PairKey = std::tuple<long, GroupType, GroupType>;

MemoCache<PairKey, CountValue>& sur_cache() {
  static MemoCache<PairKey, CountValue> cache;
  return cache;
}

MemoCache<std::pair<long, GroupType>, std::map<GroupType, CountValue>>& subgroup_cache() {
  static MemoCache<std::pair<long, GroupType>, std::map<GroupType, CountValue>> cache;
  return cache;
}

MemoCache<PairKey, std::vector<SubgroupTypeCount>>& inj_cache() {
  static MemoCache<PairKey, std::vector<SubgroupTypeCount>> cache;
  return cache;
}

MemoCache<std::pair<long, GroupType>, CountValue>& aut_cache() {
  static MemoCache<std::pair<long, GroupType>, CountValue> cache;
  return cache;
}

// All elements of G killed by p^beta, as coordinate vectors.
std::vector<std::vector<std::int64_t>> torsion_elements(long p, const GroupType& g, int beta) {
  std::vector<std::vector<std::int64_t>> out{{}};
  for (int lambda : g.parts()) {
    const int free_digits = std::min(lambda, beta);
    std::int64_t step = 1;
    for (int j = 0; j < lambda - free_digits; ++j) step *= p;
    std::int64_t count = 1;
    for (int j = 0; j < free_digits; ++j) count *= p;
    std::vector<std::vector<std::int64_t>> next;
    next.reserve(out.size() * static_cast<std::size_t>(count));
    for (const auto& prefix : out) {
      for (std::int64_t t = 0; t < count; ++t) {
        auto v = prefix;
        v.push_back(t * step);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

CountValue hom_count(long p, const GroupType& a, const GroupType& b) {
  unsigned long e = 0;
  for (int x : a.parts()) {
    for (int y : b.parts()) e += static_cast<unsigned long>(std::min(x, y));
  }
  return ipow(p, e);
}

CountValue aut_count(long p, const GroupType& a) {
  return aut_cache().get_or_compute({p, a}, [&] {
    const GroupType conj = a.conjugate();
    long exp = 0;
    for (int c : conj.parts()) exp += static_cast<long>(c) * c;
    CountValue product = 1;
    for (int part = 1; part <= a.exponent(); ++part) {
      const int m = a.multiplicity(part);
      exp -= static_cast<long>(m) * (m + 1) / 2;
      for (int k = 1; k <= m; ++k) product *= ipow(p, static_cast<unsigned long>(k)) - 1;
    }
    return CountValue(ipow(p, static_cast<unsigned long>(exp)) * product);
  });
}

CountValue subgroup_count(long p, const GroupType& b, const GroupType& sub, const BruteForceBound& bound) {
  const auto& table = subgroup_cache().get_or_compute({p, b}, [&] {
    bound.check(p, b.order_exp(), "subgroup_count");
    FiniteAbelianGroup group(p, b);
    std::map<GroupType, CountValue> counts;
    for (const auto& s : group.all_subgroups()) counts[group.subgroup_type(s)] += 1;
    return counts;
  });
  auto it = table.find(sub);
  return it == table.end() ? CountValue(0) : it->second;
}

CountValue sur_count(long p, const GroupType& a, const GroupType& b, const BruteForceBound& bound) {
  if (b.is_trivial()) return 1;
  return sur_cache().get_or_compute({p, a, b}, [&] {
    CountValue sur = hom_count(p, a, b);
    for (const auto& smaller : downset(b)) {
      if (smaller == b) continue;
      const CountValue mult = subgroup_count(p, b, smaller, bound);
      if (mult != 0) sur -= mult * sur_count(p, a, smaller, bound);
    }
    return sur;
  });
}

std::vector<SubgroupTypeCount> inj_count_with_quotient(long p, const GroupType& b, const GroupType& g,
                                                       const BruteForceBound& bound) {
  if (b.is_trivial()) return {SubgroupTypeCount{g, b, g, 1}};
  return inj_cache().get_or_compute({p, b, g}, [&] {
    bound.check(p, g.order_exp(), "inj_count_with_quotient");
    std::map<GroupType, CountValue> by_quotient;
    if (surjects_onto(g, b)) {
      std::vector<std::vector<std::vector<std::int64_t>>> candidates;
      for (int beta : b.parts()) candidates.push_back(torsion_elements(p, g, beta));
      std::vector<std::vector<std::int64_t>> images(candidates.size());
      const int target = g.order_exp() - b.order_exp();
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == candidates.size()) {
          const GroupType q = quotient_by_elements(p, g, images);
          if (q.order_exp() == target) by_quotient[q] += 1;
          return;
        }
        for (const auto& x : candidates[i]) {
          images[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    }
    std::vector<SubgroupTypeCount> out;
    for (auto& [q, c] : by_quotient) out.push_back({g, b, q, c});
    return out;
  });
}

Rational inj_ratio_qpzp(long p, int rank, int k) {
  Rational r = 1;
  for (int j = 0; j < rank; ++j) {
    if (j >= k) return 0;
    r *= Rational(1) - inv_pow(p, static_cast<unsigned long>(k - j));
  }
  return r;
}

CountValue linked_subgroup_count(long p, const GroupType& f1, const GroupType& f2, const BruteForceBound& bound) {
  bound.check(p, f1.order_exp() + f2.order_exp(), "linked_subgroup_count");
  std::vector<int> all = f1.parts();
  all.insert(all.end(), f2.parts().begin(), f2.parts().end());
  const GroupType product = GroupType::make(all);
  FiniteAbelianGroup group(p, product);

  // Coordinates of the product that belong to each factor.
  std::vector<int> owner(product.parts().size(), -1);
  auto assign = [&](const GroupType& f, int id) {
    for (int part : f.parts()) {
      for (std::size_t i = 0; i < owner.size(); ++i) {
        if (owner[i] == -1 && product.parts()[i] == part) {
          owner[i] = id;
          break;
        }
      }
    }
  };
  assign(f1, 1);
  assign(f2, 2);

  auto projection_is_onto = [&](const ElementSet& s, int id, const GroupType& f) {
    std::size_t target = 1;
    for (int part : f.parts()) target *= static_cast<std::size_t>(ipow(p, static_cast<unsigned long>(part)).get_ui());
    std::vector<bool> hit(target, false);
    std::size_t distinct = 0;
    for (Element x = 0; x < group.size(); ++x) {
      if (!s.contains(x)) continue;
      const auto c = group.coords(x);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (owner[i] == id) idx = idx * static_cast<std::size_t>(group.moduli()[i]) + static_cast<std::size_t>(c[i]);
      }
      if (!hit[idx]) {
        hit[idx] = true;
        ++distinct;
      }
    }
    return distinct == target;
  };

  CountValue count = 0;
  for (const auto& s : group.all_subgroups()) {
    if (projection_is_onto(s, 1, f1) && projection_is_onto(s, 2, f2)) count += 1;
  }
  return count;
}

namespace brute {

namespace {

template <class Pred>
CountValue count_homs(long p, const GroupType& a, const GroupType& b, Pred pred) {
  FiniteAbelianGroup target(p, b);
  CountValue n = 0;
  target.for_each_hom_from(a, [&](const std::vector<Element>& images) {
    if (pred(target, images)) n += 1;
  });
  return n;
}

std::size_t order_of(long p, const GroupType& g) {
  return static_cast<std::size_t>(ipow(p, static_cast<unsigned long>(g.order_exp())).get_ui());
}

}  // namespace

CountValue hom_count(long p, const GroupType& a, const GroupType& b) {
  return count_homs(p, a, b, [](const FiniteAbelianGroup&, const std::vector<Element>&) { return true; });
}

CountValue sur_count(long p, const GroupType& a, const GroupType& b) {
  const std::size_t target = order_of(p, b);
  return count_homs(p, a, b, [&](const FiniteAbelianGroup& g, const std::vector<Element>& images) {
    return g.span(images).count() == target;
  });
}

CountValue inj_count(long p, const GroupType& a, const GroupType& b) {
  const std::size_t source = order_of(p, a);
  return count_homs(p, a, b, [&](const FiniteAbelianGroup& g, const std::vector<Element>& images) {
    return g.span(images).count() == source;
  });
}

CountValue aut_count(long p, const GroupType& a) { return brute::sur_count(p, a, a); }

Rational inj_ratio_qpzp(long p, const GroupType& f, int k) {
  if (k == 0) return f.is_trivial() ? Rational(1) : Rational(0);
  const GroupType ambient = GroupType::make(std::vector<int>(static_cast<std::size_t>(k), f.exponent()));
  const CountValue inj = brute::inj_count(p, f, ambient);
  return ratio(inj, ipow(p, static_cast<unsigned long>(f.order_exp() * k)));
}

}  // namespace brute

}  // namespace clchain
