#include "clchain/abelian.hpp"

#include <bit>
#include <deque>
#include <string>
#include <unordered_set>

namespace clchain {

void BruteForceBound::check(long p, int order_exp, const char* what) const {
  if (order_exp > max_order_exp) {
    throw BruteForceBoundExceeded(std::string(what) + ": group of order " + std::to_string(p) + "^" +
                                  std::to_string(order_exp) + " exceeds the brute-force bound " +
                                  std::to_string(p) + "^" + std::to_string(max_order_exp));
  }
}

std::size_t ElementSet::count() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t ElementSetHash::operator()(const ElementSet& s) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto w : s.words()) h = (h ^ w) * 1099511628211ULL;
  return h;
}

FiniteAbelianGroup::FiniteAbelianGroup(long p, GroupType type) : p_(p), type_(std::move(type)), size_(1) {
  for (int part : type_.parts()) {
    std::int64_t m = 1;
    for (int j = 0; j < part; ++j) m *= p;
    moduli_.push_back(m);
  }
  strides_.resize(moduli_.size());
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(moduli_[i]);
  }
  if (size_ > (std::size_t{1} << 26)) throw BruteForceBoundExceeded("group too large to materialize");

  order_exp_.resize(size_);
  times_p_.resize(size_);
  for (Element e = 0; e < size_; ++e) {
    auto c = coords(e);
    int oe = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::int64_t x = c[i];
      if (x == 0) continue;
      int ord = 0;
      std::int64_t m = moduli_[i];
      // order of x in Z/m is m / gcd(x, m)
      while (x % p == 0) {
        x /= p;
        m /= p;
      }
      while (m > 1) {
        m /= p;
        ++ord;
      }
      oe = std::max(oe, ord);
    }
    order_exp_[e] = static_cast<std::uint8_t>(oe);
    times_p_[e] = scale(e, p);
  }
}

std::vector<std::int64_t> FiniteAbelianGroup::coords(Element e) const {
  std::vector<std::int64_t> c(moduli_.size());
  std::size_t rem = e;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    c[i] = static_cast<std::int64_t>(rem / strides_[i]);
    rem %= strides_[i];
  }
  return c;
}

Element FiniteAbelianGroup::encode(const std::vector<std::int64_t>& c) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    std::int64_t x = c[i] % moduli_[i];
    if (x < 0) x += moduli_[i];
    idx += static_cast<std::size_t>(x) * strides_[i];
  }
  return static_cast<Element>(idx);
}

Element FiniteAbelianGroup::add(Element a, Element b) const {
  std::size_t ra = a, rb = b, idx = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    const auto xa = static_cast<std::int64_t>(ra / strides_[i]);
    const auto xb = static_cast<std::int64_t>(rb / strides_[i]);
    ra %= strides_[i];
    rb %= strides_[i];
    std::int64_t s = xa + xb;
    if (s >= moduli_[i]) s -= moduli_[i];
    idx += static_cast<std::size_t>(s) * strides_[i];
  }
  return static_cast<Element>(idx);
}

Element FiniteAbelianGroup::neg(Element a) const { return scale(a, -1); }

Element FiniteAbelianGroup::scale(Element a, std::int64_t k) const {
  auto c = coords(a);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::int64_t m = moduli_[i];
    const std::int64_t km = ((k % m) + m) % m;
    c[i] = static_cast<std::int64_t>((static_cast<__int128>(c[i]) * km) % m);
  }
  return encode(c);
}

Element FiniteAbelianGroup::generator(int i) const {
  std::vector<std::int64_t> c(moduli_.size(), 0);
  c[static_cast<std::size_t>(i)] = 1;
  return encode(c);
}

ElementSet FiniteAbelianGroup::span(const std::vector<Element>& gens) const {
  ElementSet set(size_);
  std::vector<Element> members{zero()};
  set.insert(zero());
  for (Element g : gens) {
    if (set.contains(g)) continue;
    // members <- members + <g>, adding whole cosets until g's multiple falls in.
    std::vector<Element> base = members;
    Element step = g;
    while (!set.contains(step)) {
      for (Element m : base) {
        const Element x = add(m, step);
        set.insert(x);
        members.push_back(x);
      }
      step = add(step, g);
    }
  }
  return set;
}

std::vector<ElementSet> FiniteAbelianGroup::all_subgroups() const {
  std::vector<ElementSet> out;
  std::unordered_set<ElementSet, ElementSetHash> seen;
  std::deque<ElementSet> queue;
  ElementSet trivial(size_);
  trivial.insert(zero());
  seen.insert(trivial);
  queue.push_back(trivial);
  while (!queue.empty()) {
    ElementSet s = std::move(queue.front());
    queue.pop_front();
    std::vector<Element> members;
    for (Element e = 0; e < size_; ++e) {
      if (s.contains(e)) members.push_back(e);
    }
    // One representative per coset of s.
    ElementSet covered = s;
    for (Element g = 0; g < size_; ++g) {
      if (covered.contains(g)) continue;
      for (Element m : members) covered.insert(add(m, g));
      ElementSet bigger = s;
      Element step = g;
      while (!bigger.contains(step)) {
        for (Element m : members) {
          const Element x = add(m, step);
          bigger.insert(x);
        }
        step = add(step, g);
      }
      if (seen.insert(bigger).second) queue.push_back(std::move(bigger));
    }
    out.push_back(std::move(s));
  }
  return out;
}

GroupType FiniteAbelianGroup::type_from_torsion_counts(const std::vector<std::size_t>& counts) const {
  // counts[j] = |S[p^j]|; the number of parts >= j is log_p(counts[j]/counts[j-1]).
  std::vector<int> conj;
  for (std::size_t j = 1; j < counts.size(); ++j) {
    std::size_t ratio = counts[j] / counts[j - 1];
    int k = 0;
    while (ratio > 1) {
      ratio /= static_cast<std::size_t>(p_);
      ++k;
    }
    if (k == 0) break;
    conj.push_back(k);
  }
  return GroupType::make(conj).conjugate();
}

GroupType FiniteAbelianGroup::subgroup_type(const ElementSet& s) const {
  const int e = type_.exponent();
  std::vector<std::size_t> counts(static_cast<std::size_t>(e) + 1, 0);
  for (Element x = 0; x < size_; ++x) {
    if (!s.contains(x)) continue;
    for (int j = order_exp_[x]; j <= e; ++j) ++counts[static_cast<std::size_t>(j)];
  }
  return type_from_torsion_counts(counts);
}

GroupType FiniteAbelianGroup::quotient_type(const ElementSet& s) const {
  const int e = type_.exponent();
  const std::size_t sub = s.count();
  std::vector<std::size_t> counts(static_cast<std::size_t>(e) + 1, 0);
  for (Element x = 0; x < size_; ++x) {
    // smallest j with p^j x in s
    Element y = x;
    int j = 0;
    while (!s.contains(y)) {
      y = times_p_[y];
      ++j;
    }
    for (int t = j; t <= e; ++t) ++counts[static_cast<std::size_t>(t)];
  }
  for (auto& c : counts) c /= sub;
  return type_from_torsion_counts(counts);
}

ElementSet FiniteAbelianGroup::character_kernel(Element a) const {
  const int e = type_.exponent();
  std::int64_t top = 1;
  for (int j = 0; j < e; ++j) top *= p_;
  const auto ac = coords(a);
  std::vector<std::int64_t> weight(ac.size());
  for (std::size_t i = 0; i < ac.size(); ++i) weight[i] = ac[i] * (top / moduli_[i]);
  ElementSet ker(size_);
  for (Element x = 0; x < size_; ++x) {
    const auto xc = coords(x);
    __int128 s = 0;
    for (std::size_t i = 0; i < xc.size(); ++i) s += static_cast<__int128>(weight[i]) * xc[i];
    if (s % top == 0) ker.insert(x);
  }
  return ker;
}

void FiniteAbelianGroup::for_each_hom_from(const GroupType& source,
                                           const std::function<void(const std::vector<Element>&)>& f) const {
  const auto& src = source.parts();
  std::vector<std::vector<Element>> candidates(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (Element x = 0; x < size_; ++x) {
      if (order_exp_[x] <= src[i]) candidates[i].push_back(x);
    }
  }
  std::vector<Element> images(src.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == src.size()) {
      f(images);
      return;
    }
    for (Element x : candidates[i]) {
      images[i] = x;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace clchain
