#include "clchain/measures.hpp"

#include <algorithm>

#include "clchain/counting.hpp"

namespace clchain {

namespace {

void require_same_window(const WindowSpec& a, const WindowSpec& b) {
  if (!(a == b)) throw WindowMismatch("measures live on different windows");
}

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

}  // namespace

IntervalScalar IntervalScalar::operator*(const Rational& s) const {
  if (s >= 0) return {lo * s, hi * s};
  return {hi * s, lo * s};
}

IntervalScalar IntervalScalar::operator*(const IntervalScalar& o) const {
  const Rational c[4] = {lo * o.lo, lo * o.hi, hi * o.lo, hi * o.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

IntervalScalar IntervalScalar::operator/(const IntervalScalar& o) const {
  if (o.lo <= 0) throw std::domain_error("interval division by a non-positive interval");
  return *this * IntervalScalar{1 / o.hi, 1 / o.lo};
}

Json IntervalScalar::to_json() const {
  return Json::array({to_double(lo), to_double(hi)});
}

IntervalScalar c_constant(long p, int k, int terms) {
  if (k < 0 || terms < 1) throw std::invalid_argument("c_constant: need k >= 0 and terms >= 1");
  Rational partial = 1;
  for (int i = k + 1; i <= k + terms; ++i) partial *= 1 - inv_pow(p, static_cast<unsigned long>(i));
  // prod (1 - x_i) >= 1 - sum x_i over the omitted factors.
  const Rational omitted = inv_pow(p, static_cast<unsigned long>(k + terms)) / (p - 1);
  return {partial * (1 - omitted), partial};
}

Rational mu0_unnormalized(long p, const GroupType& g) {
  return ratio(1, aut_count(p, g));
}

Rational mu_k_unnormalized(long p, const ModuleType& h) {
  const Integer denom =
      ipow(p, static_cast<unsigned long>(h.torsion.order_exp() * h.free_rank)) * aut_count(p, h.torsion);
  return ratio(1, denom);
}

Rational WindowMeasure::at(const GroupType& g) const {
  auto it = entries.find(g);
  return it == entries.end() ? Rational(0) : it->second;
}

void WindowMeasure::add(const GroupType& g, const Rational& x) {
  if (x == 0) return;
  auto [it, inserted] = entries.try_emplace(g, x);
  if (!inserted) {
    it->second += x;
    if (it->second == 0) entries.erase(it);
  }
}

Rational WindowMeasure::window_mass() const {
  Rational s = 0;
  for (const auto& [g, x] : entries) s += x;
  return s;
}

Json WindowMeasure::to_json() const {
  Json j;
  j["p"] = window.p;
  j["max_order_exp"] = window.max_order_exp;
  Json e = Json::object();
  for (const auto& [g, x] : entries) e[g.str()] = to_string(x);
  j["entries"] = e;
  j["tail"] = tail ? Json(to_string(*tail)) : Json(nullptr);
  return j;
}

WindowMeasure WindowMeasure::from_json(const Json& j) {
  WindowMeasure m;
  m.window = {j.at("p").get<long>(), j.at("max_order_exp").get<int>()};
  m.window.validate();
  for (const auto& [key, val] : j.at("entries").items()) {
    const GroupType g = GroupType::parse(key);
    if (!m.window.contains(g)) throw WindowMismatch("entry " + key + " lies outside the window");
    m.entries[g] = parse_rational(val.get<std::string>());
  }
  if (j.contains("tail") && !j.at("tail").is_null()) {
    m.tail = parse_rational(j.at("tail").get<std::string>());
  } else {
    m.tail.reset();
  }
  return m;
}

WindowMeasure mu0_measure(const WindowSpec& w) {
  WindowMeasure m{w, {}, std::nullopt};
  for (const auto& g : enumerate_window(w)) m.entries[g] = mu0_unnormalized(w.p, g);
  return m;
}

WindowMeasure moment_measure(const GroupType& f, const WindowSpec& w) {
  WindowMeasure m{w, {}, std::nullopt};
  for (const auto& g : enumerate_window(w)) {
    if (!surjects_onto(g, f)) continue;
    m.add(g, ratio(sur_count(w.p, g, f), aut_count(w.p, g)));
  }
  return m;
}

Rational inner_product(const WindowMeasure& a, const WindowMeasure& b) {
  require_same_window(a.window, b.window);
  Rational s = 0;
  for (const auto& [g, x] : a.entries) {
    auto it = b.entries.find(g);
    if (it != b.entries.end()) s += x * it->second * aut_count(a.window.p, g);
  }
  return s;
}

L1Distance l1_distance(const WindowMeasure& a, const WindowMeasure& b) {
  require_same_window(a.window, b.window);
  L1Distance d;
  for (const auto& [g, x] : a.entries) d.window += abs(x - b.at(g));
  for (const auto& [g, y] : b.entries) {
    if (!a.entries.count(g)) d.window += abs(y);
  }
  if (a.tail && b.tail) d.tail_difference = abs(*a.tail - *b.tail);
  return d;
}

}  // namespace clchain
