#include "clchain/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace clchain {

namespace {

double chi_square_sf(double x, int dof) {
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double two_sided_normal(double z) {
  static const boost::math::normal standard;
  return 2.0 * boost::math::cdf(boost::math::complement(standard, std::abs(z)));
}

}  // namespace

ChiSquareResult chi_square_test(std::vector<Cell> cells, double alpha, double min_expected) {
  ChiSquareResult r;
  r.alpha = alpha;
  std::uint64_t n = 0;
  for (const auto& c : cells) n += c.observed;
  const auto total = static_cast<double>(n);

  std::vector<Cell> kept;
  Cell pooled{"pooled", 0, 0};
  for (const auto& c : cells) {
    if (c.expected_prob <= 0) {
      if (c.observed > 0) r.impossible_outcome = true;
      continue;
    }
    if (c.expected_prob * total < min_expected) {
      pooled.expected_prob += c.expected_prob;
      pooled.observed += c.observed;
    } else {
      kept.push_back(c);
    }
  }
  if (pooled.expected_prob > 0) {
    if (pooled.expected_prob * total < min_expected && !kept.empty()) {
      // Too small even pooled: fold into the smallest kept cell.
      auto smallest = std::min_element(kept.begin(), kept.end(),
                                       [](const Cell& a, const Cell& b) { return a.expected_prob < b.expected_prob; });
      smallest->expected_prob += pooled.expected_prob;
      smallest->observed += pooled.observed;
    } else {
      kept.push_back(pooled);
    }
  }

  r.cells = kept.size();
  r.dof = static_cast<int>(kept.size()) - 1;
  r.cell_threshold = kept.empty() ? 0 : alpha / static_cast<double>(kept.size());
  for (const auto& c : kept) {
    const double e = c.expected_prob * total;
    const double d = static_cast<double>(c.observed) - e;
    r.statistic += d * d / e;
    if (c.expected_prob < 1) {
      const double sd = std::sqrt(total * c.expected_prob * (1 - c.expected_prob));
      r.min_cell_p = std::min(r.min_cell_p, two_sided_normal(d / sd));
    }
  }
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_homogeneity(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                       double alpha, double min_expected) {
  ChiSquareResult r;
  r.alpha = alpha;
  double na = 0, nb = 0;
  for (auto x : a) na += static_cast<double>(x);
  for (auto x : b) nb += static_cast<double>(x);
  const double n = na + nb;
  // Pool sparse cells, then run the 2 x c contingency test.
  std::vector<std::pair<double, double>> kept;
  std::pair<double, double> pooled{0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double row = static_cast<double>(a[i] + b[i]);
    if (row == 0) continue;
    if (row * std::min(na, nb) / n < min_expected) {
      pooled.first += static_cast<double>(a[i]);
      pooled.second += static_cast<double>(b[i]);
    } else {
      kept.emplace_back(static_cast<double>(a[i]), static_cast<double>(b[i]));
    }
  }
  if (pooled.first + pooled.second > 0) kept.push_back(pooled);
  r.cells = kept.size();
  r.dof = static_cast<int>(kept.size()) - 1;
  r.cell_threshold = kept.empty() ? 0 : alpha / static_cast<double>(kept.size());
  for (const auto& [x, y] : kept) {
    const double row = x + y;
    const double ea = row * na / n, eb = row * nb / n;
    r.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    // Per-cell: difference of proportions.
    const double pa = x / na, pb = y / nb, pp = row / n;
    const double sd = std::sqrt(pp * (1 - pp) * (1 / na + 1 / nb));
    if (sd > 0) r.min_cell_p = std::min(r.min_cell_p, two_sided_normal((pa - pb) / sd));
  }
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double fitted_decay_ratio(const std::vector<double>& values, std::size_t first) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = first; i < values.size(); ++i) {
    if (values[i] <= 0) continue;
    const double x = static_cast<double>(i), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  if (n < 2) return 0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace clchain
