#pragma once

// Goodness-of-fit checks comparing sample counts with exact distributions.

#include <cstdint>
#include <string>
#include <vector>

namespace clchain {

struct Cell {
  std::string label;
  double expected_prob = 0;
  std::uint64_t observed = 0;
};

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  double alpha = 0.001;
  /// Smallest per-cell two-sided p-value and the Bonferroni threshold
  /// alpha / cells it is held to.
  double min_cell_p = 1;
  double cell_threshold = 0;
  /// Observations in a cell of probability zero.
  bool impossible_outcome = false;
  std::size_t cells = 0;

  bool pass() const { return !impossible_outcome && p_value >= alpha && min_cell_p >= cell_threshold; }
};

/// Pearson goodness of fit. Cells whose expected count is below
/// min_expected are pooled into one cell before testing.
ChiSquareResult chi_square_test(std::vector<Cell> cells, double alpha = 0.001, double min_expected = 5.0);

/// Two-sample homogeneity test on paired counts (same cell order).
ChiSquareResult chi_square_homogeneity(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                       double alpha = 0.001, double min_expected = 5.0);

/// Least-squares slope of log(values) against index, returned as the fitted
/// per-step ratio exp(slope). Non-positive values are skipped.
double fitted_decay_ratio(const std::vector<double>& values, std::size_t first = 0);

}  // namespace clchain
