// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "clchain/checks.hpp"

using namespace clchain;

namespace {

struct Criterion {
  int number;
  std::string summary;
  double budget_seconds;
  std::function<std::vector<CheckResult>()> run;
};

const std::uint64_t kSeed = 20240601;

std::vector<Criterion> criteria() {
  const Rational milli(1, 1000);
  return {
      {1, "detailed balance, p=2 m=6 and p=3 m=5", 120,
       [] {
         return std::vector<CheckResult>{check_reversibility(2, {2, 6}), check_two_level_balance(2, {2, 6}),
                                         check_reversibility(3, {3, 5}), check_two_level_balance(3, {3, 5})};
       }},
      {2, "character kernels equal element quotients, |F| <= p^4", 60,
       [] { return std::vector<CheckResult>{check_duality(2, 4), check_duality(3, 4)}; }},
      {3, "Delta_0 Moment[F] intervals, |F| <= p^3, m=8, width <= 1e-6", 300,
       [] {
         const Rational micro(1, 1000000);
         return std::vector<CheckResult>{check_basis(2, {2, 8}, 3, micro), check_basis(3, {3, 8}, 3, micro)};
       }},
      {4, "eigenvectors e_F exact and spectrum {1/|F|}, |F| <= p^4", 120,
       [] { return std::vector<CheckResult>{check_eigen(2, 4), check_eigen(3, 4)}; }},
      {5, "curious formula, |F1|,|F2| <= p^3; c0 x partial sum at p=2 m=16 within 1e-3", 300,
       [milli] {
         return std::vector<CheckResult>{check_curious(2, 3, {2, 16}, true, milli),
                                         check_curious(3, 3, {3, 6}, false, milli)};
       }},
      {6, "moments are one, p=2 m=16, B in {0,(1),(2),(1,1)}", 60,
       [milli] {
         return std::vector<CheckResult>{check_moments(
             2, {2, 16}, {GroupType(), GroupType::parse("1"), GroupType::parse("2"), GroupType::parse("1,1")}, milli)};
       }},
      {7, "bordered matrices vs Delta_0 rows, p=2, 1e5 samples", 120,
       [] {
         std::vector<CheckResult> out;
         for (const char* g : {"0", "1", "2,1"}) {
           out.push_back(check_monte_carlo(2, GroupType::parse(g), 100000, kSeed, {2, 12}, 0.001));
         }
         return out;
       }},
      {8, "Delta_0^2 composition exact and border(2,2) sampling, 1e5 samples", 180,
       [] {
         return std::vector<CheckResult>{check_composability(
             2, {GroupType(), GroupType::parse("1"), GroupType::parse("2,1")}, {2, 8}, 100000, kSeed)};
       }},
      {9, "TV decay ratio within 0.05 of 1/p, m=10, k <= 15", 120,
       [] { return std::vector<CheckResult>{check_convergence(2, {2, 10}, 15, 5, 0.05),
                                            check_convergence(3, {3, 10}, 15, 5, 0.05)}; }},
      {10, "d^k(B x Z_p^k) increases to Moment[(1)], L1 <= 1e-2 at k=10, m=6", 60,
       [] { return std::vector<CheckResult>{check_limit(2, GroupType::parse("1"), {2, 6}, 10, Rational(1, 100))}; }},
      {11, "counting formulas vs brute force, |A|,|B| <= p^3, inj ratios k <= 3", 120,
       [] { return std::vector<CheckResult>{check_counting(2, 3, 3), check_counting(3, 3, 3)}; }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::string(argv[1]) == "-v";
  int failed = 0;
  for (const auto& c : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckResult> results;
    std::string error;
    try {
      results = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = error.empty() && !results.empty();
    for (const auto& r : results) pass = pass && r.pass;
    const bool in_budget = seconds <= c.budget_seconds;
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s (%.1fs%s)\n", pass ? "PASS" : "FAIL", c.number, c.summary.c_str(), seconds,
                in_budget ? "" : ", over time budget");
    if (!error.empty()) std::printf("    error: %s\n", error.c_str());
    for (const auto& r : results) {
      if (!r.pass || verbose) std::printf("    %s %s: %s\n", r.pass ? "ok" : "failed", r.name.c_str(), r.details.dump().c_str());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
