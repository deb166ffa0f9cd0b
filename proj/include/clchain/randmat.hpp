#pragma once

// Haar-random matrices over Z/p^N, their cokernels, and the bordering
// constructions that realize d*, d, Delta_0 and d^k as matrix operations.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "clchain/grouptype.hpp"
#include "clchain/measures.hpp"
#include "clchain/snf.hpp"

namespace clchain {

struct SizeTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonInvertible : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// SplitMix64 stream keyed by (master seed, stream id, draw index): the
/// state depends only on the key, never on scheduling.
class SeededRng {
 public:
  SeededRng(std::uint64_t master, std::uint64_t stream, std::uint64_t index);
  std::uint64_t next();
  /// Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// rows x cols matrix of uniform residues mod p^N.
MatrixModPN haar_matrix(long p, int precision, int rows, int cols, SeededRng& rng);

/// diag(p^{lambda_1}, ..., p^{lambda_r}, 1, ..., 1) of size n.
MatrixModPN represent(long p, const GroupType& g, int n, int precision);

/// Cokernel of a rows x cols matrix with rows >= cols: torsion from the
/// elementary divisors plus free rank rows - cols. nullopt when the SNF is
/// not certified at this precision.
std::optional<ModuleType> cokernel_type(const MatrixModPN& m);

struct BorderOptions {
  /// Zero out the new columns above the old rows (the d^k picture).
  bool zero_top_right = false;
};

/// Appends `rows` rows and `cols` columns of uniform entries.
MatrixModPN border(const MatrixModPN& m, int rows, int cols, SeededRng& rng, BorderOptions opts = {});

enum class Construction { fw, dstar, d, delta0, composability, dk, extclass };

Construction parse_construction(const std::string& s);
std::string to_string(Construction c);

struct ExperimentSpec {
  Construction construction = Construction::delta0;
  long p = 2;
  /// Starting precision; 0 picks order_exp(source) + 8.
  int precision = 0;
  /// Matrix size n (for fw the Haar matrix is n x n); -1 picks rank + 2.
  int size = -1;
  ModuleType source;
  /// Number of added rows and columns for dk.
  int k = 1;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  int max_retries = 4;

  Json to_json() const;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::map<ModuleType, std::uint64_t> counts;
  /// composability only: border(1,1) twice, re-representing in between.
  std::map<ModuleType, std::uint64_t> sequential_counts;
  std::uint64_t unresolved = 0;
  /// Samples resolved after r retries, r = 0..max_retries.
  std::vector<std::uint64_t> retries;

  std::uint64_t resolved() const;
  double unresolved_rate() const;
  Json to_json() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Checks the character/extension dictionary on coker(M) for random border
/// rows v: ker(g -> -v M^{-1} g) x Z_p must be the cokernel of [M; v], and
/// the character must be uniform over the |coker M| characters.
struct ExtensionClassReport {
  GroupType group;
  std::uint64_t trials = 0;
  std::uint64_t type_mismatches = 0;
  std::uint64_t unresolved = 0;
  /// Hit counts per character (indexed by the element of coker M).
  std::vector<std::uint64_t> character_counts;
  bool uniform = false;
  double uniform_p_value = 0;
};
ExtensionClassReport extension_class_check(const MatrixModPN& m, std::uint64_t trials, std::uint64_t seed);

/// U * m * L for random unit-triangular U (upper) and L (lower): same
/// cokernel, generic entries.
MatrixModPN scramble(const MatrixModPN& m, SeededRng& rng);

}  // namespace clchain
