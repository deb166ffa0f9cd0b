#pragma once

// Smith normal form over Z/p^N. Matrices are row-major; the cokernel of an
// r x c matrix is Z_p^r modulo its column span.

#include <cstdint>
#include <vector>

#include "clchain/grouptype.hpp"

namespace clchain {

/// Arithmetic in Z/p^N with p^N < 2^62.
class ModPN {
 public:
  ModPN(long p, int precision);

  long p() const { return p_; }
  int precision() const { return n_; }
  std::uint64_t modulus() const { return q_; }

  std::uint64_t reduce(std::int64_t x) const;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  /// p-adic valuation of a residue; N for zero.
  int valuation(std::uint64_t a) const;
  /// Inverse of a unit (valuation 0).
  std::uint64_t inverse(std::uint64_t unit) const;
  /// p^e mod p^N.
  std::uint64_t pow_p(int e) const;

 private:
  long p_;
  int n_;
  std::uint64_t q_;
};

struct SnfResult {
  /// Elementary-divisor valuations, weakly increasing; N marks "unresolved".
  std::vector<int> valuations;
  bool certified = true;
  int precision = 0;
};

/// Dense row-major matrix of residues mod p^N.
struct MatrixModPN {
  long p = 2;
  int precision = 1;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint64_t> entries;

  MatrixModPN() = default;
  MatrixModPN(long p_, int precision_, int rows_, int cols_)
      : p(p_), precision(precision_), rows(rows_), cols(cols_),
        entries(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0) {}

  std::uint64_t& at(int r, int c) { return entries[static_cast<std::size_t>(r * cols + c)]; }
  std::uint64_t at(int r, int c) const { return entries[static_cast<std::size_t>(r * cols + c)]; }
  ModPN ring() const { return ModPN(p, precision); }
  /// Same entries reduced to a lower precision.
  MatrixModPN reduced(int new_precision) const;
};

/// Valuation-pivot elimination. If `column_ops` is non-null it receives the
/// cols x cols matrix C (row-major) with R * M * C = diag(p^{v_i}) for some
/// invertible R.
SnfResult snf_valuations(MatrixModPN m, std::vector<std::uint64_t>* column_ops = nullptr);

/// Type of Z_p^r / span(columns) for an r x c relation matrix of full row
/// rank, computed at a precision where the answer is exact. `columns` holds c
/// integer vectors of length r; `order_bound` must be >= the order exponent
/// of the cokernel.
GroupType quotient_type(long p, const std::vector<std::vector<std::int64_t>>& relation_columns,
                        int order_bound);

/// Type of (+)_i Z/p^{lambda_i} modulo the subgroup generated by the given
/// elements (coordinate vectors).
GroupType quotient_by_elements(long p, const GroupType& g,
                               const std::vector<std::vector<std::int64_t>>& elements);

/// Partition from a list of valuations (zeros dropped).
GroupType type_from_valuations(const std::vector<int>& valuations);

}  // namespace clchain
