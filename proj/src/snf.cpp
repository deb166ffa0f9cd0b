#include "clchain/snf.hpp"

#include <stdexcept>
#include <utility>

#include "clchain/numeric.hpp"

namespace clchain {

ModPN::ModPN(long p, int precision) : p_(p), n_(precision), q_(1) {
  if (precision < 1) throw std::invalid_argument("precision must be >= 1");
  if (precision > max_word_precision(p)) {
    throw std::invalid_argument("p^N exceeds the word-sized modular range");
  }
  for (int i = 0; i < precision; ++i) q_ *= static_cast<std::uint64_t>(p);
}

std::uint64_t ModPN::reduce(std::int64_t x) const {
  const auto q = static_cast<std::int64_t>(q_);
  std::int64_t r = x % q;
  if (r < 0) r += q;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t ModPN::add(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t s = a + b;
  return s >= q_ ? s - q_ : s;
}

std::uint64_t ModPN::sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + q_ - b; }

std::uint64_t ModPN::mul(std::uint64_t a, std::uint64_t b) const {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q_);
}

int ModPN::valuation(std::uint64_t a) const {
  if (a == 0) return n_;
  int v = 0;
  const auto p = static_cast<std::uint64_t>(p_);
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

std::uint64_t ModPN::inverse(std::uint64_t unit) const {
  __int128 t = 0, new_t = 1;
  __int128 r = static_cast<__int128>(q_), new_r = static_cast<__int128>(unit);
  while (new_r != 0) {
    const __int128 quotient = r / new_r;
    t = std::exchange(new_t, t - quotient * new_t);
    r = std::exchange(new_r, r - quotient * new_r);
  }
  if (r != 1) throw std::invalid_argument("element is not a unit mod p^N");
  if (t < 0) t += static_cast<__int128>(q_);
  return static_cast<std::uint64_t>(t);
}

std::uint64_t ModPN::pow_p(int e) const {
  if (e >= n_) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::uint64_t>(p_);
  return r;
}

MatrixModPN MatrixModPN::reduced(int new_precision) const {
  MatrixModPN out(p, new_precision, rows, cols);
  const ModPN ring(p, new_precision);
  for (std::size_t i = 0; i < entries.size(); ++i) out.entries[i] = entries[i] % ring.modulus();
  return out;
}

SnfResult snf_valuations(MatrixModPN m, std::vector<std::uint64_t>* column_ops) {
  const ModPN ring = m.ring();
  const int rows = m.rows;
  const int cols = m.cols;
  const int n = std::min(rows, cols);
  SnfResult result;
  result.precision = m.precision;

  if (column_ops) {
    column_ops->assign(static_cast<std::size_t>(cols * cols), 0);
    for (int j = 0; j < cols; ++j) (*column_ops)[static_cast<std::size_t>(j * cols + j)] = 1;
  }
  auto cop = [&](int r, int c) -> std::uint64_t& {
    return (*column_ops)[static_cast<std::size_t>(r * cols + c)];
  };

  for (int s = 0; s < n; ++s) {
    int best_v = m.precision, bi = -1, bj = -1;
    for (int i = s; i < rows && best_v > 0; ++i) {
      for (int j = s; j < cols; ++j) {
        const int v = ring.valuation(m.at(i, j));
        if (v < best_v) {
          best_v = v;
          bi = i;
          bj = j;
          if (v == 0) break;
        }
      }
    }
    if (bi < 0) {
      // Residual block is zero mod p^N: the remaining divisors are >= N.
      for (int t = s; t < n; ++t) result.valuations.push_back(m.precision);
      result.certified = false;
      break;
    }
    if (bi != s) {
      for (int j = 0; j < cols; ++j) std::swap(m.at(s, j), m.at(bi, j));
    }
    if (bj != s) {
      for (int i = 0; i < rows; ++i) std::swap(m.at(i, s), m.at(i, bj));
      if (column_ops) {
        for (int i = 0; i < cols; ++i) std::swap(cop(i, s), cop(i, bj));
      }
    }
    const std::uint64_t pv = ring.pow_p(best_v);
    const std::uint64_t unit = m.at(s, s) / pv;
    const std::uint64_t unit_inv = ring.inverse(unit % ring.modulus());
    for (int j = s; j < cols; ++j) m.at(s, j) = ring.mul(m.at(s, j), unit_inv);
    for (int i = s + 1; i < rows; ++i) {
      const std::uint64_t a = m.at(i, s);
      if (a == 0) continue;
      const std::uint64_t c = a / pv;
      for (int j = s; j < cols; ++j) m.at(i, j) = ring.sub(m.at(i, j), ring.mul(c, m.at(s, j)));
    }
    for (int j = s + 1; j < cols; ++j) {
      const std::uint64_t a = m.at(s, j);
      if (a == 0) continue;
      const std::uint64_t c = a / pv;
      m.at(s, j) = 0;
      if (column_ops) {
        for (int i = 0; i < cols; ++i) cop(i, j) = ring.sub(cop(i, j), ring.mul(c, cop(i, s)));
      }
    }
    result.valuations.push_back(best_v);
  }
  return result;
}

GroupType type_from_valuations(const std::vector<int>& valuations) {
  return GroupType::make(valuations);
}

GroupType quotient_type(long p, const std::vector<std::vector<std::int64_t>>& relation_columns,
                        int order_bound) {
  if (relation_columns.empty()) throw std::invalid_argument("quotient_type: no relations");
  const int rows = static_cast<int>(relation_columns.front().size());
  const int cols = static_cast<int>(relation_columns.size());
  if (rows == 0) return GroupType();
  const int precision = order_bound + 1;
  MatrixModPN m(p, precision, rows, cols);
  const ModPN ring = m.ring();
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m.at(i, j) = ring.reduce(relation_columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
  }
  const SnfResult r = snf_valuations(std::move(m));
  if (!r.certified) throw std::logic_error("quotient_type: relation matrix is not of full row rank");
  return type_from_valuations(r.valuations);
}

GroupType quotient_by_elements(long p, const GroupType& g,
                               const std::vector<std::vector<std::int64_t>>& elements) {
  const int r = g.rank();
  if (r == 0) return GroupType();
  std::vector<std::vector<std::int64_t>> cols;
  cols.reserve(static_cast<std::size_t>(r) + elements.size());
  for (int i = 0; i < r; ++i) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(r), 0);
    c[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(ipow(p, static_cast<unsigned long>(g.parts()[static_cast<std::size_t>(i)])).get_si());
    cols.push_back(std::move(c));
  }
  for (const auto& e : elements) cols.push_back(e);
  return quotient_type(p, cols, g.order_exp());
}

}  // namespace clchain
