#include "clchain/randmat.hpp"

#include <algorithm>
#include <map>

#include "clchain/abelian.hpp"
#include "clchain/numeric.hpp"
#include "clchain/parallel.hpp"
#include "clchain/stats.hpp"

namespace clchain {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
    : state_(splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)) {}

std::uint64_t SeededRng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededRng::below(std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

MatrixModPN haar_matrix(long p, int precision, int rows, int cols, SeededRng& rng) {
  MatrixModPN m(p, precision, rows, cols);
  const std::uint64_t q = m.ring().modulus();
  for (auto& x : m.entries) x = rng.below(q);
  return m;
}

MatrixModPN represent(long p, const GroupType& g, int n, int precision) {
  if (n < g.rank()) throw SizeTooSmall("represent: size " + std::to_string(n) + " below rank of " + g.str());
  MatrixModPN m(p, precision, n, n);
  const ModPN ring = m.ring();
  for (int i = 0; i < n; ++i) m.at(i, i) = ring.pow_p(g.part(static_cast<std::size_t>(i)));
  return m;
}

std::optional<ModuleType> cokernel_type(const MatrixModPN& m) {
  if (m.rows < m.cols) throw std::invalid_argument("cokernel_type: more columns than rows");
  if (m.cols == 0) return ModuleType{GroupType(), m.rows};
  const SnfResult r = snf_valuations(m);
  if (!r.certified) return std::nullopt;
  return ModuleType{GroupType::make(r.valuations), m.rows - m.cols};
}

MatrixModPN border(const MatrixModPN& m, int rows, int cols, SeededRng& rng, BorderOptions opts) {
  MatrixModPN out(m.p, m.precision, m.rows + rows, m.cols + cols);
  const std::uint64_t q = out.ring().modulus();
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) {
      if (i < m.rows && j < m.cols) {
        out.at(i, j) = m.at(i, j);
      } else if (i < m.rows && opts.zero_top_right) {
        out.at(i, j) = 0;
      } else {
        out.at(i, j) = rng.below(q);
      }
    }
  }
  return out;
}

MatrixModPN scramble(const MatrixModPN& m, SeededRng& rng) {
  const ModPN ring = m.ring();
  const int n = m.rows;
  MatrixModPN u(m.p, m.precision, n, n), l(m.p, m.precision, m.cols, m.cols);
  for (int i = 0; i < n; ++i) {
    u.at(i, i) = 1;
    for (int j = i + 1; j < n; ++j) u.at(i, j) = rng.below(ring.modulus());
  }
  for (int i = 0; i < m.cols; ++i) {
    l.at(i, i) = 1;
    for (int j = 0; j < i; ++j) l.at(i, j) = rng.below(ring.modulus());
  }
  auto mul = [&](const MatrixModPN& a, const MatrixModPN& b) {
    MatrixModPN c(a.p, a.precision, a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
      for (int k = 0; k < a.cols; ++k) {
        if (a.at(i, k) == 0) continue;
        for (int j = 0; j < b.cols; ++j) c.at(i, j) = ring.add(c.at(i, j), ring.mul(a.at(i, k), b.at(k, j)));
      }
    }
    return c;
  };
  return mul(mul(u, m), l);
}

Construction parse_construction(const std::string& s) {
  static const std::map<std::string, Construction> names{
      {"fw", Construction::fw},         {"dstar", Construction::dstar},
      {"d", Construction::d},           {"delta0", Construction::delta0},
      {"composability", Construction::composability}, {"dk", Construction::dk},
      {"extclass", Construction::extclass}};
  auto it = names.find(s);
  if (it == names.end()) throw std::invalid_argument("unknown construction '" + s + "'");
  return it->second;
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::fw: return "fw";
    case Construction::dstar: return "dstar";
    case Construction::d: return "d";
    case Construction::delta0: return "delta0";
    case Construction::composability: return "composability";
    case Construction::dk: return "dk";
    case Construction::extclass: return "extclass";
  }
  return "?";
}

Json ExperimentSpec::to_json() const {
  Json j;
  j["construction"] = to_string(construction);
  j["p"] = p;
  j["precision"] = precision;
  j["size"] = size;
  j["source"] = source.str();
  j["k"] = k;
  j["samples"] = samples;
  j["seed"] = seed;
  j["max_retries"] = max_retries;
  j["rng"] = "splitmix64(seed, stream, sample index)";
  return j;
}

std::uint64_t ExperimentResult::resolved() const {
  std::uint64_t n = 0;
  for (const auto& [t, c] : counts) n += c;
  return n;
}

double ExperimentResult::unresolved_rate() const {
  return spec.samples == 0 ? 0.0 : static_cast<double>(unresolved) / static_cast<double>(spec.samples);
}

Json ExperimentResult::to_json() const {
  Json j;
  j["spec"] = spec.to_json();
  auto dump = [](const std::map<ModuleType, std::uint64_t>& c) {
    Json o = Json::object();
    for (const auto& [t, n] : c) o[t.str()] = n;
    return o;
  };
  j["counts"] = dump(counts);
  if (!sequential_counts.empty()) j["sequential_counts"] = dump(sequential_counts);
  j["unresolved"] = unresolved;
  j["unresolved_rate"] = unresolved_rate();
  j["retries"] = retries;
  return j;
}

namespace {

struct Resolution {
  std::optional<ModuleType> type;
  int retries = 0;
};

// Entries are drawn mod p^{Nmax} once; lower precisions see the reduction
// of the same sample, so a retry refines rather than redraws.
Resolution resolve(const MatrixModPN& full, int start, int max_retries) {
  int n = std::min(start, full.precision);
  for (int r = 0;; ++r) {
    if (auto t = cokernel_type(n == full.precision ? full : full.reduced(n))) return {t, r};
    if (r == max_retries || n == full.precision) return {std::nullopt, r};
    n = std::min(2 * n, full.precision);
  }
}

MatrixModPN with_free_rows(const MatrixModPN& m, int extra) {
  MatrixModPN out(m.p, m.precision, m.rows + extra, m.cols);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out.at(i, j) = m.at(i, j);
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.construction == Construction::extclass) {
    throw std::invalid_argument("run_experiment: use extension_class_check for extclass");
  }
  if (!is_prime(spec.p)) throw std::invalid_argument("p must be prime");
  const int nmax = max_word_precision(spec.p);
  const GroupType& g = spec.source.torsion;
  const int start = spec.precision > 0 ? spec.precision : g.order_exp() + 8;
  const int size = spec.size >= 0 ? spec.size : (spec.construction == Construction::fw ? 8 : g.rank() + 2);
  const auto stream = static_cast<std::uint64_t>(spec.construction);

  std::vector<Resolution> joint(spec.samples), sequential;
  if (spec.construction == Construction::composability) sequential.resize(spec.samples);

  parallel_for(spec.samples, [&](std::size_t i) {
    SeededRng rng(spec.seed, stream, i);
    switch (spec.construction) {
      case Construction::fw:
        joint[i] = resolve(haar_matrix(spec.p, nmax, size, size, rng), start, spec.max_retries);
        break;
      case Construction::dstar:
        joint[i] = resolve(border(represent(spec.p, g, size, nmax), 1, 0, rng), start, spec.max_retries);
        break;
      case Construction::d: {
        const MatrixModPN base = with_free_rows(represent(spec.p, g, size, nmax), spec.source.free_rank);
        joint[i] = resolve(border(base, 0, spec.source.free_rank, rng), start, spec.max_retries);
        break;
      }
      case Construction::delta0:
        joint[i] = resolve(border(represent(spec.p, g, size, nmax), 1, 1, rng), start, spec.max_retries);
        break;
      case Construction::dk:
        joint[i] = resolve(border(represent(spec.p, g, size, nmax), spec.k, spec.k, rng, {true}), start,
                           spec.max_retries);
        break;
      case Construction::composability: {
        joint[i] = resolve(border(represent(spec.p, g, size, nmax), 2, 2, rng), start, spec.max_retries);
        const Resolution first = resolve(border(represent(spec.p, g, size, nmax), 1, 1, rng), start, spec.max_retries);
        if (!first.type) {
          sequential[i] = first;
          break;
        }
        const GroupType& g1 = first.type->torsion;
        Resolution second = resolve(border(represent(spec.p, g1, g1.rank() + 2, nmax), 1, 1, rng),
                                    std::max(start, g1.order_exp() + 8), spec.max_retries);
        second.retries += first.retries;
        sequential[i] = second;
        break;
      }
      case Construction::extclass:
        break;
    }
  });

  ExperimentResult out;
  out.spec = spec;
  out.spec.precision = start;
  out.spec.size = size;
  out.retries.assign(static_cast<std::size_t>(spec.max_retries) * 2 + 1, 0);
  for (const auto& r : joint) {
    if (r.type) {
      ++out.counts[*r.type];
      ++out.retries[static_cast<std::size_t>(r.retries)];
    } else {
      ++out.unresolved;
    }
  }
  for (const auto& r : sequential) {
    if (r.type) {
      ++out.sequential_counts[*r.type];
    } else {
      ++out.unresolved;
    }
  }
  while (out.retries.size() > 1 && out.retries.back() == 0) out.retries.pop_back();
  return out;
}

ExtensionClassReport extension_class_check(const MatrixModPN& m, std::uint64_t trials, std::uint64_t seed) {
  if (m.rows != m.cols) throw NonInvertible("extension_class_check: matrix is not square");
  std::vector<std::uint64_t> cops;
  const SnfResult snf = snf_valuations(m, &cops);
  if (!snf.certified) throw NonInvertible("extension_class_check: matrix is singular at this precision");
  const int n = m.cols;
  const ModPN ring = m.ring();

  // Group coordinates in descending part order, each tied to an SNF index.
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    if (snf.valuations[static_cast<std::size_t>(i)] > 0) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return snf.valuations[static_cast<std::size_t>(a)] > snf.valuations[static_cast<std::size_t>(b)];
  });
  ExtensionClassReport rep;
  rep.group = GroupType::make(snf.valuations);
  rep.trials = trials;
  const FiniteAbelianGroup group(m.p, rep.group);
  rep.character_counts.assign(group.size(), 0);
  std::vector<std::optional<GroupType>> kernel_type(group.size());

  for (std::uint64_t t = 0; t < trials; ++t) {
    SeededRng rng(seed, 0x65787463ULL, t);
    MatrixModPN bordered = border(m, 1, 0, rng);
    std::vector<std::uint64_t> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = bordered.at(n, j);
    std::vector<std::int64_t> a;
    for (int c : idx) {
      std::uint64_t w = 0;
      for (int j = 0; j < n; ++j) {
        w = ring.add(w, ring.mul(v[static_cast<std::size_t>(j)], cops[static_cast<std::size_t>(j * n + c)]));
      }
      const auto mod = static_cast<std::uint64_t>(ipow(m.p, static_cast<unsigned long>(snf.valuations[static_cast<std::size_t>(c)])).get_ui());
      a.push_back(static_cast<std::int64_t>((mod - w % mod) % mod));
    }
    const Element chi = group.encode(a);
    ++rep.character_counts[chi];
    if (!kernel_type[chi]) kernel_type[chi] = group.subgroup_type(group.character_kernel(chi));
    const auto coker = cokernel_type(bordered);
    if (!coker) {
      ++rep.unresolved;
    } else if (!(*coker == ModuleType{*kernel_type[chi], 1})) {
      ++rep.type_mismatches;
    }
  }
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < group.size(); ++e) {
    cells.push_back({std::to_string(e), 1.0 / static_cast<double>(group.size()), rep.character_counts[e]});
  }
  const ChiSquareResult chi = chi_square_test(cells);
  rep.uniform = chi.pass();
  rep.uniform_p_value = chi.p_value;
  return rep;
}

}  // namespace clchain
