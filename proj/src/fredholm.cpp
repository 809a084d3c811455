#include "afk/fredholm.hpp"

#include "afk/error.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace afk {

// ---------------------------------------------------------------------------
// RatMatrix

RatMatrix RatMatrix::identity(std::size_t n) {
  RatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.rows_[i].emplace_back(i, Rational(1));
  return m;
}

RatMatrix RatMatrix::from_dense(const std::vector<std::vector<Rational>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  RatMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorKind::shape_mismatch, "row " + std::to_string(r) + " has length " +
                                                 std::to_string(rows[r].size()) +
                                                 ", expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c)
      if (sgn(rows[r][c]) != 0) m.rows_[r].emplace_back(c, rows[r][c]);
  }
  return m;
}

Rational RatMatrix::get(std::size_t r, std::size_t c) const {
  const auto& row = rows_.at(r);
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const Entry& e, std::size_t col) { return e.first < col; });
  return it != row.end() && it->first == c ? it->second : Rational(0);
}

void RatMatrix::set(std::size_t r, std::size_t c, const Rational& v) {
  if (r >= rows() || c >= cols_) {
    throw Error(ErrorKind::index_out_of_range, "entry (" + std::to_string(r) + "," +
                                                   std::to_string(c) + ") outside " +
                                                   std::to_string(rows()) + "x" +
                                                   std::to_string(cols_));
  }
  auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const Entry& e, std::size_t col) { return e.first < col; });
  if (it != row.end() && it->first == c) {
    if (sgn(v) == 0) row.erase(it);
    else it->second = v;
  } else if (sgn(v) != 0) {
    row.insert(it, Entry{c, v});
  }
}

std::size_t RatMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows());
  for (std::size_t r = 0; r < rows(); ++r)
    for (const auto& [c, v] : rows_[r]) t.rows_[c].emplace_back(r, v);
  return t;
}

Rational RatMatrix::trace() const {
  Rational t = 0;
  for (std::size_t r = 0; r < std::min(rows(), cols_); ++r) t += get(r, r);
  return t;
}

bool RatMatrix::is_zero() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const auto& r) { return r.empty(); });
}

RatMatrix RatMatrix::embedded(std::size_t rows, std::size_t cols, std::size_t r,
                              std::size_t c) const {
  if (r + this->rows() > rows || c + cols_ > cols) {
    throw Error(ErrorKind::index_out_of_range, "embedding does not fit");
  }
  RatMatrix out(rows, cols);
  for (std::size_t i = 0; i < this->rows(); ++i)
    for (const auto& [j, v] : rows_[i]) out.rows_[r + i].emplace_back(c + j, v);
  return out;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::shape_mismatch, "matrix product of " + std::to_string(a.rows()) +
                                               "x" + std::to_string(a.cols()) + " and " +
                                               std::to_string(b.rows()) + "x" +
                                               std::to_string(b.cols()));
  }
  RatMatrix out(a.rows(), b.cols());
  std::vector<Rational> acc(b.cols());
  std::vector<char> touched(b.cols(), 0);
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cols.clear();
    for (const auto& [k, v] : a.rows_[i]) {
      for (const auto& [j, w] : b.rows_[k]) {
        if (!touched[j]) {
          touched[j] = 1;
          cols.push_back(j);
          acc[j] = v * w;
        } else {
          acc[j] += v * w;
        }
      }
    }
    std::sort(cols.begin(), cols.end());
    auto& row = out.rows_[i];
    for (std::size_t j : cols) {
      touched[j] = 0;
      if (sgn(acc[j]) != 0) row.emplace_back(j, acc[j]);
    }
  }
  return out;
}

namespace {

RatMatrix combine(const RatMatrix& a, const RatMatrix& b, int sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::shape_mismatch, "matrix sum of " + std::to_string(a.rows()) + "x" +
                                               std::to_string(a.cols()) + " and " +
                                               std::to_string(b.rows()) + "x" +
                                               std::to_string(b.cols()));
  }
  RatMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto& x = a.row(i);
    const auto& y = b.row(i);
    std::size_t p = 0, q = 0;
    while (p < x.size() || q < y.size()) {
      if (q == y.size() || (p < x.size() && x[p].first < y[q].first)) {
        out.set(i, x[p].first, x[p].second);
        ++p;
      } else if (p == x.size() || y[q].first < x[p].first) {
        out.set(i, y[q].first, sign > 0 ? y[q].second : Rational(-y[q].second));
        ++q;
      } else {
        Rational v = sign > 0 ? Rational(x[p].second + y[q].second)
                              : Rational(x[p].second - y[q].second);
        out.set(i, x[p].first, v);
        ++p;
        ++q;
      }
    }
  }
  return out;
}

}  // namespace

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) { return combine(a, b, 1); }
RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) { return combine(a, b, -1); }

RatMatrix operator*(const Rational& s, const RatMatrix& a) {
  RatMatrix out(a.rows(), a.cols());
  if (sgn(s) == 0) return out;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (const auto& [j, v] : a.rows_[i]) out.rows_[i].emplace_back(j, s * v);
  return out;
}

std::string to_string(const RatMatrix& m) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) s += ",";
    s += "[";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) s += ",";
      s += m.get(r, c).get_str();
    }
    s += "]";
  }
  return s + "]";
}

RatMatrix block_diagonal(const RatMatrix& a, const RatMatrix& b) {
  const std::size_t rows = a.rows() + b.rows();
  const std::size_t cols = a.cols() + b.cols();
  return a.embedded(rows, cols, 0, 0) + b.embedded(rows, cols, a.rows(), a.cols());
}

// ---------------------------------------------------------------------------
// Algebra elements

namespace {

constexpr std::size_t max_block_dim = std::size_t{1} << 24;

void require_level(const BratteliDiagram& d, const AlgebraElement& a) {
  const auto sizes = block_sizes(d, a.level);
  if (a.blocks.size() != sizes.size()) {
    throw Error(ErrorKind::shape_mismatch, "element has " + std::to_string(a.blocks.size()) +
                                               " blocks, level " + std::to_string(a.level) +
                                               " has " + std::to_string(sizes.size()));
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (a.blocks[i].rows() != sizes[i] || a.blocks[i].cols() != sizes[i]) {
      throw Error(ErrorKind::shape_mismatch, "block " + std::to_string(i) + " is " +
                                                 std::to_string(a.blocks[i].rows()) + "x" +
                                                 std::to_string(a.blocks[i].cols()) +
                                                 ", expected size " + std::to_string(sizes[i]));
    }
  }
}

void require_block(std::size_t block, std::size_t count) {
  if (block >= count) {
    throw Error(ErrorKind::index_out_of_range, "block " + std::to_string(block) +
                                                   " out of range (" + std::to_string(count) +
                                                   " blocks)");
  }
}

}  // namespace

std::vector<std::size_t> block_sizes(const BratteliDiagram& diagram, std::size_t level) {
  std::vector<std::size_t> out;
  for (const auto& d : diagram.dims(level)) {
    if (sgn(d) <= 0 || d > max_block_dim) {
      throw Error(ErrorKind::invalid_argument,
                  "block dimension " + d.get_str() + " at level " + std::to_string(level) +
                      " is outside the supported range");
    }
    out.push_back(d.get_ui());
  }
  return out;
}

AlgebraElement zero_element(const BratteliDiagram& diagram, std::size_t level) {
  AlgebraElement a{level, {}};
  for (std::size_t d : block_sizes(diagram, level)) a.blocks.emplace_back(d, d);
  return a;
}

AlgebraElement unit_element(const BratteliDiagram& diagram, std::size_t level) {
  AlgebraElement a{level, {}};
  for (std::size_t d : block_sizes(diagram, level)) a.blocks.push_back(RatMatrix::identity(d));
  return a;
}

AlgebraElement matrix_unit(const BratteliDiagram& diagram, std::size_t level, std::size_t block,
                           std::size_t r, std::size_t c) {
  AlgebraElement a = zero_element(diagram, level);
  require_block(block, a.blocks.size());
  a.blocks[block].set(r, c, 1);
  return a;
}

AlgebraElement minimal_projection(const BratteliDiagram& diagram, std::size_t level,
                                  std::size_t block) {
  return matrix_unit(diagram, level, block, 0, 0);
}

AlgebraElement realize_class(const BratteliDiagram& diagram, std::size_t level,
                             const IntVector& x) {
  AlgebraElement a = zero_element(diagram, level);
  if (x.size() != a.blocks.size()) {
    throw Error(ErrorKind::shape_mismatch, "class vector of length " + std::to_string(x.size()) +
                                               " at a level with " +
                                               std::to_string(a.blocks.size()) + " blocks");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x[i]) < 0 || x[i] > a.blocks[i].rows()) {
      throw Error(ErrorKind::unrealizable_class,
                  "rank " + x[i].get_str() + " in block " + std::to_string(i) +
                      " is not between 0 and the block dimension " +
                      std::to_string(a.blocks[i].rows()));
    }
    for (std::size_t r = 0; r < x[i].get_ui(); ++r) a.blocks[i].set(r, r, 1);
  }
  return a;
}

AlgebraElement embed(const BratteliDiagram& diagram, const AlgebraElement& a) {
  require_level(diagram, a);
  const IntMatrix m = diagram.multiplicity(a.level);
  const auto sizes = block_sizes(diagram, a.level + 1);
  AlgebraElement out{a.level + 1, {}};
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    RatMatrix b(sizes[j], sizes[j]);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
      for (Integer c = 0; c < m(j, i); ++c) {
        b = b + a.blocks[i].embedded(sizes[j], sizes[j], offset, offset);
        offset += a.blocks[i].rows();
      }
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.level != b.level || a.blocks.size() != b.blocks.size()) {
    throw Error(ErrorKind::level_mismatch, "elements live at different levels");
  }
  AlgebraElement out{a.level, {}};
  for (std::size_t i = 0; i < a.blocks.size(); ++i) out.blocks.push_back(a.blocks[i] * b.blocks[i]);
  return out;
}

bool is_projection(const AlgebraElement& a) {
  for (const auto& b : a.blocks)
    if (b.rows() != b.cols() || b * b != b || b.transpose() != b) return false;
  return true;
}

IntVector k0_pushforward(const BratteliDiagram& diagram, std::size_t level, const IntVector& v) {
  const IntMatrix m = diagram.multiplicity(level);
  if (v.size() != m.cols()) {
    throw Error(ErrorKind::shape_mismatch, "class vector of length " + std::to_string(v.size()) +
                                               " at a level with " + std::to_string(m.cols()) +
                                               " blocks");
  }
  return m * v;
}

// ---------------------------------------------------------------------------
// Modules

EvenFredholmModule canonical_module(const BratteliDiagram& diagram, std::size_t level,
                                    std::size_t block) {
  EvenFredholmModule m;
  m.level = level;
  m.block_dims = block_sizes(diagram, level);
  require_block(block, m.block_dims.size());
  const std::size_t d = m.block_dims[block];
  m.half_dim = d;
  m.placements = {{block, 0}};
  m.F = RatMatrix(2 * d, 2 * d);
  m.gamma = RatMatrix(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    m.F.set(i, d + i, 1);
    m.F.set(d + i, i, 1);
    m.gamma.set(i, i, 1);
    m.gamma.set(d + i, d + i, -1);
  }
  m.block_weights.assign(m.block_dims.size(), Integer(0));
  m.block_weights[block] = 1;
  return m;
}

namespace {

void require_same_level(const EvenFredholmModule& m, const AlgebraElement& a) {
  if (a.level != m.level) {
    throw Error(ErrorKind::level_mismatch, "element at level " + std::to_string(a.level) +
                                               ", module at level " + std::to_string(m.level));
  }
  if (a.blocks.size() != m.block_dims.size()) {
    throw Error(ErrorKind::shape_mismatch, "element has " + std::to_string(a.blocks.size()) +
                                               " blocks, module algebra has " +
                                               std::to_string(m.block_dims.size()));
  }
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    if (a.blocks[i].rows() != m.block_dims[i] || a.blocks[i].cols() != m.block_dims[i]) {
      throw Error(ErrorKind::shape_mismatch, "block " + std::to_string(i) + " has the wrong size");
    }
  }
}

}  // namespace

RatMatrix represent(const EvenFredholmModule& m, const AlgebraElement& a) {
  require_same_level(m, a);
  const std::size_t n = m.dim();
  RatMatrix out(n, n);
  for (const auto& p : m.placements) {
    const RatMatrix& b = a.blocks.at(p.block);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (const auto& [j, v] : b.row(i)) out.set(p.offset + i, p.offset + j, v);
  }
  return out;
}

bool AxiomsReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

std::vector<AlgebraElement> algebra_generators(const EvenFredholmModule& m) {
  std::vector<AlgebraElement> gens;
  auto unit = [&](std::size_t block, std::size_t r, std::size_t c) {
    AlgebraElement a{m.level, {}};
    for (std::size_t d : m.block_dims) a.blocks.emplace_back(d, d);
    a.blocks[block].set(r, c, 1);
    return a;
  };
  for (std::size_t b = 0; b < m.block_dims.size(); ++b) {
    gens.push_back(unit(b, 0, 0));
    for (std::size_t r = 0; r + 1 < m.block_dims[b]; ++r) {
      gens.push_back(unit(b, r, r + 1));
      gens.push_back(unit(b, r + 1, r));
    }
  }
  return gens;
}

AxiomsReport axioms_check(const EvenFredholmModule& m) {
  AxiomsReport rep;
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  const std::size_t n = m.dim();
  const bool shapes = m.F.rows() == n && m.F.cols() == n && m.gamma.rows() == n &&
                      m.gamma.cols() == n;
  add("operators act on the graded space", shapes,
      "F is " + std::to_string(m.F.rows()) + "x" + std::to_string(m.F.cols()) + ", gamma is " +
          std::to_string(m.gamma.rows()) + "x" + std::to_string(m.gamma.cols()) +
          ", graded dimension " + std::to_string(n));
  if (!shapes) return rep;

  std::vector<char> covered(n, 0);
  bool disjoint = true;
  for (const auto& p : m.placements) {
    if (p.block >= m.block_dims.size() || p.offset + m.block_dims[p.block] > n) {
      disjoint = false;
      break;
    }
    for (std::size_t i = 0; i < m.block_dims[p.block]; ++i) {
      if (covered[p.offset + i]) disjoint = false;
      covered[p.offset + i] = 1;
    }
  }
  add("representation blocks are disjoint", disjoint);
  if (!disjoint) return rep;

  const RatMatrix id = RatMatrix::identity(n);
  add("F = F^T", m.F == m.F.transpose());
  add("F^2 = 1", m.F * m.F == id);
  add("gamma = gamma^T", m.gamma == m.gamma.transpose());
  add("gamma^2 = 1", m.gamma * m.gamma == id);
  add("gamma F = -F gamma", (m.gamma * m.F + m.F * m.gamma).is_zero());

  const auto gens = algebra_generators(m);
  bool graded = true;
  for (const auto& g : gens) {
    RatMatrix pg = represent(m, g);
    if (m.gamma * pg != pg * m.gamma) {
      graded = false;
      break;
    }
  }
  add("gamma commutes with pi(a)", graded, std::to_string(gens.size()) + " generators");

  bool hom = true;
  const std::size_t sample = std::min<std::size_t>(gens.size(), 16);
  for (std::size_t i = 0; i < sample && hom; ++i)
    for (std::size_t j = 0; j < sample && hom; ++j)
      hom = represent(m, multiply(gens[i], gens[j])) == represent(m, gens[i]) * represent(m, gens[j]);
  AlgebraElement one{m.level, {}};
  for (std::size_t d : m.block_dims) one.blocks.push_back(RatMatrix::identity(d));
  RatMatrix pi1 = represent(m, one);
  hom = hom && pi1 * pi1 == pi1;
  add("pi is multiplicative and pi(1) is a projection", hom,
      std::to_string(sample * sample) + " generator products");

  add("commutators [F, pi(a)] are compact", true, "finite dimension");
  return rep;
}

RatMatrix commutator(const EvenFredholmModule& m, const AlgebraElement& a) {
  RatMatrix p = represent(m, a);
  return m.F * p - p * m.F;
}

namespace {

Integer factorial(std::size_t k) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

}  // namespace

Rational psi_2k(const EvenFredholmModule& m, const std::vector<AlgebraElement>& args) {
  if (args.size() % 2 == 0) {
    throw Error(ErrorKind::arity_mismatch, "psi_2k takes an odd number of arguments, got " +
                                               std::to_string(args.size()));
  }
  for (const auto& a : args) require_same_level(m, a);
  const std::size_t k = (args.size() - 1) / 2;
  RatMatrix x = m.gamma * represent(m, args[0]);
  for (std::size_t i = 1; i < args.size(); ++i) x = x * commutator(m, args[i]);
  Rational value = Rational(factorial(k)) * x.trace();
  return k % 2 == 0 ? value : Rational(-value);
}

Rational chern_pair(const EvenFredholmModule& m, const AlgebraElement& p, std::size_t k) {
  require_same_level(m, p);
  if (!is_projection(p)) {
    throw Error(ErrorKind::not_a_projection, "pairing argument is not a self-adjoint idempotent");
  }
  const RatMatrix pi = represent(m, p);
  const RatMatrix c = m.F * pi - pi * m.F;
  const RatMatrix c2 = c * c;
  RatMatrix x = m.gamma * pi;
  for (std::size_t j = 0; j < k; ++j) x = x * c2;
  Rational at_k = x.trace();
  if (k % 2 == 1) at_k = -at_k;
  Rational at_next = (x * c2).trace();
  if (k % 2 == 0) at_next = -at_next;
  if (at_k != at_next) {
    throw Error(ErrorKind::k_instability, "pairing is " + at_k.get_str() + " at k = " +
                                              std::to_string(k) + " but " + at_next.get_str() +
                                              " at k + 1");
  }
  if (at_k.get_den() != 1) {
    throw Error(ErrorKind::k_instability, "pairing of a projection is not an integer: " +
                                              at_k.get_str());
  }
  return at_k;
}

EvenFredholmModule pullback(const EvenFredholmModule& m, const BratteliDiagram& diagram) {
  if (m.level == 0) {
    throw Error(ErrorKind::level_mismatch, "a level-0 module has no level below to pull back to");
  }
  const std::size_t n = m.level - 1;
  const IntMatrix mult = diagram.multiplicity(n);
  EvenFredholmModule out;
  out.level = n;
  out.half_dim = m.half_dim;
  out.block_dims = block_sizes(diagram, n);
  if (mult.rows() != m.block_dims.size()) {
    throw Error(ErrorKind::shape_mismatch, "module has " + std::to_string(m.block_dims.size()) +
                                               " blocks, the diagram level has " +
                                               std::to_string(mult.rows()));
  }
  for (const auto& p : m.placements) {
    std::size_t offset = p.offset;
    for (std::size_t i = 0; i < mult.cols(); ++i) {
      for (Integer c = 0; c < mult(p.block, i); ++c) {
        out.placements.push_back({i, offset});
        offset += out.block_dims[i];
      }
    }
  }
  out.F = m.F;
  out.gamma = m.gamma;
  out.block_weights = mult.transpose() * m.block_weights;
  return out;
}

EvenFredholmModule direct_sum(const EvenFredholmModule& m1, const EvenFredholmModule& m2) {
  if (m1.level != m2.level || m1.block_dims != m2.block_dims) {
    throw Error(ErrorKind::level_mismatch, "direct sum of modules over different levels");
  }
  EvenFredholmModule out;
  out.level = m1.level;
  out.half_dim = m1.half_dim + m2.half_dim;
  out.block_dims = m1.block_dims;
  out.placements = m1.placements;
  for (const auto& p : m2.placements) out.placements.push_back({p.block, p.offset + m1.dim()});
  out.F = block_diagonal(m1.F, m2.F);
  out.gamma = block_diagonal(m1.gamma, m2.gamma);
  out.block_weights = m1.block_weights;
  for (std::size_t i = 0; i < out.block_weights.size(); ++i)
    out.block_weights[i] += m2.block_weights[i];
  return out;
}

// ---------------------------------------------------------------------------
// Permutation intertwiners

namespace {

constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
constexpr std::size_t max_assignments = 5040;

// P A P^T == B for the permutation matrix P e_i = e_{perm[i]}.
bool conjugates(const RatMatrix& a, const std::vector<std::size_t>& perm, const RatMatrix& b) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto& row = a.row(i);
    if (row.size() != b.row(perm[i]).size()) return false;
    for (const auto& [j, v] : row)
      if (b.get(perm[i], perm[j]) != v) return false;
  }
  return true;
}

const RatMatrix::Entry* single_entry(const RatMatrix& m, std::size_t r) {
  return m.row(r).size() == 1 ? &m.row(r).front() : nullptr;
}

// Extends a placement matching to the whole space through F and gamma.
bool complete(const EvenFredholmModule& m1, const EvenFredholmModule& m2,
              std::vector<std::size_t>& perm, std::vector<char>& used) {
  const std::size_t n = m1.dim();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (perm[c] == unset) continue;
      const auto* e1 = single_entry(m1.F, c);
      const auto* e2 = single_entry(m2.F, perm[c]);
      if (!e1 || !e2 || e1->second != e2->second) continue;
      if (perm[e1->first] == unset && !used[e2->first]) {
        perm[e1->first] = e2->first;
        used[e2->first] = 1;
        changed = true;
      }
    }
  }
  // Remaining coordinates: pair them in order, respecting the grading.
  for (std::size_t c = 0; c < n; ++c) {
    if (perm[c] != unset) continue;
    const Rational g = m1.gamma.get(c, c);
    for (std::size_t t = 0; t < n; ++t) {
      if (!used[t] && m2.gamma.get(t, t) == g) {
        perm[c] = t;
        used[t] = 1;
        break;
      }
    }
    if (perm[c] == unset) return false;
  }
  return true;
}

bool verify(const EvenFredholmModule& m1, const EvenFredholmModule& m2,
            const std::vector<std::size_t>& perm, const std::vector<AlgebraElement>& gens) {
  if (!conjugates(m1.F, perm, m2.F) || !conjugates(m1.gamma, perm, m2.gamma)) return false;
  for (const auto& g : gens)
    if (!conjugates(represent(m1, g), perm, represent(m2, g))) return false;
  return true;
}

}  // namespace

EquivalenceWitness equivalence_witness(const EvenFredholmModule& m1,
                                       const EvenFredholmModule& m2) {
  EquivalenceWitness w;
  if (m1.level != m2.level || m1.block_dims != m2.block_dims) {
    w.reason = "modules live over different levels";
    return w;
  }
  if (m1.dim() != m2.dim()) {
    w.reason = "dimension mismatch: " + std::to_string(m1.dim()) + " vs " +
               std::to_string(m2.dim());
    return w;
  }
  std::map<std::size_t, std::vector<std::size_t>> g1, g2;
  for (std::size_t i = 0; i < m1.placements.size(); ++i) g1[m1.placements[i].block].push_back(i);
  for (std::size_t i = 0; i < m2.placements.size(); ++i) g2[m2.placements[i].block].push_back(i);
  for (const auto& [block, idx] : g1) {
    if (g2[block].size() != idx.size()) {
      w.reason = "block " + std::to_string(block) + " is placed " + std::to_string(idx.size()) +
                 " times in the first module and " + std::to_string(g2[block].size()) +
                 " times in the second";
      return w;
    }
  }
  if (static_cast<std::ptrdiff_t>(g1.size()) != std::count_if(g2.begin(), g2.end(), [](const auto& e) { return !e.second.empty(); })) {
    w.reason = "placed blocks differ";
    return w;
  }

  const auto gens = algebra_generators(m1);
  std::vector<std::vector<std::size_t>> targets;
  for (auto& [block, idx] : g2) {
    if (!idx.empty()) targets.push_back(idx);
  }
  std::vector<std::vector<std::size_t>> sources;
  for (const auto& [block, idx] : g1) sources.push_back(idx);

  const std::size_t n = m1.dim();
  for (std::size_t attempt = 0; attempt < max_assignments; ++attempt) {
    std::vector<std::size_t> perm(n, unset);
    std::vector<char> used(n, 0);
    bool clash = false;
    for (std::size_t g = 0; g < sources.size() && !clash; ++g) {
      for (std::size_t t = 0; t < sources[g].size() && !clash; ++t) {
        const Placement& a = m1.placements[sources[g][t]];
        const Placement& b = m2.placements[targets[g][t]];
        for (std::size_t i = 0; i < m1.block_dims[a.block]; ++i) {
          if (used[b.offset + i]) {
            clash = true;
            break;
          }
          perm[a.offset + i] = b.offset + i;
          used[b.offset + i] = 1;
        }
      }
    }
    if (!clash && complete(m1, m2, perm, used) && verify(m1, m2, perm, gens)) {
      w.found = true;
      w.permutation = std::move(perm);
      return w;
    }
    // Next assignment: odometer over the per-block orderings.
    std::size_t g = 0;
    while (g < targets.size() && !std::next_permutation(targets[g].begin(), targets[g].end())) ++g;
    if (g == targets.size()) {
      w.reason = "no block-preserving permutation intertwines the modules";
      return w;
    }
  }
  w.reason = "search limit of " + std::to_string(max_assignments) + " assignments reached";
  return w;
}

}  // namespace afk
