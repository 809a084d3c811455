#include "afk/exactlin.hpp"

#include "afk/error.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>
#include <utility>

namespace afk {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::ambient_rank_mismatch: return "ambient-rank-mismatch";
    case ErrorKind::syntax: return "syntax-error";
    case ErrorKind::validation: return "validation-failure";
    case ErrorKind::depth_overflow: return "depth-overflow";
    case ErrorKind::horizon_overflow: return "horizon-overflow";
    case ErrorKind::wrong_direction: return "wrong-direction";
    case ErrorKind::mixed_towers: return "mixed-towers";
    case ErrorKind::index_out_of_range: return "index-out-of-range";
    case ErrorKind::level_mismatch: return "level-mismatch";
    case ErrorKind::arity_mismatch: return "arity-mismatch";
    case ErrorKind::not_a_projection: return "not-a-projection";
    case ErrorKind::k_instability: return "k-instability";
    case ErrorKind::obstruction_finite: return "obstruction-finite";
    case ErrorKind::unrealizable_class: return "unrealizable-class";
    case ErrorKind::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorKind::shape_mismatch, "ragged matrix literal");
    }
    for (long x : r) data_.emplace_back(x);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorKind::shape_mismatch, "row " + std::to_string(r) + " has length " +
                                                 std::to_string(rows[r].size()) +
                                                 ", expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& cols, std::size_t rows) {
  IntMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) {
      throw Error(ErrorKind::shape_mismatch, "column length mismatch");
    }
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
  }
  return m;
}

IntVector IntMatrix::row(std::size_t r) const {
  return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

IntVector IntMatrix::column(std::size_t c) const {
  IntVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return sgn(x) == 0; });
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (sgn(factor) == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) {
    const Integer& s = (*this)(src, c);
    if (sgn(s) != 0) (*this)(dst, c) += factor * s;
  }
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor) {
  if (sgn(factor) == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) {
    const Integer& s = (*this)(r, src);
    if (sgn(s) != 0) (*this)(r, dst) += factor * s;
  }
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
}

void IntMatrix::negate_col(std::size_t c) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::shape_mismatch, "matrix product of " + std::to_string(a.rows()) +
                                               "x" + std::to_string(a.cols()) + " and " +
                                               std::to_string(b.rows()) + "x" +
                                               std::to_string(b.cols()));
  }
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const Integer& x = a(i, l);
      if (sgn(x) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const Integer& y = b(l, j);
        if (sgn(y) != 0) c(i, j) += x * y;
      }
    }
  }
  return c;
}

IntVector operator*(const IntMatrix& a, std::span<const Integer> v) {
  if (a.cols() != v.size()) {
    throw Error(ErrorKind::shape_mismatch, "matrix-vector product of " +
                                               std::to_string(a.rows()) + "x" +
                                               std::to_string(a.cols()) + " with length " +
                                               std::to_string(v.size()));
  }
  IntVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (sgn(v[j]) != 0) out[i] += a(i, j) * v[j];
  return out;
}

IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::shape_mismatch, "matrix sum shape mismatch");
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::shape_mismatch, "matrix difference shape mismatch");
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

std::string to_string(std::span<const Integer> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].get_str();
  }
  return s + "]";
}

std::string to_string(const IntMatrix& m) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) s += ",";
    s += to_string(m.row(r));
  }
  return s + "]";
}

std::ostream& operator<<(std::ostream& os, const IntMatrix& m) { return os << to_string(m); }

bool is_zero(std::span<const Integer> v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return sgn(x) == 0; });
}

Integer content(std::span<const Integer> v) {
  Integer g = 0;
  for (const auto& x : v) g = gcd(g, x);
  return g;
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

// Floor division, so remainders are non-negative for positive divisors.
Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

struct SnfWork {
  IntMatrix a;
  IntMatrix u;
  IntMatrix v;
  bool track;

  void swap_rows(std::size_t i, std::size_t j) {
    a.swap_rows(i, j);
    if (track) u.swap_cols(i, j);
  }
  void swap_cols(std::size_t i, std::size_t j) {
    a.swap_cols(i, j);
    if (track) v.swap_rows(i, j);
  }
  // row dst += f * row src, keeping A_orig = U A V.
  void add_row(std::size_t dst, std::size_t src, const Integer& f) {
    a.add_row_multiple(dst, src, f);
    if (track) u.add_col_multiple(src, dst, -f);
  }
  void add_col(std::size_t dst, std::size_t src, const Integer& f) {
    a.add_col_multiple(dst, src, f);
    if (track) v.add_row_multiple(src, dst, -f);
  }
  void negate_row(std::size_t i) {
    a.negate_row(i);
    if (track) u.negate_col(i);
  }
};

void run_snf(SnfWork& w) {
  const std::size_t m = w.a.rows();
  const std::size_t n = w.a.cols();
  const std::size_t diag = std::min(m, n);
  for (std::size_t t = 0; t < diag; ++t) {
    for (;;) {
      // Pivot: nonzero entry of least absolute value in the trailing block.
      bool found = false;
      std::size_t pr = t, pc = t;
      Integer best;
      for (std::size_t i = t; i < m; ++i) {
        for (std::size_t j = t; j < n; ++j) {
          const Integer& x = w.a(i, j);
          if (sgn(x) == 0) continue;
          if (!found || mpz_cmpabs(x.get_mpz_t(), best.get_mpz_t()) < 0) {
            found = true;
            best = abs(x);
            pr = i;
            pc = j;
          }
        }
      }
      if (!found) return;
      w.swap_rows(t, pr);
      w.swap_cols(t, pc);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (sgn(w.a(i, t)) == 0) continue;
        Integer q = floor_div(w.a(i, t), w.a(t, t));
        w.add_row(i, t, -q);
        if (sgn(w.a(i, t)) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (sgn(w.a(t, j)) == 0) continue;
        Integer q = floor_div(w.a(t, j), w.a(t, t));
        w.add_col(j, t, -q);
        if (sgn(w.a(t, j)) != 0) clean = false;
      }
      if (!clean) continue;

      bool divisible = true;
      for (std::size_t i = t + 1; i < m && divisible; ++i) {
        for (std::size_t j = t + 1; j < n; ++j) {
          if (!mpz_divisible_p(w.a(i, j).get_mpz_t(), w.a(t, t).get_mpz_t())) {
            w.add_row(t, i, 1);
            divisible = false;
            break;
          }
        }
      }
      if (divisible) break;
    }
    if (sgn(w.a(t, t)) < 0) w.negate_row(t);
  }
}

}  // namespace

IntVector SNFDecomposition::diagonal() const {
  IntVector d(std::min(D.rows(), D.cols()));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = D(i, i);
  return d;
}

std::size_t SNFDecomposition::rank() const {
  std::size_t r = 0;
  for (const auto& x : diagonal())
    if (sgn(x) != 0) ++r;
  return r;
}

SNFDecomposition smith_normal_form(const IntMatrix& a) {
  SnfWork w{a, IntMatrix::identity(a.rows()), IntMatrix::identity(a.cols()), true};
  run_snf(w);
  return {std::move(w.u), std::move(w.a), std::move(w.v)};
}

IntVector elementary_divisors(const IntMatrix& a) {
  SnfWork w{a, {}, {}, false};
  run_snf(w);
  IntVector d(std::min(a.rows(), a.cols()));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = w.a(i, i);
  return d;
}

// ---------------------------------------------------------------------------
// Hermite normal form and lattices

HNFResult hermite_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  IntMatrix h = a;
  IntMatrix u = IntMatrix::identity(n);
  std::vector<std::size_t> pivots;
  std::size_t r = 0;

  auto combine = [&](std::size_t i, std::size_t j) {
    // Replace (col r, col j) by a unimodular combination that zeroes h(i, j).
    Integer g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h(i, r).get_mpz_t(),
               h(i, j).get_mpz_t());
    Integer ar = h(i, r) / g;
    Integer bj = h(i, j) / g;
    for (IntMatrix* mat : {&h, &u}) {
      for (std::size_t row = 0; row < mat->rows(); ++row) {
        Integer x = (*mat)(row, r);
        Integer y = (*mat)(row, j);
        (*mat)(row, r) = s * x + t * y;
        (*mat)(row, j) = ar * y - bj * x;
      }
    }
  };

  for (std::size_t i = 0; i < m && r < n; ++i) {
    for (std::size_t j = r + 1; j < n; ++j) {
      if (sgn(h(i, j)) != 0) combine(i, j);
    }
    if (sgn(h(i, r)) == 0) continue;
    if (sgn(h(i, r)) < 0) {
      h.negate_col(r);
      u.negate_col(r);
    }
    for (std::size_t c = 0; c < r; ++c) {
      Integer q = floor_div(h(i, c), h(i, r));
      if (sgn(q) != 0) {
        h.add_col_multiple(c, r, -q);
        u.add_col_multiple(c, r, -q);
      }
    }
    pivots.push_back(i);
    ++r;
  }

  IntMatrix basis(m, r);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < r; ++c) basis(i, c) = h(i, c);
  return {std::move(basis), std::move(u), std::move(pivots)};
}

Lattice::Lattice(const IntMatrix& generators) : ambient_(generators.rows()) {
  auto hnf = hermite_normal_form(generators);
  basis_ = std::move(hnf.H);
  pivots_ = std::move(hnf.pivots);
}

Lattice Lattice::full(std::size_t ambient) { return Lattice(IntMatrix::identity(ambient)); }

Lattice Lattice::zero(std::size_t ambient) { return Lattice(IntMatrix(ambient, 0)); }

bool Lattice::solve(std::span<const Integer> v, IntVector& coords) const {
  if (v.size() != ambient_) {
    throw Error(ErrorKind::ambient_rank_mismatch,
                "vector of length " + std::to_string(v.size()) + " against lattice in Z^" +
                    std::to_string(ambient_));
  }
  IntVector residual(v.begin(), v.end());
  coords.assign(rank(), Integer(0));
  std::size_t next_row = 0;
  for (std::size_t j = 0; j < rank(); ++j) {
    const std::size_t p = pivots_[j];
    for (; next_row < p; ++next_row)
      if (sgn(residual[next_row]) != 0) return false;
    if (!mpz_divisible_p(residual[p].get_mpz_t(), basis_(p, j).get_mpz_t())) return false;
    Integer c = residual[p] / basis_(p, j);
    coords[j] = c;
    for (std::size_t i = p; i < ambient_; ++i) residual[i] -= c * basis_(i, j);
    next_row = p + 1;
  }
  for (; next_row < ambient_; ++next_row)
    if (sgn(residual[next_row]) != 0) return false;
  return true;
}

bool Lattice::contains(std::span<const Integer> v) const {
  IntVector coords;
  return solve(v, coords);
}

bool Lattice::contains(const Lattice& other) const {
  if (other.ambient_ != ambient_) {
    throw Error(ErrorKind::ambient_rank_mismatch, "sublattice test across ambient ranks");
  }
  for (std::size_t c = 0; c < other.rank(); ++c)
    if (!contains(other.basis_.column(c))) return false;
  return true;
}

std::string to_string(const Lattice& l) {
  if (l.rank() == 0) return "0";
  if (l.ambient_rank() == 1) {
    const Integer& g = l.basis()(0, 0);
    return g == 1 ? "Z" : g.get_str() + "Z";
  }
  if (l.basis() == IntMatrix::identity(l.ambient_rank())) {
    return "Z^" + std::to_string(l.ambient_rank());
  }
  std::string s = "span{";
  for (std::size_t c = 0; c < l.rank(); ++c) {
    if (c) s += ",";
    auto col = l.basis().column(c);
    s += "(";
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (i) s += ",";
      s += col[i].get_str();
    }
    s += ")";
  }
  return s + "}";
}

Lattice image_lattice(const IntMatrix& a) { return Lattice(a); }

bool lattice_equal(const Lattice& a, const Lattice& b) {
  if (a.ambient_rank() != b.ambient_rank()) {
    throw Error(ErrorKind::ambient_rank_mismatch, "lattice equality across ambient ranks");
  }
  return a == b;
}

bool lattice_member(std::span<const Integer> v, const Lattice& l) { return l.contains(v); }

Lattice kernel_basis(const IntMatrix& a) {
  auto hnf = hermite_normal_form(a);
  const std::size_t r = hnf.H.cols();
  IntMatrix k(a.cols(), a.cols() - r);
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t c = r; c < a.cols(); ++c) k(i, c - r) = hnf.U(i, c);
  return Lattice(k);
}

std::size_t rank(const IntMatrix& a) { return hermite_normal_form(a).H.cols(); }

Integer determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::shape_mismatch, "determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(m(k, k)) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && sgn(m(swap, k)) == 0) ++swap;
      if (swap == n) return 0;
      m.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

bool is_unimodular(const IntMatrix& a) {
  return a.rows() == a.cols() && abs(determinant(a)) == 1;
}

bool is_injective(const IntMatrix& a) { return rank(a) == a.cols(); }

// ---------------------------------------------------------------------------
// Polynomials

IntPolynomial characteristic_polynomial(const IntMatrix& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::shape_mismatch, "characteristic polynomial of non-square matrix");
  // Faddeev-LeVerrier; every division below is exact over Z.
  const std::size_t n = a.rows();
  IntPolynomial c(n + 1);
  c[n] = 1;
  IntMatrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    IntMatrix next = a * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    m = std::move(next);
    IntMatrix am = a * m;
    Integer tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    assert(mpz_divisible_ui_p(tr.get_mpz_t(), k));
    c[n - k] = -tr / static_cast<unsigned long>(k);
  }
  return c;
}

std::size_t degree(const IntPolynomial& p) {
  std::size_t d = p.size();
  while (d > 0 && sgn(p[d - 1]) == 0) --d;
  return d == 0 ? 0 : d - 1;
}

Integer evaluate(const IntPolynomial& p, const Integer& x) {
  Integer acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

IntPolynomial multiply(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.empty() || b.empty()) return {};
  IntPolynomial c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  c.resize(degree(c) + 1);
  return c;
}

bool divide_monic(const IntPolynomial& num, const IntPolynomial& den, IntPolynomial& quotient) {
  const std::size_t dn = degree(num);
  const std::size_t dd = degree(den);
  if (den.empty() || den[dd] != 1) throw Error(ErrorKind::invalid_argument, "divisor is not monic");
  if (dd > dn) {
    quotient = {0};
    return std::all_of(num.begin(), num.end(), [](const Integer& x) { return sgn(x) == 0; });
  }
  IntPolynomial rem(num.begin(), num.begin() + static_cast<std::ptrdiff_t>(dn + 1));
  quotient.assign(dn - dd + 1, Integer(0));
  for (std::size_t k = dn - dd + 1; k-- > 0;) {
    Integer q = rem[k + dd];
    quotient[k] = q;
    if (sgn(q) == 0) continue;
    for (std::size_t i = 0; i <= dd; ++i) rem[k + i] -= q * den[i];
  }
  return std::all_of(rem.begin(), rem.end(), [](const Integer& x) { return sgn(x) == 0; });
}

std::string polynomial_to_string(const IntPolynomial& p) {
  std::string s;
  for (std::size_t i = p.size(); i-- > 0;) {
    if (sgn(p[i]) == 0) continue;
    Integer c = p[i];
    if (!s.empty()) {
      s += sgn(c) < 0 ? " - " : " + ";
      c = abs(c);
    } else if (sgn(c) < 0) {
      s += "-";
      c = abs(c);
    }
    if (i == 0 || c != 1) s += c.get_str();
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

}  // namespace afk
