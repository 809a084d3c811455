#pragma once

// Exact integer linear algebra: dense arbitrary-precision matrices, Smith and
// Hermite normal forms, and lattices (subgroups of Z^k) in canonical form.

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace afk {

using Integer = mpz_class;
using IntVector = std::vector<Integer>;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols);
  static IntMatrix from_columns(const std::vector<IntVector>& cols, std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  IntVector row(std::size_t r) const;
  IntVector column(std::size_t c) const;
  IntMatrix transpose() const;
  bool is_zero() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += factor * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  /// col[dst] += factor * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVector operator*(const IntMatrix& a, std::span<const Integer> v);
IntMatrix operator+(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
std::ostream& operator<<(std::ostream& os, const IntMatrix& m);
std::string to_string(const IntMatrix& m);
std::string to_string(std::span<const Integer> v);

bool is_zero(std::span<const Integer> v);
/// gcd of the entries; zero for the zero vector.
Integer content(std::span<const Integer> v);

struct SNFDecomposition {
  IntMatrix U;  // rows x rows, unimodular
  IntMatrix D;  // rows x cols, diagonal
  IntMatrix V;  // cols x cols, unimodular

  /// Diagonal entries d_1 | d_2 | ... (including trailing zeros), length min(rows, cols).
  IntVector diagonal() const;
  /// Number of nonzero diagonal entries.
  std::size_t rank() const;
};

/// A = U * D * V with U, V unimodular and a non-negative divisibility chain on D.
SNFDecomposition smith_normal_form(const IntMatrix& a);

/// Elementary divisors only (no transforms); same diagonal as smith_normal_form.
IntVector elementary_divisors(const IntMatrix& a);

struct HNFResult {
  IntMatrix H;  // rows x rank, column Hermite normal form of the column span
  IntMatrix U;  // cols x cols unimodular with A * U = [H | 0]
  std::vector<std::size_t> pivots;  // pivot row of each column of H
};

/// Column-style Hermite normal form. Pivot of column j is its first nonzero
/// row; pivot rows strictly increase, pivots are positive and every entry to
/// the left of a pivot in its row lies in [0, pivot).
HNFResult hermite_normal_form(const IntMatrix& a);

/// A subgroup of Z^k, stored by its canonical HNF basis (columns).
class Lattice {
 public:
  Lattice() = default;
  /// Column span of generators (k x m), normalized.
  explicit Lattice(const IntMatrix& generators);

  static Lattice full(std::size_t ambient);
  static Lattice zero(std::size_t ambient);

  std::size_t ambient_rank() const noexcept { return ambient_; }
  std::size_t rank() const noexcept { return basis_.cols(); }
  const IntMatrix& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  bool contains(std::span<const Integer> v) const;
  /// Every basis vector of `other` lies in this lattice.
  bool contains(const Lattice& other) const;
  /// Coordinates of v in the HNF basis; false if v is not a member.
  bool solve(std::span<const Integer> v, IntVector& coords) const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::size_t ambient_ = 0;
  IntMatrix basis_;
  std::vector<std::size_t> pivots_;
};

std::string to_string(const Lattice& l);

Lattice image_lattice(const IntMatrix& a);
bool lattice_equal(const Lattice& a, const Lattice& b);
bool lattice_member(std::span<const Integer> v, const Lattice& l);
/// Integer kernel {x : A x = 0} as a lattice in Z^{cols}.
Lattice kernel_basis(const IntMatrix& a);
std::size_t rank(const IntMatrix& a);
/// Square matrices only; Bareiss fraction-free elimination.
Integer determinant(const IntMatrix& a);
bool is_unimodular(const IntMatrix& a);
/// Full column rank (the map Z^cols -> Z^rows is injective).
bool is_injective(const IntMatrix& a);

/// Integer polynomial, coefficients from the constant term upward.
using IntPolynomial = std::vector<Integer>;

/// det(x I - A), monic of degree n.
IntPolynomial characteristic_polynomial(const IntMatrix& a);
std::size_t degree(const IntPolynomial& p);
Integer evaluate(const IntPolynomial& p, const Integer& x);
IntPolynomial multiply(const IntPolynomial& a, const IntPolynomial& b);
/// Exact division by a monic divisor; returns false if the remainder is nonzero.
bool divide_monic(const IntPolynomial& num, const IntPolynomial& den, IntPolynomial& quotient);
std::string polynomial_to_string(const IntPolynomial& p);

}  // namespace afk
