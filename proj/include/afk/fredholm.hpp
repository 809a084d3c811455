#pragma once

// Even Fredholm modules over the finite-dimensional levels of a Bratteli
// diagram, the cyclic cocycles psi_2k and the Chern pairing with projections.
//
// Everything is finite dimensional and rational. Matrices are sparse because
// the operators involved (F, gamma, matrix units, projections) are permutation
// or diagonal 0/±1 matrices whose products stay sparse.

#include "afk/bratteli.hpp"
#include "afk/exactlin.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace afk {

using Rational = mpq_class;

/// Sparse rational matrix, rows stored as (column, value) pairs sorted by column.
class RatMatrix {
 public:
  using Entry = std::pair<std::size_t, Rational>;

  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

  static RatMatrix identity(std::size_t n);
  static RatMatrix from_dense(const std::vector<std::vector<Rational>>& rows);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  Rational get(std::size_t r, std::size_t c) const;
  /// Overwrites (or erases, for zero) one entry.
  void set(std::size_t r, std::size_t c, const Rational& v);
  const std::vector<Entry>& row(std::size_t r) const { return rows_[r]; }
  std::size_t nonzeros() const;

  RatMatrix transpose() const;
  Rational trace() const;
  bool is_zero() const;
  /// Copy of this matrix placed at (r, c) inside a larger zero matrix.
  RatMatrix embedded(std::size_t rows, std::size_t cols, std::size_t r, std::size_t c) const;

  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator*(const Rational& s, const RatMatrix& a);
  friend bool operator==(const RatMatrix&, const RatMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

std::string to_string(const RatMatrix& m);
/// Direct sum diag(a, b).
RatMatrix block_diagonal(const RatMatrix& a, const RatMatrix& b);

/// Element of A_n = ⊕_i M_{d_{n,i}}: one square block per vertex at level n.
struct AlgebraElement {
  std::size_t level = 0;
  std::vector<RatMatrix> blocks;

  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;
};

/// Block sizes d_{n,i} as machine integers.
std::vector<std::size_t> block_sizes(const BratteliDiagram& diagram, std::size_t level);

AlgebraElement zero_element(const BratteliDiagram& diagram, std::size_t level);
AlgebraElement unit_element(const BratteliDiagram& diagram, std::size_t level);
/// e_{rc} in block `block`.
AlgebraElement matrix_unit(const BratteliDiagram& diagram, std::size_t level, std::size_t block,
                           std::size_t r, std::size_t c);
/// e_{00} of block `block`, the rank-one projection p_n for the CAR.
AlgebraElement minimal_projection(const BratteliDiagram& diagram, std::size_t level,
                                  std::size_t block);
/// Diagonal projection with x_i leading ones in block i.
AlgebraElement realize_class(const BratteliDiagram& diagram, std::size_t level,
                             const IntVector& x);
/// Image under the unital embedding A_n -> A_{n+1}: block j of the result is
/// the block-diagonal sum over i (ascending) of M_n[j][i] copies of block i.
AlgebraElement embed(const BratteliDiagram& diagram, const AlgebraElement& a);
AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b);
bool is_projection(const AlgebraElement& a);

/// M_n v: the K_0 class of the image of a projection with class v.
IntVector k0_pushforward(const BratteliDiagram& diagram, std::size_t level, const IntVector& v);

/// One copy of block `block` of A_level acting on coordinates
/// [offset, offset + d) of the graded space.
struct Placement {
  std::size_t block = 0;
  std::size_t offset = 0;
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// (H = C^d ⊕ C^d, π, F, γ) with π(a) the sum of the placed copies of a's blocks.
struct EvenFredholmModule {
  std::size_t level = 0;
  std::size_t half_dim = 0;
  std::vector<std::size_t> block_dims;
  std::vector<Placement> placements;
  RatMatrix F;
  RatMatrix gamma;
  /// Multiplicity of each canonical block generator in this module.
  IntVector block_weights;

  std::size_t dim() const noexcept { return 2 * half_dim; }
};

/// z_0 for block i at level n: H = C^d ⊕ C^d, π(a) = a_i ⊕ 0,
/// F = [[0,1],[1,0]], γ = [[1,0],[0,-1]].
EvenFredholmModule canonical_module(const BratteliDiagram& diagram, std::size_t level,
                                    std::size_t block);

/// π(a) on the graded space.
RatMatrix represent(const EvenFredholmModule& m, const AlgebraElement& a);

struct AxiomCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AxiomsReport {
  std::vector<AxiomCheck> checks;
  bool ok() const;
};

AxiomsReport axioms_check(const EvenFredholmModule& m);

/// F π(a) - π(a) F.
RatMatrix commutator(const EvenFredholmModule& m, const AlgebraElement& a);

/// (-1)^{k(2k-1)} k! Tr(γ π(a_0) [F, π(a_1)] ... [F, π(a_2k)]) for 2k+1 arguments.
Rational psi_2k(const EvenFredholmModule& m, const std::vector<AlgebraElement>& args);

/// (k!)^{-1} ψ_2k(p, ..., p) = (-1)^k Tr(γ π(p) [F, π(p)]^{2k}). Checks that
/// k and k+1 give the same integer.
Rational chern_pair(const EvenFredholmModule& m, const AlgebraElement& p, std::size_t k);

/// Pullback along A_{n-1} -> A_n: each placed copy of a level-n block j is
/// replaced by the level-(n-1) blocks it contains. F and γ are unchanged and
/// the block weights become M^T w.
EvenFredholmModule pullback(const EvenFredholmModule& m, const BratteliDiagram& diagram);

/// m1 ⊕ m2 on H1 ⊕ H2.
EvenFredholmModule direct_sum(const EvenFredholmModule& m1, const EvenFredholmModule& m2);

struct EquivalenceWitness {
  bool found = false;
  /// Coordinate i of the first module is sent to coordinate permutation[i].
  std::vector<std::size_t> permutation;
  std::string reason;
};

/// Searches for a permutation P with P F1 P^T = F2, P γ1 P^T = γ2 and
/// P π1(a) P^T = π2(a) on generators of the algebra. Only permutations that
/// send placed block copies to placed copies of the same block are tried.
EquivalenceWitness equivalence_witness(const EvenFredholmModule& m1,
                                       const EvenFredholmModule& m2);

/// Matrix units e_{r,r+1}, e_{r+1,r} and e_00 of every block; they generate A_n.
std::vector<AlgebraElement> algebra_generators(const EvenFredholmModule& m);

}  // namespace afk
