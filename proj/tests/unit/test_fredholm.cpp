#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afk/error.hpp"
#include "afk/fredholm.hpp"

#include <random>

using namespace afk;

namespace {

using Dense = std::vector<std::vector<Rational>>;

Dense dense_zero(std::size_t n) { return Dense(n, std::vector<Rational>(n, Rational(0))); }

Dense dense_mul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c = dense_zero(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (sgn(a[i][k]) == 0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

Dense dense_sub(const Dense& a, const Dense& b) {
  Dense c = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) c[i][j] -= b[i][j];
  return c;
}

Dense dense_of(const RatMatrix& m) {
  Dense d = dense_zero(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m.get(i, j);
  return d;
}

// π(a) built directly from the placements, entry by entry.
Dense dense_pi(const EvenFredholmModule& m, const AlgebraElement& a) {
  Dense d = dense_zero(m.dim());
  for (const auto& p : m.placements) {
    const RatMatrix& b = a.blocks[p.block];
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) d[p.offset + i][p.offset + j] = b.get(i, j);
  }
  return d;
}

// (k!)^{-1} ψ_2k(p, ..., p) from the defining product with 2k commutators,
// sign (-1)^{k(2k-1)} and factor k! written out.
Rational pairing_oracle(const EvenFredholmModule& m, const AlgebraElement& p, std::size_t k) {
  Dense F = dense_of(m.F);
  Dense g = dense_of(m.gamma);
  Dense pi = dense_pi(m, p);
  Dense c = dense_sub(dense_mul(F, pi), dense_mul(pi, F));
  Dense x = dense_mul(g, pi);
  for (std::size_t i = 0; i < 2 * k; ++i) x = dense_mul(x, c);
  Rational tr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) tr += x[i][i];
  Integer fact = 1;
  for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<unsigned long>(i);
  const bool negative = (k * (2 * k - 1)) % 2 == 1 && k > 0;
  Rational psi = Rational(fact) * tr;
  if (negative) psi = -psi;
  return psi / Rational(fact);
}

BratteliDiagram random_diagram(std::mt19937& rng, std::size_t depth) {
  std::uniform_int_distribution<std::size_t> blocks(1, 3);
  std::uniform_int_distribution<int> entry(0, 3);
  ExplicitKind k;
  IntVector d0(blocks(rng));
  for (auto& x : d0) x = 1 + entry(rng) % 2;
  k.dims.push_back(d0);
  for (std::size_t n = 0; n < depth; ++n) {
    const std::size_t rows = blocks(rng);
    IntMatrix m(rows, k.dims.back().size());
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = entry(rng);
      bool zero = true;
      for (std::size_t j = 0; j < m.cols(); ++j) zero = zero && sgn(m(i, j)) == 0;
      if (zero) m(i, rng() % m.cols()) = 1;
    }
    k.dims.push_back(m * k.dims.back());
    k.maps.push_back(m);
  }
  return BratteliDiagram("random", k);
}

RatMatrix dense_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  Dense d;
  for (const auto& r : rows) {
    d.emplace_back();
    for (long v : r) d.back().emplace_back(v);
  }
  return RatMatrix::from_dense(d);
}

}  // namespace

TEST_CASE("sparse rational matrices") {
  RatMatrix a = dense_matrix({{1, 2}, {0, -1}});
  RatMatrix b = dense_matrix({{0, 1}, {1, 0}});
  CHECK(a * b == dense_matrix({{2, 1}, {-1, 0}}));
  CHECK(a + b == dense_matrix({{1, 3}, {1, -1}}));
  CHECK((a - a).is_zero());
  CHECK((a - a).nonzeros() == 0);
  CHECK(a.trace() == 0);
  CHECK(to_string(Rational(1, 2) * a) == "[[1/2,1],[0,-1/2]]");
  CHECK(block_diagonal(a, b).rows() == 4);
  CHECK(block_diagonal(a, b).get(3, 2) == 1);
}

TEST_CASE("canonical module of the CAR") {
  BratteliDiagram car8 = car(8);
  EvenFredholmModule z = canonical_module(car8, 1, 0);
  CHECK(z.half_dim == 2);
  CHECK(to_string(z.F) == "[[0,0,1,0],[0,0,0,1],[1,0,0,0],[0,1,0,0]]");
  CHECK(to_string(z.gamma) == "[[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]]");
  CHECK(axioms_check(z).ok());

  EvenFredholmModule s = canonical_module(car8, 0, 0);
  CHECK(s.half_dim == 1);
  CHECK(to_string(s.F) == "[[0,1],[1,0]]");

  CHECK_THROWS_AS(canonical_module(car8, 1, 1), Error);
}

TEST_CASE("two-block level: the representation kills the other block") {
  ExplicitKind k;
  k.dims = {{1}, {1, 2}};
  k.maps = {IntMatrix{{1}, {2}}};
  BratteliDiagram d("two", k);
  EvenFredholmModule z = canonical_module(d, 1, 1);
  AlgebraElement a = unit_element(d, 1);
  a.blocks[0].set(0, 0, 5);
  RatMatrix pi = represent(z, a);
  CHECK(to_string(pi) == "[[1,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]]");
}

TEST_CASE("axioms report failures") {
  BratteliDiagram d = car(4);
  EvenFredholmModule z = canonical_module(d, 3, 0);
  CHECK(axioms_check(z).ok());

  EvenFredholmModule bad = z;
  bad.F = RatMatrix::identity(z.dim());
  auto rep = axioms_check(bad);
  CHECK_FALSE(rep.ok());
  bool anticommute_failed = false;
  for (const auto& c : rep.checks)
    if (c.name == "gamma F = -F gamma") anticommute_failed = !c.passed;
  CHECK(anticommute_failed);

  EvenFredholmModule skew = z;
  skew.F.set(0, z.half_dim, 2);
  skew.F.set(z.half_dim, 0, 2);
  bool square_failed = false;
  for (const auto& c : axioms_check(skew).checks)
    if (c.name == "F^2 = 1") square_failed = !c.passed;
  CHECK(square_failed);
}

TEST_CASE("commutators") {
  BratteliDiagram d = car(4);
  EvenFredholmModule z = canonical_module(d, 1, 0);
  CHECK(to_string(commutator(z, minimal_projection(d, 1, 0))) ==
        "[[0,0,-1,0],[0,0,0,0],[1,0,0,0],[0,0,0,0]]");
  CHECK(commutator(z, zero_element(d, 1)).is_zero());
  CHECK(to_string(commutator(z, unit_element(d, 1))) ==
        "[[0,0,-1,0],[0,0,0,-1],[1,0,0,0],[0,1,0,0]]");
  CHECK_THROWS_AS(commutator(z, unit_element(d, 2)), Error);
}

TEST_CASE("psi_2k values") {
  BratteliDiagram d = car(6);
  for (std::size_t n = 0; n <= 4; ++n) {
    EvenFredholmModule z = canonical_module(d, n, 0);
    AlgebraElement p = minimal_projection(d, n, 0);
    AlgebraElement one = unit_element(d, n);
    CHECK(psi_2k(z, {p}) == 1);
    CHECK(psi_2k(z, {p, p, p}) == 1);
    CHECK(psi_2k(z, {one, one, one}) == Rational(Integer(1) << static_cast<unsigned>(n)));
    CHECK(psi_2k(z, {p, p, p, p, p}) == 2);  // k! times the pairing
  }
  EvenFredholmModule z = canonical_module(d, 2, 0);
  AlgebraElement p = minimal_projection(d, 2, 0);
  try {
    psi_2k(z, {p, p});
    FAIL("expected arity_mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::arity_mismatch);
  }
  try {
    psi_2k(z, {minimal_projection(d, 3, 0)});
    FAIL("expected level_mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::level_mismatch);
  }
}

TEST_CASE("property: psi_2k is cyclic") {
  std::mt19937 rng(12);
  BratteliDiagram d = car(4);
  EvenFredholmModule z = canonical_module(d, 2, 0);
  std::uniform_int_distribution<std::size_t> idx(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AlgebraElement> args;
    for (int i = 0; i < 3; ++i) {
      AlgebraElement a = zero_element(d, 2);
      for (int t = 0; t < 3; ++t) a.blocks[0].set(idx(rng), idx(rng), static_cast<long>(rng() % 5) - 2);
      args.push_back(a);
    }
    std::vector<AlgebraElement> rotated{args[1], args[2], args[0]};
    REQUIRE(psi_2k(z, args) == psi_2k(z, rotated));
  }
}

TEST_CASE("chern pairing of the canonical generator with p_n is 1") {
  BratteliDiagram d = car(8);
  for (std::size_t n = 0; n <= 6; ++n) {
    EvenFredholmModule z = canonical_module(d, n, 0);
    AlgebraElement p = minimal_projection(d, n, 0);
    for (std::size_t k = 0; k <= 5; ++k) CHECK(chern_pair(z, p, k) == 1);
    CHECK(chern_pair(z, zero_element(d, n), 3) == 0);
    CHECK(chern_pair(z, unit_element(d, n), 2) == Rational(Integer(1) << static_cast<unsigned>(n)));
    if (n <= 3)
      for (std::size_t k = 0; k <= 3; ++k) CHECK(pairing_oracle(z, p, k) == 1);
  }
  EvenFredholmModule z = canonical_module(d, 2, 0);
  AlgebraElement half = zero_element(d, 2);
  half.blocks[0].set(0, 0, Rational(1, 2));
  try {
    chern_pair(z, half, 1);
    FAIL("expected not_a_projection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_a_projection);
  }
}

TEST_CASE("pullback doubles the CAR generator") {
  BratteliDiagram d = car(8);
  for (std::size_t n = 0; n <= 5; ++n) {
    EvenFredholmModule up = canonical_module(d, n + 1, 0);
    EvenFredholmModule down = pullback(up, d);
    CHECK(down.level == n);
    CHECK(down.block_weights == IntVector{2});
    CHECK(axioms_check(down).ok());
    AlgebraElement p = minimal_projection(d, n, 0);
    for (std::size_t k = 0; k <= 3; ++k) CHECK(chern_pair(down, p, k) == 2);

    EvenFredholmModule z = canonical_module(d, n, 0);
    EvenFredholmModule twice = direct_sum(z, z);
    auto w = equivalence_witness(down, twice);
    REQUIRE(w.found);
    CHECK(w.permutation.size() == down.dim());
  }
  EvenFredholmModule two_down = pullback(pullback(canonical_module(d, 3, 0), d), d);
  CHECK(chern_pair(two_down, minimal_projection(d, 1, 0), 1) == 4);
  CHECK_THROWS_AS(pullback(canonical_module(d, 0, 0), d), Error);
}

TEST_CASE("equivalence witnesses") {
  BratteliDiagram d = car(4);
  EvenFredholmModule z = canonical_module(d, 2, 0);
  auto same = equivalence_witness(z, z);
  REQUIRE(same.found);
  for (std::size_t i = 0; i < same.permutation.size(); ++i) CHECK(same.permutation[i] == i);

  EvenFredholmModule z1 = canonical_module(d, 1, 0);
  auto mismatch = equivalence_witness(z1, direct_sum(z1, z1));
  CHECK_FALSE(mismatch.found);
  CHECK(mismatch.reason.find("dimension") != std::string::npos);

  // Same dimension and placements, but F differs by a sign on one pair.
  EvenFredholmModule twisted = z;
  twisted.F.set(0, z.half_dim, -1);
  twisted.F.set(z.half_dim, 0, -1);
  CHECK_FALSE(equivalence_witness(z, twisted).found);
}

TEST_CASE("K_0 pushforward") {
  CHECK(k0_pushforward(car(3), 1, {1}) == IntVector{2});
  BratteliDiagram fib = stationary("F", IntMatrix{{1, 1}, {1, 0}}, 4);
  CHECK(k0_pushforward(fib, 2, {1, 0}) == IntVector{1, 1});
  CHECK(k0_pushforward(fib, 2, {0, 0}) == IntVector{0, 0});
  CHECK_THROWS_AS(k0_pushforward(fib, 2, {1}), Error);
}

TEST_CASE("realizing classes") {
  BratteliDiagram d = car(4);
  EvenFredholmModule z = canonical_module(d, 2, 0);
  CHECK(chern_pair(z, realize_class(d, 2, {4}), 1) == 4);
  try {
    realize_class(d, 2, {5});
    FAIL("expected unrealizable_class");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unrealizable_class);
  }
  CHECK_THROWS_AS(realize_class(d, 2, {-1}), Error);
}

TEST_CASE("property: block duality, naturality, additivity on random diagrams") {
  std::mt19937 rng(2718);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t depth = 1 + trial % 5;
    BratteliDiagram d = random_diagram(rng, depth);
    REQUIRE(validate(d).ok());
    for (std::size_t n = 0; n <= depth; ++n) {
      const std::size_t kn = d.blocks(n);
      for (std::size_t i = 0; i < kn; ++i) {
        EvenFredholmModule z = canonical_module(d, n, i);
        REQUIRE(axioms_check(z).ok());
        for (std::size_t j = 0; j < kn; ++j)
          REQUIRE(chern_pair(z, minimal_projection(d, n, j), 1) == (i == j ? 1 : 0));
      }
      if (n == depth) continue;
      const IntMatrix m = d.multiplicity(n);
      for (std::size_t j = 0; j < d.blocks(n + 1); ++j) {
        EvenFredholmModule up = canonical_module(d, n + 1, j);
        EvenFredholmModule down = pullback(up, d);
        REQUIRE(down.block_weights == m.transpose() * up.block_weights);
        for (std::size_t i = 0; i < kn; ++i) {
          IntVector e(kn, Integer(0));
          e[i] = 1;
          const Rational lhs = chern_pair(down, realize_class(d, n, e), 1);
          const Rational rhs = chern_pair(up, realize_class(d, n + 1, k0_pushforward(d, n, e)), 1);
          REQUIRE(lhs == rhs);
          REQUIRE(lhs == Rational(m(j, i)));
          REQUIRE(chern_pair(up, embed(d, realize_class(d, n, e)), 2) == lhs);
        }
      }
      if (kn >= 2) {
        EvenFredholmModule a = canonical_module(d, n, 0);
        EvenFredholmModule b = canonical_module(d, n, 1);
        AlgebraElement one = unit_element(d, n);
        REQUIRE(chern_pair(direct_sum(a, b), one, 1) == chern_pair(a, one, 1) + chern_pair(b, one, 1));
      }
    }
  }
}

TEST_CASE("property: sparse pairing agrees with the dense oracle") {
  std::mt19937 rng(1618);
  for (int trial = 0; trial < 20; ++trial) {
    BratteliDiagram d = random_diagram(rng, 2);
    if (d.dims(1)[0] > 12) continue;
    EvenFredholmModule down = pullback(canonical_module(d, 1, 0), d);
    const std::size_t kn = d.blocks(0);
    for (std::size_t i = 0; i < kn; ++i) {
      IntVector e(kn, Integer(0));
      e[i] = 1;
      AlgebraElement p = realize_class(d, 0, e);
      for (std::size_t k = 0; k <= 2; ++k) REQUIRE(chern_pair(down, p, k) == pairing_oracle(down, p, k));
    }
  }
}
