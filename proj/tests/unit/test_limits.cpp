#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afk/error.hpp"
#include "afk/limits.hpp"

#include <random>

using namespace afk;

namespace {

Tower stationary_tower(const IntMatrix& t, Direction dir) {
  Tower w;
  w.direction = dir;
  w.base_rank = t.cols();
  w.tail = PeriodicTail<IntMatrix>{0, {t}};
  return w;
}

Tower finite_tower(std::vector<IntMatrix> steps, Direction dir) {
  Tower w;
  w.direction = dir;
  w.base_rank = dir == Direction::covariant ? steps.front().cols() : steps.front().rows();
  w.steps = std::move(steps);
  return w;
}

// Rank of the inverse limit of a stationary tower with k <= 3: the number of
// roots (with multiplicity) of the characteristic polynomial whose minimal
// polynomial has constant term +-1. Integer roots are found among divisors
// of the constant term; what remains has degree <= 2 and is either
// irreducible or a product of non-unit integer roots.
std::size_t lim_rank_oracle(const IntMatrix& t) {
  IntPolynomial h = characteristic_polynomial(t);
  while (h.size() > 1 && sgn(h[0]) == 0) h.erase(h.begin());
  std::size_t units = 0;
  for (bool again = true; again && degree(h) > 0;) {
    again = false;
    Integer c = abs(h[0]);
    for (Integer a = 1; a <= c; ++a) {
      if (c % a != 0) continue;
      for (Integer r : {a, Integer(-a)}) {
        if (sgn(evaluate(h, r)) != 0) continue;
        IntPolynomial q;
        REQUIRE(divide_monic(h, {Integer(-r), 1}, q));
        h = q;
        if (abs(r) == 1) ++units;
        again = true;
        break;
      }
      if (again) break;
    }
  }
  if (degree(h) > 0 && abs(h[0]) == 1) units += degree(h);
  return units;
}

IntMatrix random_square(std::mt19937& rng, std::size_t k, int lo, int hi) {
  std::uniform_int_distribution<int> e(lo, hi);
  IntMatrix m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = e(rng);
  return m;
}

}  // namespace

TEST_CASE("descriptors normalize and render") {
  auto two = SupernaturalNumber::infinite_part_of(2);
  CHECK(GroupDescriptor::localization(two).text() == "Z[1/2]");
  CHECK(GroupDescriptor::localization(SupernaturalNumber::infinite_part_of(6)).text() == "Z[1/6]");
  CHECK(GroupDescriptor::localization(SupernaturalNumber::of(64)) ==
        GroupDescriptor::free_abelian(1));
  CHECK(GroupDescriptor::free_abelian(0) == GroupDescriptor::zero());
  CHECK(GroupDescriptor::profinite_quotient(two * SupernaturalNumber::of(3)).text() ==
        "Z_2-hat/Z");
  CHECK(GroupDescriptor::free_abelian(3).text() == "Z^3");
  CHECK_THROWS_AS(GroupDescriptor::profinite_quotient(SupernaturalNumber::of(4)), Error);
}

TEST_CASE("CAR K-homology tower: lim = 0, lim^1 = Z_2-hat/Z, ML fails") {
  Tower kh = khomology_tower(car(24), 24);
  auto lim = lim_descriptor(kh, 24);
  CHECK(lim.descriptor == GroupDescriptor::zero());
  CHECK(lim.descriptor.is_exact());
  REQUIRE_FALSE(lim.certificates.empty());
  const Certificate& w = lim.certificates.front();
  CHECK(w.kind == CertificateKind::strictly_decreasing_witness);
  REQUIRE(w.chain.size() == 25);
  for (std::size_t j = 0; j <= 24; ++j)
    CHECK(w.chain[j] == image_lattice(IntMatrix::from_rows({{Integer(1) << static_cast<unsigned>(j)}}, 1)));
  CHECK(to_string(w.chain[24]) == "16777216Z");
  CHECK(recheck(kh, w));

  auto ml = mittag_leffler(kh, 24);
  CHECK(ml.verdict == MLVerdict::fails);
  CHECK(ml.certificates.front().chain == w.chain);

  auto l1 = lim1_descriptor(kh, 24);
  CHECK(l1.descriptor == GroupDescriptor::profinite_quotient(SupernaturalNumber::infinite_part_of(2)));
  CHECK(l1.descriptor.text() == "Z_2-hat/Z");

  CHECK(colim_descriptor(k0_tower(car(24), 24)).text() == "Z[1/2]");
}

TEST_CASE("tampered certificates fail recheck") {
  Tower kh = khomology_tower(car(8), 8);
  Certificate w = lim_descriptor(kh, 8).certificates.front();
  Certificate bad = w;
  bad.chain[3] = bad.chain[2];
  CHECK_FALSE(recheck(kh, bad));
  Tower other = stationary_tower(IntMatrix{{1}}, Direction::contravariant);
  CHECK_FALSE(recheck(other, w));
}

TEST_CASE("uhf towers") {
  auto d3 = khomology_tower(uhf({3}, true), 10);
  CHECK(lim1_descriptor(d3).descriptor.text() == "Z_3-hat/Z");
  auto d6 = khomology_tower(uhf({6}, true), 10);
  CHECK(to_string(lim1_descriptor(d6).descriptor.supernatural()) == "2^inf*3^inf");
  auto d23 = uhf({2, 3}, true);
  CHECK(colim_descriptor(k0_tower(d23, 4)).text() == "Z[1/6]");
  CHECK(lim1_descriptor(khomology_tower(d23, 4)).descriptor.text() == "Z_6-hat/Z");

  auto one = khomology_tower(uhf({1}, false), 1);
  CHECK(lim_descriptor(one, 1).descriptor == GroupDescriptor::free_abelian(1));
  CHECK(lim1_descriptor(one, 1).descriptor == GroupDescriptor::zero());

  auto p = supernatural_of(k0_tower(uhf({4}, false), 1));
  CHECK(p.finite_truncation);
  CHECK(to_string(p.value) == "2^2");
  auto q = supernatural_of(k0_tower(uhf({2, 3}, true), 0));
  CHECK_FALSE(q.finite_truncation);
  CHECK(to_string(q.value) == "2^inf*3^inf");
}

TEST_CASE("finite towers are exact at the top level") {
  Tower u = finite_tower({IntMatrix{{2, 0}}, IntMatrix{{3}, {1}}}, Direction::contravariant);
  CHECK(lim_descriptor(u, 2).descriptor == GroupDescriptor::free_abelian(1));
  CHECK(mittag_leffler(u, 2).verdict == MLVerdict::holds);
  for (const auto& c : mittag_leffler(u, 2).certificates) CHECK(recheck(u, c));
  CHECK(lim1_descriptor(u, 2).descriptor == GroupDescriptor::zero());
  try {
    lim_descriptor(u, 3);
    FAIL("expected horizon_overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::horizon_overflow);
  }
}

TEST_CASE("direction and error kinds") {
  Tower k0 = k0_tower(car(3), 3);
  try {
    lim_descriptor(k0, 3);
    FAIL("expected wrong_direction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::wrong_direction);
  }
  try {
    colim_descriptor(khomology_tower(car(3), 3));
    FAIL("expected wrong_direction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::wrong_direction);
  }
}

TEST_CASE("multi-block limits use the unit core, not elementary divisors") {
  // diag(2,3): elementary divisors of T^N are (1, 6^N) but the limit is 0.
  Tower a = stationary_tower(IntMatrix{{2, 0}, {0, 3}}, Direction::contravariant);
  CHECK(lim_descriptor(a).descriptor == GroupDescriptor::zero());
  CHECK(lim1_descriptor(a).descriptor.variant() == DescriptorVariant::nonzero_uncountable_lim1);

  Tower b = stationary_tower(IntMatrix{{2, 1}, {0, 1}}, Direction::contravariant);
  auto lb = lim_descriptor(b);
  CHECK(lb.descriptor == GroupDescriptor::free_abelian(1));
  for (const auto& c : lb.certificates) CHECK(recheck(b, c));

  // Fibonacci: unimodular, ML holds, lim = Z^2.
  Tower f = stationary_tower(IntMatrix{{1, 1}, {1, 0}}, Direction::contravariant);
  CHECK(lim_descriptor(f).descriptor == GroupDescriptor::free_abelian(2));
  CHECK(mittag_leffler(f).verdict == MLVerdict::holds);
  CHECK(colim_descriptor(stationary_tower(IntMatrix{{1, 1}, {1, 0}}, Direction::covariant)) ==
        GroupDescriptor::free_abelian(2));

  // Nilpotent part: image chain stabilizes after one step.
  Tower n = stationary_tower(IntMatrix{{0, 1}, {0, 0}}, Direction::contravariant);
  auto mn = mittag_leffler(n);
  CHECK(mn.verdict == MLVerdict::holds);
  CHECK(lim_descriptor(n).descriptor == GroupDescriptor::zero());
}

TEST_CASE("unit part of polynomials") {
  IntPolynomial u;
  // (x^2 - x - 1)(x - 2)
  REQUIRE(unit_part(multiply({-1, -1, 1}, {-2, 1}), u));
  CHECK(u == IntPolynomial{-1, -1, 1});
  // x^2 - 3x - 2 is irreducible and not a unit factor
  REQUIRE(unit_part({-2, -3, 1}, u));
  CHECK(u == IntPolynomial{1});
  // (x^2 + 1)(x^2 - 2)
  REQUIRE(unit_part(multiply({1, 0, 1}, {-2, 0, 1}), u));
  CHECK(u == IntPolynomial{1, 0, 1});
}

TEST_CASE("property: stationary lim rank matches the root oracle") {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 3;
    IntMatrix t = random_square(rng, k, trial % 2 == 0 ? 0 : -2, 3);
    Tower w = stationary_tower(t, Direction::contravariant);
    auto lim = lim_descriptor(w, 12);
    INFO(to_string(t));
    REQUIRE(lim.descriptor.is_exact());
    REQUIRE(lim.descriptor.rank() == lim_rank_oracle(t));
    for (const auto& c : lim.certificates) REQUIRE(recheck(w, c));
  }
}

TEST_CASE("property: image chains propagate once decided") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 3;
    IntMatrix t = random_square(rng, k, 0, 3);
    Tower w = stationary_tower(t, Direction::contravariant);
    auto chain = image_chain(w, 0, 3 * k + 6);
    std::optional<std::size_t> stable, strict;
    for (std::size_t m = 0; m + 1 < chain.size(); ++m) {
      REQUIRE(chain[m].contains(chain[m + 1]));
      if (!stable && !strict) {
        if (chain[m] == chain[m + 1]) stable = m;
        else if (chain[m].rank() == chain[m + 1].rank()) strict = m;
      }
    }
    REQUIRE((stable || strict));
    REQUIRE(*(stable ? stable : strict) <= k);
    for (std::size_t m = stable ? *stable : *strict; m + 1 < chain.size(); ++m) {
      if (stable) REQUIRE(chain[m] == chain[m + 1]);
      else REQUIRE(chain[m] != chain[m + 1]);
    }
    auto ml = mittag_leffler(w, 10);
    REQUIRE(ml.verdict == (stable ? MLVerdict::holds : MLVerdict::fails));
  }
}

TEST_CASE("property: Mittag-Leffler implies lim^1 = 0") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 3;
    Tower w = stationary_tower(random_square(rng, k, 0, 2), Direction::contravariant);
    auto ml = mittag_leffler(w, 10);
    auto l1 = lim1_descriptor(w, 10);
    if (ml.verdict == MLVerdict::holds) REQUIRE(l1.descriptor == GroupDescriptor::zero());
    else REQUIRE(l1.descriptor != GroupDescriptor::zero());
    for (const auto& c : ml.certificates) REQUIRE(recheck(w, c));
  }
}

TEST_CASE("rank-1 compatible sequences: lim is zero exactly when a factor is not a unit") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Integer> factors{1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 4)};
    Tower w = khomology_tower(uhf(factors, true), 2);
    // Enumerate x_0 in [-50, 50] admitting x_0 = f_0 f_1 ... f_{N-1} x_N for N = 12.
    Integer prod = 1;
    for (std::size_t n = 0; n < 12; ++n) prod *= factors[n % 2];
    std::size_t survivors = 0;
    for (long x = -50; x <= 50; ++x)
      if (Integer(x) % prod == 0) ++survivors;
    const bool zero = survivors == 1;
    REQUIRE((lim_descriptor(w).descriptor == GroupDescriptor::zero()) == zero);
    REQUIRE((lim1_descriptor(w).descriptor == GroupDescriptor::zero()) == !zero);
  }
}

TEST_CASE("direct limit elements") {
  auto t = std::make_shared<const Tower>(k0_tower(car(10), 10));
  auto x = colim_inject(t, 0, {1});
  auto y = colim_inject(t, 1, {2});
  CHECK(colim_equal(x, y).equal);
  CHECK_FALSE(colim_equal(x, colim_inject(t, 1, {1})).equal);
  CHECK(colim_equal(colim_add(x, x), colim_inject(t, 2, {8})).equal);
  CHECK_FALSE(colim_equal(colim_add(x, x), colim_inject(t, 2, {4})).equal);
  CHECK(colim_equal(colim_add(x, x), colim_inject(t, 2, {4})).certificate.kind ==
        CertificateKind::injectivity);
  CHECK(colim_equal(colim_add(x, colim_negate(x)), colim_inject(t, 3, {0})).equal);

  auto n = std::make_shared<const Tower>(stationary_tower(IntMatrix{{0, 1}, {0, 0}}, Direction::covariant));
  CHECK(colim_equal(colim_inject(n, 0, {1, 0}), colim_inject(n, 0, {0, 0})).equal);
  CHECK(colim_equal(colim_inject(n, 0, {0, 1}), colim_inject(n, 0, {0, 0})).equal);
  auto m = std::make_shared<const Tower>(stationary_tower(IntMatrix{{1, 1}, {0, 0}}, Direction::covariant));
  CHECK_FALSE(colim_equal(colim_inject(m, 0, {0, 1}), colim_inject(m, 0, {0, 0})).equal);
  CHECK(colim_equal(colim_inject(m, 0, {1, -1}), colim_inject(m, 0, {0, 0})).equal);

  auto other = std::make_shared<const Tower>(k0_tower(uhf({3}, true), 3));
  try {
    colim_add(x, colim_inject(other, 0, {1}));
    FAIL("expected mixed_towers");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::mixed_towers);
  }
}
