#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afk/bratteli.hpp"
#include "afk/error.hpp"

#include <random>

using namespace afk;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected afk::Error");
  return ErrorKind::invalid_argument;
}

// Random unital explicit diagram: every row of every map has a positive entry
// and the dims are pushed forward, so it is valid by construction.
BratteliDiagram random_diagram(std::mt19937& rng, std::size_t depth) {
  std::uniform_int_distribution<std::size_t> blocks(1, 3);
  std::uniform_int_distribution<int> entry(0, 3);
  ExplicitKind k;
  IntVector d0(blocks(rng));
  for (auto& x : d0) x = 1 + entry(rng);
  k.dims.push_back(d0);
  for (std::size_t n = 0; n < depth; ++n) {
    const std::size_t rows = blocks(rng);
    IntMatrix m(rows, k.dims.back().size());
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = entry(rng);
      m(i, rng() % m.cols()) += 1;
    }
    k.dims.push_back(m * k.dims.back());
    k.maps.push_back(m);
  }
  return BratteliDiagram("random", k);
}

}  // namespace

TEST_CASE("CAR diagram") {
  BratteliDiagram d = car(8);
  CHECK(d.name() == "CAR");
  CHECK(d.kind_name() == "stationary");
  CHECK_FALSE(d.is_finite());
  CHECK(validate(d).ok());
  for (std::size_t n = 0; n <= 8; ++n) {
    CHECK(d.dims(n) == IntVector{Integer(1) << static_cast<unsigned>(n)});
    CHECK(d.multiplicity(n) == IntMatrix{{2}});
  }
  CHECK(d.dims(40) == IntVector{Integer(1) << 40});
  CHECK(kind_of([] { car(0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("UHF diagrams") {
  BratteliDiagram a = uhf({2, 3}, true);
  CHECK(a.name() == "UHF(2,3)+");
  CHECK(a.multiplicity(0) == IntMatrix{{2}});
  CHECK(a.multiplicity(1) == IntMatrix{{3}});
  CHECK(a.multiplicity(2) == IntMatrix{{2}});
  CHECK(a.dims(3) == IntVector{12});
  CHECK_FALSE(a.is_finite());

  BratteliDiagram b = uhf({4}, false);
  CHECK(b.finite_depth() == std::optional<std::size_t>(1));
  CHECK(kind_of([&] { b.multiplicity(1); }) == ErrorKind::depth_overflow);
  CHECK(kind_of([] { uhf({2, 0}, false); }) == ErrorKind::invalid_argument);
}

TEST_CASE("presets") {
  CHECK(preset("car", 5)->name() == "CAR");
  CHECK(preset("uhf:3+", 5)->multiplicity(7) == IntMatrix{{3}});
  CHECK(preset("uhf:1", 5)->finite_depth() == std::optional<std::size_t>(1));
  CHECK_FALSE(preset("cuntz", 5).has_value());
  CHECK(kind_of([] { preset("uhf:2,x", 3); }) == ErrorKind::syntax);
}

TEST_CASE("validation reports the first violation") {
  ExplicitKind k;
  k.dims = {{1}, {3}};
  k.maps = {IntMatrix{{2}}};
  auto r = validate(BratteliDiagram("bad", k));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violation->kind == ViolationKind::dimension_mismatch);
  CHECK(r.violation->level == 0);

  k.dims = {{1, 1}, {1, 2}};
  k.maps = {IntMatrix{{1, 0}, {0, 0}}};
  r = validate(BratteliDiagram("bad", k));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violation->kind == ViolationKind::zero_row);

  k.dims = {{1}, {2}};
  k.maps = {IntMatrix{{2}, {0}}};
  r = validate(BratteliDiagram("bad", k));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violation->kind == ViolationKind::shape_mismatch);

  k.dims = {{1}, {-2}};
  k.maps = {IntMatrix{{-2}}};
  r = validate(BratteliDiagram("bad", k));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violation->kind == ViolationKind::negative_multiplicity);

  k.dims = {};
  k.maps = {};
  CHECK(validate(BratteliDiagram("empty", k)).violation->kind == ViolationKind::empty_diagram);
}

TEST_CASE("towers") {
  BratteliDiagram d = stationary("S", IntMatrix{{1, 1}, {1, 0}}, 4);
  Tower k0 = k0_tower(d, 3);
  Tower kh = khomology_tower(d, 3);
  CHECK(k0.direction == Direction::covariant);
  CHECK(kh.direction == Direction::contravariant);
  CHECK(k0.step(10) == IntMatrix{{1, 1}, {1, 0}});
  CHECK(kh.step(10) == IntMatrix{{1, 1}, {1, 0}}.transpose());
  CHECK(k0.rank(0) == 2);

  ExplicitKind e;
  e.dims = {{1}, {1, 1}, {3, 2}};
  e.maps = {IntMatrix{{1}, {1}}, IntMatrix{{2, 1}, {1, 1}}};
  BratteliDiagram x("x", e);
  REQUIRE(validate(x).ok());
  Tower t = k0_tower(x, 2);
  CHECK(t.composite(0, 2) == IntMatrix{{3}, {2}});
  Tower u = khomology_tower(x, 2);
  CHECK(u.composite(0, 2) == IntMatrix{{3, 2}});
  CHECK(kind_of([&] { k0_tower(x, 3); }) == ErrorKind::depth_overflow);
  CHECK(kind_of([&] { t.step(2); }) == ErrorKind::depth_overflow);

  Tower z = zero_tower(Direction::contravariant, 3);
  CHECK(z.rank(5) == 0);
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_diagram(R"({"kind":"explicit","dims":[[1]],"maps":[[["a"]]]})");
    FAIL("expected syntax error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::syntax);
    CHECK(std::string(e.what()).find("$.maps") != std::string::npos);
  }
  CHECK(kind_of([] { parse_diagram("{not json"); }) == ErrorKind::syntax);
  CHECK(kind_of([] { parse_diagram(R"({"kind":"cuntz"})"); }) == ErrorKind::syntax);
  CHECK(kind_of([] {
          parse_diagram(R"({"kind":"explicit","dims":[[1],[3]],"maps":[[[2]]]})");
        }) == ErrorKind::validation);
}

TEST_CASE("big multiplicities survive as digit strings") {
  BratteliDiagram d = parse_diagram(
      R"({"name":"big","kind":"uhf","factors":["123456789012345678901234567890"],"repeat_tail":true})");
  CHECK(d.multiplicity(5)(0, 0) == Integer("123456789012345678901234567890"));
}

TEST_CASE("property: serialization round trip") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    BratteliDiagram d = random_diagram(rng, 1 + trial % 5);
    REQUIRE(validate(d).ok());
    const std::string s = serialize_diagram(d);
    REQUIRE(parse_diagram(s) == d);
    REQUIRE(serialize_diagram(parse_diagram(s)) == s);
  }
  for (const auto& d : {car(6), uhf({2, 3}, true), uhf({4}, false),
                        stationary("S", IntMatrix{{1, 1}, {1, 0}}, 3)}) {
    REQUIRE(parse_diagram(serialize_diagram(d)) == d);
  }
}
