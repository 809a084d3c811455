#include "afk/bratteli.hpp"

#include "afk/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace afk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

IntMatrix scalar_matrix(const Integer& x) {
  IntMatrix m(1, 1);
  m(0, 0) = x;
  return m;
}

}  // namespace

BratteliDiagram::BratteliDiagram(std::string name, DiagramKind kind)
    : name_(std::move(name)), kind_(std::move(kind)) {}

std::string_view BratteliDiagram::kind_name() const {
  return std::visit(overloaded{[](const ExplicitKind&) { return "explicit"; },
                               [](const StationaryKind&) { return "stationary"; },
                               [](const UhfKind&) { return "uhf"; }},
                    kind_);
}

std::optional<std::size_t> BratteliDiagram::finite_depth() const {
  return std::visit(
      overloaded{[](const ExplicitKind& k) -> std::optional<std::size_t> { return k.maps.size(); },
                 [](const StationaryKind&) -> std::optional<std::size_t> { return std::nullopt; },
                 [](const UhfKind& k) -> std::optional<std::size_t> {
                   if (k.repeat_tail) return std::nullopt;
                   return k.factors.size();
                 }},
      kind_);
}

std::size_t BratteliDiagram::nominal_depth() const {
  return std::visit(overloaded{[](const ExplicitKind& k) { return k.maps.size(); },
                               [](const StationaryKind& k) { return k.depth; },
                               [](const UhfKind& k) { return k.factors.size(); }},
                    kind_);
}

void BratteliDiagram::check_level(std::size_t n, bool is_map) const {
  auto depth = finite_depth();
  if (!depth) return;
  const bool bad = is_map ? n >= *depth : n > *depth;
  if (bad) {
    throw Error(ErrorKind::depth_overflow,
                "diagram '" + name_ + "' has " + std::to_string(*depth) +
                    " levels of maps; requested " + (is_map ? "map " : "level ") +
                    std::to_string(n));
  }
}

IntMatrix BratteliDiagram::multiplicity(std::size_t n) const {
  check_level(n, true);
  return std::visit(overloaded{[&](const ExplicitKind& k) { return k.maps[n]; },
                               [&](const StationaryKind& k) { return k.matrix; },
                               [&](const UhfKind& k) {
                                 return scalar_matrix(k.factors[n % k.factors.size()]);
                               }},
                    kind_);
}

IntVector BratteliDiagram::dims(std::size_t n) const {
  check_level(n, false);
  return std::visit(overloaded{[&](const ExplicitKind& k) { return k.dims[n]; },
                               [&](const StationaryKind& k) {
                                 IntVector d = k.base_dims;
                                 for (std::size_t i = 0; i < n; ++i) d = k.matrix * d;
                                 return d;
                               },
                               [&](const UhfKind& k) {
                                 Integer d = k.base_dim;
                                 for (std::size_t i = 0; i < n; ++i)
                                   d *= k.factors[i % k.factors.size()];
                                 return IntVector{d};
                               }},
                    kind_);
}

std::size_t BratteliDiagram::blocks(std::size_t n) const {
  check_level(n, false);
  return std::visit(overloaded{[&](const ExplicitKind& k) { return k.dims[n].size(); },
                               [&](const StationaryKind& k) { return k.base_dims.size(); },
                               [&](const UhfKind&) { return std::size_t{1}; }},
                    kind_);
}

std::optional<PeriodicTail<IntMatrix>> BratteliDiagram::tail() const {
  return std::visit(
      overloaded{[](const ExplicitKind&) -> std::optional<PeriodicTail<IntMatrix>> {
                   return std::nullopt;
                 },
                 [](const StationaryKind& k) -> std::optional<PeriodicTail<IntMatrix>> {
                   return PeriodicTail<IntMatrix>{0, {k.matrix}};
                 },
                 [](const UhfKind& k) -> std::optional<PeriodicTail<IntMatrix>> {
                   if (!k.repeat_tail) return std::nullopt;
                   PeriodicTail<IntMatrix> t;
                   for (const auto& f : k.factors) t.cycle.push_back(scalar_matrix(f));
                   return t;
                 }},
      kind_);
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::dimension_mismatch: return "dimension-mismatch";
    case ViolationKind::zero_row: return "zero-row";
    case ViolationKind::non_positive_dimension: return "non-positive-dimension";
    case ViolationKind::negative_multiplicity: return "negative-multiplicity";
    case ViolationKind::shape_mismatch: return "shape-mismatch";
    case ViolationKind::empty_diagram: return "empty-diagram";
    case ViolationKind::bad_factor: return "bad-factor";
  }
  return "unknown";
}

namespace {

ValidationReport fail(ViolationKind kind, std::size_t level, std::string message) {
  return {Violation{kind, level, std::move(message)}};
}

std::optional<Violation> check_dims(const IntVector& d, std::size_t level) {
  if (d.empty()) {
    return Violation{ViolationKind::empty_diagram, level, "level has no blocks"};
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= 0) {
      return Violation{ViolationKind::non_positive_dimension, level,
                       "block " + std::to_string(i) + " has dimension " + d[i].get_str()};
    }
  }
  return std::nullopt;
}

// Entry signs and zero rows of a multiplicity matrix.
std::optional<Violation> check_map(const IntMatrix& m, std::size_t level) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    bool any = false;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m(r, c) < 0) {
        return Violation{ViolationKind::negative_multiplicity, level,
                         "entry (" + std::to_string(r) + "," + std::to_string(c) + ") is " +
                             m(r, c).get_str()};
      }
      if (sgn(m(r, c)) != 0) any = true;
    }
    if (!any) {
      return Violation{ViolationKind::zero_row, level,
                       "block " + std::to_string(r) + " of level " + std::to_string(level + 1) +
                           " receives no embedding"};
    }
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate(const BratteliDiagram& diagram) {
  return std::visit(
      overloaded{
          [](const ExplicitKind& k) -> ValidationReport {
            if (k.dims.empty()) return fail(ViolationKind::empty_diagram, 0, "no levels");
            if (k.maps.size() + 1 != k.dims.size()) {
              return fail(ViolationKind::shape_mismatch, std::min(k.maps.size(), k.dims.size()),
                          std::to_string(k.dims.size()) + " levels need " +
                              std::to_string(k.dims.size() - 1) + " maps, got " +
                              std::to_string(k.maps.size()));
            }
            if (auto v = check_dims(k.dims[0], 0)) return {*v};
            for (std::size_t n = 0; n < k.maps.size(); ++n) {
              const IntMatrix& m = k.maps[n];
              if (m.rows() != k.dims[n + 1].size() || m.cols() != k.dims[n].size()) {
                return fail(ViolationKind::shape_mismatch, n,
                            "map is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " +
                                std::to_string(k.dims[n + 1].size()) + "x" +
                                std::to_string(k.dims[n].size()));
              }
              if (auto v = check_map(m, n)) return {*v};
              if (auto v = check_dims(k.dims[n + 1], n + 1)) return {*v};
              IntVector expected = m * k.dims[n];
              if (expected != k.dims[n + 1]) {
                return fail(ViolationKind::dimension_mismatch, n,
                            "M_" + std::to_string(n) + " * d_" + std::to_string(n) + " = " +
                                to_string(expected) + " but d_" + std::to_string(n + 1) +
                                " = " + to_string(k.dims[n + 1]));
              }
            }
            return {};
          },
          [](const StationaryKind& k) -> ValidationReport {
            const IntMatrix& m = k.matrix;
            if (m.rows() == 0 || m.rows() != m.cols()) {
              return fail(ViolationKind::shape_mismatch, 0, "stationary matrix must be square and non-empty");
            }
            if (k.base_dims.size() != m.cols()) {
              return fail(ViolationKind::shape_mismatch, 0,
                          "base dimensions have length " + std::to_string(k.base_dims.size()) +
                              ", matrix needs " + std::to_string(m.cols()));
            }
            if (auto v = check_dims(k.base_dims, 0)) return {*v};
            if (auto v = check_map(m, 0)) return {*v};
            return {};
          },
          [](const UhfKind& k) -> ValidationReport {
            if (k.factors.empty()) return fail(ViolationKind::empty_diagram, 0, "no factors");
            if (k.base_dim < 1) {
              return fail(ViolationKind::non_positive_dimension, 0,
                          "base dimension " + k.base_dim.get_str());
            }
            for (std::size_t n = 0; n < k.factors.size(); ++n) {
              if (k.factors[n] < 1) {
                return fail(ViolationKind::bad_factor, n, "factor " + k.factors[n].get_str() + " < 1");
              }
            }
            return {};
          }},
      diagram.kind());
}

// ---------------------------------------------------------------------------
// Presets

BratteliDiagram car(std::size_t depth) {
  if (depth < 1) throw Error(ErrorKind::invalid_argument, "car depth must be >= 1");
  return BratteliDiagram("CAR", StationaryKind{scalar_matrix(2), depth, IntVector{1}});
}

BratteliDiagram uhf(std::vector<Integer> factors, bool repeat_tail) {
  if (factors.empty()) throw Error(ErrorKind::invalid_argument, "uhf needs at least one factor");
  std::string name = "UHF";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] < 1) {
      throw Error(ErrorKind::invalid_argument, "uhf factor " + factors[i].get_str() + " < 1");
    }
    name += (i ? "," : "(") + factors[i].get_str();
  }
  name += repeat_tail ? ")+" : ")";
  return BratteliDiagram(name, UhfKind{std::move(factors), repeat_tail, 1});
}

BratteliDiagram stationary(std::string name, IntMatrix matrix, std::size_t depth) {
  IntVector base(matrix.cols(), Integer(1));
  return BratteliDiagram(std::move(name), StationaryKind{std::move(matrix), depth, std::move(base)});
}

std::optional<BratteliDiagram> preset(std::string_view spec, std::size_t depth) {
  if (spec == "car") return car(std::max<std::size_t>(depth, 1));
  constexpr std::string_view prefix = "uhf:";
  if (spec.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string body(spec.substr(prefix.size()));
  bool repeat = false;
  if (!body.empty() && body.back() == '+') {
    repeat = true;
    body.pop_back();
  }
  std::vector<Integer> factors;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Integer f;
    if (item.empty() || f.set_str(item, 10) != 0) {
      throw Error(ErrorKind::syntax, "bad uhf factor '" + item + "' in preset '" + std::string(spec) + "'");
    }
    factors.push_back(f);
  }
  if (factors.empty()) throw Error(ErrorKind::syntax, "uhf preset needs factors: " + std::string(spec));
  return uhf(std::move(factors), repeat);
}

// ---------------------------------------------------------------------------
// Towers

std::string_view to_string(Direction d) {
  return d == Direction::covariant ? "covariant" : "contravariant";
}

IntMatrix Tower::step(std::size_t n) const {
  if (n < steps.size()) return steps[n];
  if (tail && n >= tail->start && !tail->cycle.empty()) {
    return tail->cycle[(n - tail->start) % tail->cycle.size()];
  }
  throw Error(ErrorKind::depth_overflow, "tower has " + std::to_string(steps.size()) +
                                             " steps; requested step " + std::to_string(n));
}

std::size_t Tower::rank(std::size_t level) const {
  if (level == 0) return base_rank;
  IntMatrix s = step(level - 1);
  return direction == Direction::covariant ? s.rows() : s.cols();
}

IntMatrix Tower::composite(std::size_t lo, std::size_t hi) const {
  if (hi < lo) throw Error(ErrorKind::invalid_argument, "composite needs lo <= hi");
  IntMatrix acc = IntMatrix::identity(rank(lo));
  for (std::size_t n = lo; n < hi; ++n) {
    acc = direction == Direction::covariant ? step(n) * acc : acc * step(n);
  }
  return acc;
}

Tower zero_tower(Direction direction, std::size_t depth) {
  Tower t;
  t.direction = direction;
  t.base_rank = 0;
  t.steps.assign(depth, IntMatrix(0, 0));
  t.tail = PeriodicTail<IntMatrix>{0, {IntMatrix(0, 0)}};
  return t;
}

namespace {

Tower build_tower(const BratteliDiagram& diagram, std::size_t depth, Direction dir) {
  if (auto fd = diagram.finite_depth(); fd && depth > *fd) {
    throw Error(ErrorKind::depth_overflow, "diagram '" + diagram.name() + "' has depth " +
                                               std::to_string(*fd) + ", requested " +
                                               std::to_string(depth));
  }
  auto orient = [dir](IntMatrix m) { return dir == Direction::covariant ? m : m.transpose(); };
  Tower t;
  t.direction = dir;
  t.base_rank = diagram.blocks(0);
  t.steps.reserve(depth);
  for (std::size_t n = 0; n < depth; ++n) t.steps.push_back(orient(diagram.multiplicity(n)));
  if (auto tail = diagram.tail()) {
    for (auto& m : tail->cycle) m = orient(std::move(m));
    t.tail = std::move(tail);
  }
  return t;
}

}  // namespace

Tower k0_tower(const BratteliDiagram& diagram, std::size_t depth) {
  return build_tower(diagram, depth, Direction::covariant);
}

Tower khomology_tower(const BratteliDiagram& diagram, std::size_t depth) {
  return build_tower(diagram, depth, Direction::contravariant);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void syntax(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::syntax, "at " + path + ": " + what);
}

Integer read_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
    return Integer(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    Integer v;
    const auto s = j.get<std::string>();
    if (!s.empty() && v.set_str(s, 10) == 0) return v;
  }
  syntax(path, "expected an integer, got " + j.dump());
}

IntVector read_vector(const json& j, const std::string& path) {
  if (!j.is_array()) syntax(path, "expected a list of integers");
  IntVector v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(read_integer(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

IntMatrix read_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) syntax(path, "expected a non-empty list of rows");
  std::vector<IntVector> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    rows.push_back(read_vector(j[r], path + "[" + std::to_string(r) + "]"));
    if (rows.back().size() != rows.front().size()) {
      syntax(path + "[" + std::to_string(r) + "]",
             "row has length " + std::to_string(rows.back().size()) + ", expected " +
                 std::to_string(rows.front().size()));
    }
  }
  return IntMatrix::from_rows(rows, rows.front().size());
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) syntax("$", std::string("missing key '") + key + "'");
  return *it;
}

json write_integer(const Integer& x) {
  if (x.fits_slong_p()) return json(x.get_si());
  return json(x.get_str());
}

json write_vector(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(write_integer(x));
  return a;
}

json write_matrix(const IntMatrix& m) {
  json a = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) a.push_back(write_vector(m.row(r)));
  return a;
}

}  // namespace

BratteliDiagram parse_diagram(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::syntax, "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) syntax("$", "expected an object");
  std::string name = "diagram";
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) syntax("$.name", "expected a string");
    name = it->get<std::string>();
  }
  const json& kind = require(j, "kind");
  if (!kind.is_string()) syntax("$.kind", "expected a string");
  const auto k = kind.get<std::string>();

  BratteliDiagram d;
  if (k == "explicit") {
    const json& dims = require(j, "dims");
    const json& maps = require(j, "maps");
    if (!dims.is_array()) syntax("$.dims", "expected a list of dimension vectors");
    if (!maps.is_array()) syntax("$.maps", "expected a list of matrices");
    ExplicitKind e;
    for (std::size_t n = 0; n < dims.size(); ++n)
      e.dims.push_back(read_vector(dims[n], "$.dims[" + std::to_string(n) + "]"));
    for (std::size_t n = 0; n < maps.size(); ++n)
      e.maps.push_back(read_matrix(maps[n], "$.maps[" + std::to_string(n) + "]"));
    d = BratteliDiagram(name, std::move(e));
  } else if (k == "stationary") {
    StationaryKind s;
    s.matrix = read_matrix(require(j, "matrix"), "$.matrix");
    const json& depth = require(j, "depth");
    if (!depth.is_number_unsigned()) syntax("$.depth", "expected a non-negative integer");
    s.depth = depth.get<std::size_t>();
    if (auto it = j.find("dims0"); it != j.end()) {
      s.base_dims = read_vector(*it, "$.dims0");
    } else {
      s.base_dims.assign(s.matrix.cols(), Integer(1));
    }
    d = BratteliDiagram(name, std::move(s));
  } else if (k == "uhf") {
    UhfKind u;
    u.factors = read_vector(require(j, "factors"), "$.factors");
    if (auto it = j.find("repeat_tail"); it != j.end()) {
      if (!it->is_boolean()) syntax("$.repeat_tail", "expected true or false");
      u.repeat_tail = it->get<bool>();
    }
    if (auto it = j.find("dims0"); it != j.end()) {
      IntVector base = read_vector(*it, "$.dims0");
      if (base.size() != 1) syntax("$.dims0", "uhf diagrams have a single block");
      u.base_dim = base[0];
    }
    d = BratteliDiagram(name, std::move(u));
  } else {
    syntax("$.kind", "unknown kind '" + k + "'");
  }

  auto report = validate(d);
  if (!report.ok()) {
    const auto& v = *report.violation;
    throw Error(ErrorKind::validation, std::string(to_string(v.kind)) + " at level " +
                                           std::to_string(v.level) + ": " + v.message);
  }
  return d;
}

std::string serialize_diagram(const BratteliDiagram& diagram) {
  json j;
  j["name"] = diagram.name();
  j["kind"] = std::string(diagram.kind_name());
  std::visit(overloaded{[&](const ExplicitKind& k) {
                          json dims = json::array();
                          for (const auto& v : k.dims) dims.push_back(write_vector(v));
                          json maps = json::array();
                          for (const auto& m : k.maps) maps.push_back(write_matrix(m));
                          j["dims"] = std::move(dims);
                          j["maps"] = std::move(maps);
                        },
                        [&](const StationaryKind& k) {
                          j["matrix"] = write_matrix(k.matrix);
                          j["depth"] = k.depth;
                          if (k.base_dims != IntVector(k.matrix.cols(), Integer(1)))
                            j["dims0"] = write_vector(k.base_dims);
                        },
                        [&](const UhfKind& k) {
                          j["factors"] = write_vector(k.factors);
                          j["repeat_tail"] = k.repeat_tail;
                          if (k.base_dim != 1) j["dims0"] = write_vector({k.base_dim});
                        }},
             diagram.kind());
  return j.dump();
}

}  // namespace afk
