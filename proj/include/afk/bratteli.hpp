#pragma once

// Bratteli diagrams of unital AF algebras and the K-theory / K-homology towers
// they induce.

#include "afk/exactlin.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace afk {

/// Finite diagram with every level written out. Analysis past the last level
/// is an error.
struct ExplicitKind {
  std::vector<IntVector> dims;
  std::vector<IntMatrix> maps;
  friend bool operator==(const ExplicitKind&, const ExplicitKind&) = default;
};

/// Constant multiplicity matrix at every level; `depth` is the nominal number
/// of levels written when serializing, the diagram itself is unbounded.
struct StationaryKind {
  IntMatrix matrix;
  std::size_t depth = 0;
  IntVector base_dims;
  friend bool operator==(const StationaryKind&, const StationaryKind&) = default;
};

/// Single-block diagram with 1x1 multiplicity matrices [m_n]. With
/// `repeat_tail` the factor list is repeated cyclically forever.
struct UhfKind {
  std::vector<Integer> factors;
  bool repeat_tail = false;
  Integer base_dim = 1;
  friend bool operator==(const UhfKind&, const UhfKind&) = default;
};

using DiagramKind = std::variant<ExplicitKind, StationaryKind, UhfKind>;

/// Eventually periodic continuation: for n >= start the map at level n equals
/// cycle[(n - start) % cycle.size()].
template <typename Map>
struct PeriodicTail {
  std::size_t start = 0;
  std::vector<Map> cycle;
  friend bool operator==(const PeriodicTail&, const PeriodicTail&) = default;
};

class BratteliDiagram {
 public:
  BratteliDiagram() = default;
  BratteliDiagram(std::string name, DiagramKind kind);

  const std::string& name() const noexcept { return name_; }
  const DiagramKind& kind() const noexcept { return kind_; }
  std::string_view kind_name() const;

  /// Number of multiplicity matrices available, or nullopt for unbounded kinds.
  std::optional<std::size_t> finite_depth() const;
  bool is_finite() const { return finite_depth().has_value(); }
  /// Levels written when serializing or listing: explicit depth, stationary
  /// depth, or the length of the uhf factor list.
  std::size_t nominal_depth() const;

  /// M_n, the map from level n to level n+1 (shape k_{n+1} x k_n).
  IntMatrix multiplicity(std::size_t n) const;
  /// d_n.
  IntVector dims(std::size_t n) const;
  std::size_t blocks(std::size_t n) const;
  /// Periodic continuation of the multiplicity matrices, nullopt for finite kinds.
  std::optional<PeriodicTail<IntMatrix>> tail() const;

  friend bool operator==(const BratteliDiagram&, const BratteliDiagram&) = default;

 private:
  void check_level(std::size_t n, bool is_map) const;

  std::string name_;
  DiagramKind kind_;
};

enum class ViolationKind {
  dimension_mismatch,
  zero_row,
  non_positive_dimension,
  negative_multiplicity,
  shape_mismatch,
  empty_diagram,
  bad_factor,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t level;
  std::string message;
};

struct ValidationReport {
  std::optional<Violation> violation;
  bool ok() const noexcept { return !violation.has_value(); }
};

ValidationReport validate(const BratteliDiagram& diagram);

/// The CAR algebra: d_n = [2^n], all maps [2].
BratteliDiagram car(std::size_t depth);
BratteliDiagram uhf(std::vector<Integer> factors, bool repeat_tail);
BratteliDiagram stationary(std::string name, IntMatrix matrix, std::size_t depth);

enum class Direction { covariant, contravariant };
std::string_view to_string(Direction d);

/// Sequence of free abelian groups Z^{k_n} with integer connecting maps.
/// Covariant step n maps level n to level n+1 (shape k_{n+1} x k_n);
/// contravariant step n maps level n+1 to level n (shape k_n x k_{n+1}).
struct Tower {
  Direction direction = Direction::covariant;
  std::size_t base_rank = 0;
  std::vector<IntMatrix> steps;
  std::optional<PeriodicTail<IntMatrix>> tail;

  /// Number of materialized steps.
  std::size_t depth() const noexcept { return steps.size(); }
  bool is_finite() const noexcept { return !tail.has_value(); }
  /// Step n, continued through the periodic tail when past the materialized depth.
  IntMatrix step(std::size_t n) const;
  std::size_t rank(std::size_t level) const;
  /// Composite map between levels, in the tower's direction:
  /// covariant  lo -> hi  (k_hi x k_lo), contravariant hi -> lo (k_lo x k_hi).
  IntMatrix composite(std::size_t lo, std::size_t hi) const;

  friend bool operator==(const Tower&, const Tower&) = default;
};

/// Tower of zero groups (the odd K-homology of matrix-block algebras).
Tower zero_tower(Direction direction, std::size_t depth);

Tower k0_tower(const BratteliDiagram& diagram, std::size_t depth);
Tower khomology_tower(const BratteliDiagram& diagram, std::size_t depth);

BratteliDiagram parse_diagram(std::string_view text);
/// Stable key order; parse_diagram(serialize_diagram(d)) == d.
std::string serialize_diagram(const BratteliDiagram& diagram);

/// "car", "uhf:2,3" or "uhf:2,3+" (trailing '+' repeats the list).
std::optional<BratteliDiagram> preset(std::string_view spec, std::size_t depth);

}  // namespace afk
