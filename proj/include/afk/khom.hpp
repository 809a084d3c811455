#pragma once

// K-homology of AF algebras: the Milnor sequences assembled from the level-wise
// groups, the divisibility obstruction on pulled-back generators, and the full
// analysis report.

#include "afk/bratteli.hpp"
#include "afk/fredholm.hpp"
#include "afk/limits.hpp"
#include "afk/supernatural.hpp"

#include "json.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace afk {

struct MilnorAssembly {
  GroupDescriptor kk0 = GroupDescriptor::zero();
  GroupDescriptor kk1 = GroupDescriptor::zero();
  /// Contravariant towers KK^0(A_n) = Z^{k_n} (maps M^T) and KK^1(A_n) = 0.
  Tower even;
  Tower odd;
  MLVerdict even_ml = MLVerdict::unknown;
  std::vector<Certificate> certificates;
};

/// Horizon actually used for a diagram: the requested one, capped at the
/// depth of a finite diagram.
std::size_t effective_horizon(const BratteliDiagram& diagram, std::size_t horizon);
/// Number of materialized levels used for towers of this diagram.
std::size_t analysis_depth(const BratteliDiagram& diagram, std::size_t horizon);

MilnorAssembly milnor_assemble(const BratteliDiagram& diagram,
                               std::size_t horizon = default_horizon);

/// Divisibility forced on the coefficients of any class pulled back to level n
/// from arbitrarily high levels: the supremum over p of the content of the
/// composite K-homology map from level n + p down to level n.
struct DivisibilityObstruction {
  SupernaturalNumber value;
  /// The composites eventually vanish, so every integer divides.
  bool forces_zero = false;
  Confidence confidence = Confidence::exact;
  std::vector<std::string> notes;

  bool is_infinite() const { return forces_zero || !value.infinite_support().is_one(); }
  std::string text() const;
};

DivisibilityObstruction divisibility_obstruction(const BratteliDiagram& diagram,
                                                 std::size_t level,
                                                 std::size_t horizon = default_horizon);

inline constexpr std::size_t default_pairing_levels = 6;

/// Every even pairing with the class x at level n vanishes. Combines an
/// infinite divisibility obstruction with pairing naturality checked exactly
/// on up to `extra_levels` materialized levels. Throws obstruction_finite when
/// the obstruction does not force vanishing.
Certificate pairing_vanishing_certificate(const BratteliDiagram& diagram, std::size_t level,
                                          const IntVector& x,
                                          std::size_t extra_levels = default_pairing_levels);

struct DualityEntry {
  std::size_t level = 0;
  std::size_t module_block = 0;
  std::size_t projection_block = 0;
  Rational value;
};

struct AnalysisReport {
  std::string diagram_name;
  std::string diagram_kind;
  std::vector<std::size_t> blocks_per_level;
  bool finite = false;
  std::size_t horizon = 0;

  GroupDescriptor k0 = GroupDescriptor::zero();
  GroupDescriptor k1 = GroupDescriptor::zero();
  GroupDescriptor kk0 = GroupDescriptor::zero();
  GroupDescriptor kk1 = GroupDescriptor::zero();

  Tower k0_tower;
  Tower even_tower;
  Tower odd_tower;
  MLVerdict even_ml = MLVerdict::unknown;
  DivisibilityObstruction obstruction;
  std::vector<Certificate> certificates;
  std::vector<DualityEntry> pairing_summary;

  /// Any descriptor that is only horizon-certified.
  bool has_inexact() const;
};

AnalysisReport full_report(const BratteliDiagram& diagram, std::size_t horizon = default_horizon);

using Json = nlohmann::ordered_json;

Json to_json(const GroupDescriptor& d);
Json to_json(const Certificate& c);
Json to_json(const Tower& t);
Json to_json(const DivisibilityObstruction& o);
Json to_json(const AnalysisReport& r);

/// "Z[1/2]  [Localization(2^∞), exact]"
std::string describe(const GroupDescriptor& d);

/// Human-readable multi-line rendering.
std::string to_text(const AnalysisReport& r);

}  // namespace afk
