#pragma once

// Direct limits, inverse limits and lim^1 of towers of finitely generated free
// abelian groups.
//
// Finite towers are analysed exactly through their top level. Towers with a
// periodic tail are reduced to the stationary tower of the period composite T
// (lim and lim^1 only depend on a cofinal subtower). For a stationary tower
// the image chain im(T^m) either stabilizes, which propagates to every later
// power, or has constant rank and index > 1 from some power on, which makes it
// strictly decreasing forever. Both cases are detected within k+1 powers of a
// k x k matrix, so every verdict below is exact except where the unit-core
// factor search gives up.

#include "afk/bratteli.hpp"
#include "afk/exactlin.hpp"
#include "afk/supernatural.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace afk {

inline constexpr std::size_t default_horizon = 24;

enum class Confidence { exact, horizon_certified };
std::string_view to_string(Confidence c);

enum class DescriptorVariant {
  zero,
  free_abelian,
  localization,
  profinite_quotient,
  direct_limit_presentation,
  nonzero_uncountable_lim1,
};
std::string_view to_string(DescriptorVariant v);

/// Symbolic answer for an abelian group.
///
/// Localization(S) is Z[1/S] and ProfiniteQuotient(S) is Ẑ_S / Z. Both only
/// depend on S up to finitely many prime factors, so S is normalized to the
/// primes carrying an infinite exponent; a Localization whose S becomes 1 is
/// FreeAbelian(1).
class GroupDescriptor {
 public:
  static GroupDescriptor zero(Confidence c = Confidence::exact);
  static GroupDescriptor free_abelian(std::size_t rank, Confidence c = Confidence::exact);
  static GroupDescriptor localization(const SupernaturalNumber& s, Confidence c = Confidence::exact);
  /// Requires some infinite exponent in s.
  static GroupDescriptor profinite_quotient(const SupernaturalNumber& s,
                                            Confidence c = Confidence::exact);
  static GroupDescriptor direct_limit_presentation(std::size_t rank,
                                                   Confidence c = Confidence::exact);
  static GroupDescriptor nonzero_uncountable_lim1(std::size_t witness_level,
                                                  Confidence c = Confidence::exact);

  DescriptorVariant variant() const noexcept { return variant_; }
  Confidence confidence() const noexcept { return confidence_; }
  bool is_exact() const noexcept { return confidence_ == Confidence::exact; }
  /// FreeAbelian rank, or the stable rank of a direct-limit presentation.
  std::size_t rank() const noexcept { return rank_; }
  const SupernaturalNumber& supernatural() const noexcept { return supernatural_; }
  std::size_t witness_level() const noexcept { return witness_level_; }

  /// "0", "Z", "Z^2", "Z[1/2]", "Z_2-hat/Z", ...
  std::string text() const;

  friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;

 private:
  GroupDescriptor(DescriptorVariant v, Confidence c) : variant_(v), confidence_(c) {}

  DescriptorVariant variant_;
  Confidence confidence_;
  std::size_t rank_ = 0;
  SupernaturalNumber supernatural_;
  std::size_t witness_level_ = 0;
};

enum class CertificateKind {
  image_chain_stabilized,
  strictly_decreasing_witness,
  injectivity,
  horizon_exhausted,
  unit_core,
  exact_sequence,
  pairing_vanishing,
};
std::string_view to_string(CertificateKind k);

/// Evidence for a verdict. chain[j] is the image of level + j in level
/// (contravariant towers). Every payload can be re-checked with exactlin.
struct Certificate {
  CertificateKind kind = CertificateKind::horizon_exhausted;
  std::size_t level = 0;
  /// Stabilization index, or the power from which the index is constant.
  std::size_t step = 0;
  /// Length of the tower's period; chains are compared `period` apart.
  std::size_t period = 1;
  std::vector<Lattice> chain;
  std::vector<IntMatrix> matrices;
  std::vector<IntPolynomial> polynomials;
  std::vector<std::string> notes;
};

/// Re-derives the payload from the tower with exactlin operations only.
bool recheck(const Tower& tower, const Certificate& cert);

struct FactorProduct {
  SupernaturalNumber value;
  /// Set for finite towers: the product covers only the materialized steps.
  bool finite_truncation = false;
};

/// Product of the step factors of a tower whose groups all have rank 1.
FactorProduct supernatural_of(const Tower& tower);

GroupDescriptor colim_descriptor(const Tower& tower);

struct LimitVerdict {
  GroupDescriptor descriptor;
  std::vector<Certificate> certificates;
};

LimitVerdict lim_descriptor(const Tower& tower, std::size_t horizon = default_horizon);
LimitVerdict lim1_descriptor(const Tower& tower, std::size_t horizon = default_horizon);

enum class MLVerdict { holds, fails, unknown };
std::string_view to_string(MLVerdict v);

struct MittagLefflerResult {
  MLVerdict verdict = MLVerdict::unknown;
  std::vector<Certificate> certificates;
};

MittagLefflerResult mittag_leffler(const Tower& tower, std::size_t horizon = default_horizon);

/// Image chain im(G_{level+j} -> G_level) for j = 0..length (contravariant).
std::vector<Lattice> image_chain(const Tower& tower, std::size_t level, std::size_t length);

/// Largest monic divisor of h with constant term ±1, found by an exhaustive
/// search over candidate factor values. Returns false if the search exceeded
/// its budget. h must be monic with h(0) != 0.
bool unit_part(const IntPolynomial& h, IntPolynomial& unit);

/// Element of the direct limit of a covariant tower, represented at a level.
struct LimitElement {
  std::shared_ptr<const Tower> tower;
  std::size_t level = 0;
  IntVector vector;
};

LimitElement colim_inject(std::shared_ptr<const Tower> tower, std::size_t level, IntVector v);
LimitElement colim_add(const LimitElement& x, const LimitElement& y);
LimitElement colim_negate(const LimitElement& x);
/// Pushes an element to a higher level of its tower.
LimitElement colim_raise(const LimitElement& x, std::size_t level);

struct ColimComparison {
  bool equal = false;
  Certificate certificate;
};

ColimComparison colim_equal(const LimitElement& x, const LimitElement& y);

}  // namespace afk
