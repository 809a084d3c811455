#include "afk/limits.hpp"

#include "afk/error.hpp"

#include <algorithm>
#include <cassert>

namespace afk {

std::string_view to_string(Confidence c) {
  return c == Confidence::exact ? "exact" : "horizon-certified";
}

std::string_view to_string(DescriptorVariant v) {
  switch (v) {
    case DescriptorVariant::zero: return "Zero";
    case DescriptorVariant::free_abelian: return "FreeAbelian";
    case DescriptorVariant::localization: return "Localization";
    case DescriptorVariant::profinite_quotient: return "ProfiniteQuotient";
    case DescriptorVariant::direct_limit_presentation: return "DirectLimitPresentation";
    case DescriptorVariant::nonzero_uncountable_lim1: return "NonzeroUncountableLim1";
  }
  return "unknown";
}

std::string_view to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::image_chain_stabilized: return "image-chain-stabilized";
    case CertificateKind::strictly_decreasing_witness: return "strictly-decreasing-witness";
    case CertificateKind::injectivity: return "injectivity";
    case CertificateKind::horizon_exhausted: return "horizon-exhausted";
    case CertificateKind::unit_core: return "unit-core";
    case CertificateKind::exact_sequence: return "exact-sequence";
    case CertificateKind::pairing_vanishing: return "pairing-vanishing";
  }
  return "unknown";
}

std::string_view to_string(MLVerdict v) {
  switch (v) {
    case MLVerdict::holds: return "holds";
    case MLVerdict::fails: return "fails";
    case MLVerdict::unknown: return "unknown";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// GroupDescriptor

GroupDescriptor GroupDescriptor::zero(Confidence c) { return {DescriptorVariant::zero, c}; }

GroupDescriptor GroupDescriptor::free_abelian(std::size_t rank, Confidence c) {
  if (rank == 0) return zero(c);
  GroupDescriptor d{DescriptorVariant::free_abelian, c};
  d.rank_ = rank;
  return d;
}

GroupDescriptor GroupDescriptor::localization(const SupernaturalNumber& s, Confidence c) {
  SupernaturalNumber inf = s.infinite_support();
  if (inf.is_one()) return free_abelian(1, c);
  GroupDescriptor d{DescriptorVariant::localization, c};
  d.rank_ = 1;
  d.supernatural_ = std::move(inf);
  return d;
}

GroupDescriptor GroupDescriptor::profinite_quotient(const SupernaturalNumber& s, Confidence c) {
  SupernaturalNumber inf = s.infinite_support();
  if (inf.is_one()) {
    throw Error(ErrorKind::invalid_argument,
                "profinite quotient needs an infinite supernatural number, got " + to_string(s));
  }
  GroupDescriptor d{DescriptorVariant::profinite_quotient, c};
  d.supernatural_ = std::move(inf);
  return d;
}

GroupDescriptor GroupDescriptor::direct_limit_presentation(std::size_t rank, Confidence c) {
  GroupDescriptor d{DescriptorVariant::direct_limit_presentation, c};
  d.rank_ = rank;
  return d;
}

GroupDescriptor GroupDescriptor::nonzero_uncountable_lim1(std::size_t witness_level, Confidence c) {
  GroupDescriptor d{DescriptorVariant::nonzero_uncountable_lim1, c};
  d.witness_level_ = witness_level;
  return d;
}

namespace {

// "2", "6", or the full supernatural rendering when that is not a plain radical.
std::string radical_label(const SupernaturalNumber& s) {
  Integer product = 1;
  for (const auto& [p, e] : s.exponents()) {
    if (!e.is_infinite()) return to_string(s);
    product *= p;
  }
  return product.get_str();
}

}  // namespace

std::string GroupDescriptor::text() const {
  switch (variant_) {
    case DescriptorVariant::zero: return "0";
    case DescriptorVariant::free_abelian: return rank_ == 1 ? "Z" : "Z^" + std::to_string(rank_);
    case DescriptorVariant::localization: return "Z[1/" + radical_label(supernatural_) + "]";
    case DescriptorVariant::profinite_quotient: return "Z_" + radical_label(supernatural_) + "-hat/Z";
    case DescriptorVariant::direct_limit_presentation:
      return "lim->(Z^" + std::to_string(rank_) + ", M_n)";
    case DescriptorVariant::nonzero_uncountable_lim1:
      return "nonzero uncountable lim^1 (witness level " + std::to_string(witness_level_) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

void require_direction(const Tower& t, Direction d, const char* op) {
  if (t.direction != d) {
    throw Error(ErrorKind::wrong_direction, std::string(op) + " needs a " +
                                                std::string(to_string(d)) + " tower, got " +
                                                std::string(to_string(t.direction)));
  }
}

void require_horizon(const Tower& t, std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorKind::horizon_overflow, "horizon must be at least 1");
  if (t.is_finite() && horizon > t.depth()) {
    throw Error(ErrorKind::horizon_overflow, "horizon " + std::to_string(horizon) +
                                                 " exceeds the finite tower depth " +
                                                 std::to_string(t.depth()));
  }
}

struct PeriodicCore {
  std::size_t start = 0;
  std::size_t period = 1;
  std::size_t rank = 0;
  IntMatrix T;  // composite over one period at `start`, rank x rank
};

PeriodicCore periodic_core(const Tower& t) {
  assert(t.tail);
  PeriodicCore c;
  c.start = t.tail->start;
  c.period = t.tail->cycle.size();
  c.rank = t.rank(c.start);
  c.T = t.composite(c.start, c.start + c.period);
  if (c.T.rows() != c.T.cols()) {
    throw Error(ErrorKind::shape_mismatch, "periodic tail does not return to the same rank");
  }
  return c;
}

// Image chain im(T^m), m = 0..power+1, for a stationary tower.
struct StationaryDecision {
  bool holds = false;
  // holds: im(T^power) == im(T^{power+1}).
  // fails: ranks agree at power, power+1 and the inclusion is strict.
  std::size_t power = 0;
  std::vector<Lattice> images;
};

StationaryDecision decide_stationary(const IntMatrix& T) {
  const std::size_t k = T.rows();
  StationaryDecision d;
  IntMatrix power = IntMatrix::identity(k);
  d.images.push_back(Lattice::full(k));
  for (std::size_t m = 0;; ++m) {
    power = power * T;
    d.images.push_back(image_lattice(power));
    const Lattice& cur = d.images[m];
    const Lattice& next = d.images[m + 1];
    if (cur == next) {
      d.holds = true;
      d.power = m;
      return d;
    }
    if (cur.rank() == next.rank()) {
      d.holds = false;
      d.power = m;
      return d;
    }
    // Rank strictly drops at most k times.
    assert(m <= k);
  }
}

std::size_t stabilization_in(const std::vector<Lattice>& chain, std::size_t period,
                             bool& found) {
  for (std::size_t j = 0; j + period < chain.size(); ++j) {
    if (chain[j] == chain[j + period]) {
      found = true;
      return j;
    }
  }
  found = false;
  return 0;
}

IntPolynomial strip_zero_roots(const IntPolynomial& p) {
  std::size_t lead = 0;
  while (lead < p.size() && sgn(p[lead]) == 0) ++lead;
  return IntPolynomial(p.begin() + static_cast<std::ptrdiff_t>(lead), p.end());
}

// Alive directions estimated from elementary divisors that did not grow
// between two consecutive powers.
std::size_t alive_estimate(const IntMatrix& T, std::size_t power) {
  IntMatrix a = IntMatrix::identity(T.rows());
  for (std::size_t i = 0; i < power; ++i) a = a * T;
  IntVector before = elementary_divisors(a);
  IntVector after = elementary_divisors(a * T);
  std::size_t alive = 0;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (sgn(after[i]) != 0 && before[i] == after[i]) ++alive;
  return alive;
}

Certificate finite_chain_certificate(const Tower& t, std::size_t level) {
  Certificate c;
  c.kind = CertificateKind::image_chain_stabilized;
  c.level = level;
  c.step = t.depth() - level;
  c.chain = image_chain(t, level, t.depth() - level);
  c.notes.push_back("finite tower: the chain at level " + std::to_string(level) +
                    " ends at the top level " + std::to_string(t.depth()));
  return c;
}

// Certificates shared by lim, lim^1 and Mittag-Leffler for periodic towers.
struct PeriodicAnalysis {
  PeriodicCore core;
  StationaryDecision decision;
  Certificate primary;
};

PeriodicAnalysis analyze_periodic(const Tower& t, std::size_t horizon) {
  PeriodicAnalysis a;
  a.core = periodic_core(t);
  a.decision = decide_stationary(a.core.T);
  const std::size_t p = a.core.period;
  const std::size_t s = a.core.start;
  const std::size_t needed = p * (a.decision.power + 2);
  const std::size_t length = std::max(horizon > s ? horizon - s : 0, needed);

  Certificate& c = a.primary;
  c.level = s;
  c.period = p;
  c.step = a.decision.power * p;
  c.chain = image_chain(t, s, length);
  c.matrices.push_back(a.core.T);
  const std::string where = "level " + std::to_string(s);
  if (a.decision.holds) {
    c.kind = CertificateKind::image_chain_stabilized;
    c.notes.push_back("image chain at " + where + " satisfies im(T^" +
                      std::to_string(a.decision.power) + ") = im(T^" +
                      std::to_string(a.decision.power + 1) +
                      ") for the period composite T; equality propagates to all later powers");
  } else {
    const Lattice& cur = a.decision.images[a.decision.power];
    const Lattice& next = a.decision.images[a.decision.power + 1];
    c.kind = CertificateKind::strictly_decreasing_witness;
    c.notes.push_back("rank of im(T^m) is constant (" + std::to_string(cur.rank()) +
                      ") from m = " + std::to_string(a.decision.power) +
                      " and the inclusion im(T^" + std::to_string(a.decision.power + 1) +
                      ") < im(T^" + std::to_string(a.decision.power) +
                      ") is strict; T is injective on that span, so every later inclusion "
                      "has the same index > 1 and the chain decreases forever");
    (void)next;
  }
  return a;
}

}  // namespace

std::vector<Lattice> image_chain(const Tower& tower, std::size_t level, std::size_t length) {
  require_direction(tower, Direction::contravariant, "image_chain");
  std::vector<Lattice> chain;
  chain.reserve(length + 1);
  IntMatrix acc = IntMatrix::identity(tower.rank(level));
  chain.push_back(image_lattice(acc));
  for (std::size_t j = 0; j < length; ++j) {
    acc = acc * tower.step(level + j);
    chain.push_back(image_lattice(acc));
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Unit part of a characteristic polynomial

namespace {

constexpr std::size_t candidate_budget = 200000;
constexpr std::size_t max_search_degree = 24;

std::vector<Integer> signed_divisors(const Integer& n) {
  std::vector<Integer> divs{1};
  for (const auto& [p, e] : factorize(abs(n))) {
    const std::size_t base = divs.size();
    Integer pk = 1;
    for (std::uint64_t k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  std::vector<Integer> out;
  out.reserve(2 * divs.size());
  for (const auto& d : divs) {
    out.push_back(d);
    out.push_back(-d);
  }
  return out;
}

// Monic g of degree e with g(points[i]) = values[i]; false if not integral.
bool interpolate_monic(std::size_t e, const std::vector<Integer>& points,
                       const std::vector<Integer>& values, IntPolynomial& g) {
  // q = g - x^e has degree < e; Newton divided differences over Q.
  std::vector<mpq_class> dd(e);
  for (std::size_t i = 0; i < e; ++i) {
    Integer xe;
    mpz_pow_ui(xe.get_mpz_t(), points[i].get_mpz_t(), e);
    dd[i] = mpq_class(values[i] - xe);
  }
  for (std::size_t level = 1; level < e; ++level) {
    for (std::size_t i = e - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / mpq_class(points[i] - points[i - level]);
      if (i == level) break;
    }
  }
  // Expand c_0 + c_1 (x - x_0) + c_2 (x - x_0)(x - x_1) + ...
  std::vector<mpq_class> q(e, mpq_class(0));
  std::vector<mpq_class> basis{mpq_class(1)};
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) q[j] += dd[i] * basis[j];
    std::vector<mpq_class> next(basis.size() + 1, mpq_class(0));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      next[j + 1] += basis[j];
      next[j] -= basis[j] * mpq_class(points[i]);
    }
    basis = std::move(next);
  }
  g.assign(e + 1, Integer(0));
  for (std::size_t j = 0; j < e; ++j) {
    q[j].canonicalize();
    if (q[j].get_den() != 1) return false;
    g[j] = q[j].get_num();
  }
  g[e] = 1;
  return true;
}

enum class Search { found, none, exhausted };

// Monic divisor of r of degree e whose constant term is one of `constants`.
Search find_divisor(const IntPolynomial& r, std::size_t e, const std::vector<Integer>& constants,
                    IntPolynomial& found, std::size_t& budget) {
  std::vector<Integer> points{0};
  std::vector<std::vector<Integer>> choices{constants};
  for (long a = 1; points.size() < e; a = a > 0 ? -a : -a + 1) {
    Integer ra = evaluate(r, Integer(a));
    if (sgn(ra) == 0) continue;
    points.emplace_back(a);
    choices.push_back(signed_divisors(ra));
  }
  std::vector<std::size_t> idx(e, 0);
  std::vector<Integer> values(e);
  for (;;) {
    if (budget == 0) return Search::exhausted;
    --budget;
    for (std::size_t i = 0; i < e; ++i) values[i] = choices[i][idx[i]];
    IntPolynomial g, quotient;
    if (interpolate_monic(e, points, values, g) && divide_monic(r, g, quotient)) {
      found = std::move(g);
      return Search::found;
    }
    std::size_t i = 0;
    while (i < e && ++idx[i] == choices[i].size()) idx[i++] = 0;
    if (i == e) return Search::none;
  }
}

}  // namespace

bool unit_part(const IntPolynomial& h, IntPolynomial& unit) {
  IntPolynomial r(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(degree(h) + 1));
  if (r.empty() || r.back() != 1) throw Error(ErrorKind::invalid_argument, "unit_part needs a monic polynomial");
  if (sgn(r[0]) == 0) throw Error(ErrorKind::invalid_argument, "unit_part needs h(0) != 0");
  unit = {1};
  std::size_t budget = candidate_budget;
  for (;;) {
    const std::size_t dr = degree(r);
    if (dr == 0) return true;
    if (abs(r[0]) == 1) {
      unit = multiply(unit, r);
      return true;
    }
    if (dr > max_search_degree) return false;
    bool progressed = false;
    for (std::size_t d = 1; d < dr && !progressed; ++d) {
      IntPolynomial g;
      Search s;
      if (d <= dr - d) {
        s = find_divisor(r, d, {Integer(1), Integer(-1)}, g, budget);
      } else {
        IntPolynomial cofactor;
        s = find_divisor(r, dr - d, {r[0], -r[0]}, cofactor, budget);
        if (s == Search::found) {
          bool exact = divide_monic(r, cofactor, g);
          assert(exact);
          (void)exact;
        }
      }
      if (s == Search::exhausted) return false;
      if (s == Search::found) {
        IntPolynomial rest;
        divide_monic(r, g, rest);
        unit = multiply(unit, g);
        r = std::move(rest);
        progressed = true;
      }
    }
    if (!progressed) return true;
  }
}

// ---------------------------------------------------------------------------
// Supernatural products and direct limits

FactorProduct supernatural_of(const Tower& tower) {
  auto factor_of = [](const IntMatrix& m, std::size_t n) {
    if (m.rows() != 1 || m.cols() != 1) {
      throw Error(ErrorKind::invalid_argument,
                  "supernatural_of needs rank-1 groups; step " + std::to_string(n) + " is " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (sgn(m(0, 0)) == 0) {
      throw Error(ErrorKind::invalid_argument, "step " + std::to_string(n) + " is the zero map");
    }
    return abs(m(0, 0));
  };
  if (tower.base_rank != 1) {
    throw Error(ErrorKind::invalid_argument, "supernatural_of needs rank-1 groups");
  }
  FactorProduct out;
  if (tower.is_finite()) {
    out.finite_truncation = true;
    for (std::size_t n = 0; n < tower.depth(); ++n)
      out.value *= SupernaturalNumber::of(factor_of(tower.steps[n], n));
    return out;
  }
  const auto& tail = *tower.tail;
  for (std::size_t n = 0; n < tail.start; ++n)
    out.value *= SupernaturalNumber::of(factor_of(tower.step(n), n));
  for (std::size_t i = 0; i < tail.cycle.size(); ++i) {
    out.value = out.value.lcm(
        SupernaturalNumber::infinite_part_of(factor_of(tail.cycle[i], tail.start + i)));
  }
  // Also reject materialized steps that disagree in shape with the cycle.
  for (std::size_t n = tail.start; n < tower.depth(); ++n) factor_of(tower.steps[n], n);
  return out;
}

GroupDescriptor colim_descriptor(const Tower& tower) {
  require_direction(tower, Direction::covariant, "colim_descriptor");
  if (tower.is_finite()) return GroupDescriptor::free_abelian(tower.rank(tower.depth()));
  const auto& tail = *tower.tail;
  const std::size_t k = tower.rank(tail.start);
  bool rank_one = true;
  bool unimodular = true;
  for (const auto& m : tail.cycle) {
    if (m.rows() != 1 || m.cols() != 1) rank_one = false;
    if (!is_unimodular(m)) unimodular = false;
  }
  if (k == 0) return GroupDescriptor::zero();
  if (rank_one) {
    IntMatrix T = tower.composite(tail.start, tail.start + tail.cycle.size());
    if (sgn(T(0, 0)) == 0) return GroupDescriptor::zero();
    return GroupDescriptor::localization(SupernaturalNumber::infinite_part_of(abs(T(0, 0))));
  }
  if (unimodular) return GroupDescriptor::free_abelian(k);
  return GroupDescriptor::direct_limit_presentation(k);
}

// ---------------------------------------------------------------------------
// Inverse limits

LimitVerdict lim_descriptor(const Tower& tower, std::size_t horizon) {
  require_direction(tower, Direction::contravariant, "lim_descriptor");
  require_horizon(tower, horizon);
  LimitVerdict v{GroupDescriptor::zero(), {}};
  if (tower.is_finite()) {
    v.descriptor = GroupDescriptor::free_abelian(tower.rank(tower.depth()));
    v.certificates.push_back(finite_chain_certificate(tower, 0));
    v.certificates.back().notes.push_back("the inverse limit of a finite tower is its top group");
    return v;
  }
  PeriodicAnalysis a = analyze_periodic(tower, horizon);
  v.certificates.push_back(a.primary);
  if (a.decision.holds) {
    const std::size_t r = a.decision.images[a.decision.power].rank();
    v.descriptor = GroupDescriptor::free_abelian(r);
    v.certificates.back().notes.push_back(
        "the limit projects isomorphically onto the stable image, rank " + std::to_string(r));
    return v;
  }
  if (a.core.rank == 1) {
    v.certificates.back().notes.push_back(
        "a compatible sequence needs a_n divisible by every power of the period factor, so a_n = 0");
    return v;
  }
  const IntPolynomial chi = characteristic_polynomial(a.core.T);
  const IntPolynomial h = strip_zero_roots(chi);
  IntPolynomial u;
  if (unit_part(h, u)) {
    IntPolynomial dead;
    divide_monic(h, u, dead);
    Certificate c;
    c.kind = CertificateKind::unit_core;
    c.level = a.core.start;
    c.period = a.core.period;
    c.matrices.push_back(a.core.T);
    c.polynomials = {h, u, dead};
    c.notes.push_back("characteristic polynomial of T without zero roots: " + polynomial_to_string(h));
    c.notes.push_back("unit factors (constant term +-1): " + polynomial_to_string(u));
    c.notes.push_back("remaining factors have no monic divisor with constant term +-1: " +
                      polynomial_to_string(dead));
    c.notes.push_back("the limit is the lattice on which T acts unimodularly, of rank deg " +
                      std::to_string(degree(u)));
    v.certificates.push_back(std::move(c));
    v.descriptor = GroupDescriptor::free_abelian(degree(u));
    return v;
  }
  const std::size_t powers =
      std::max<std::size_t>(a.core.rank + 1, (horizon > a.core.start ? horizon - a.core.start : 0) /
                                                 a.core.period);
  const std::size_t alive = alive_estimate(a.core.T, powers);
  Certificate c;
  c.kind = CertificateKind::horizon_exhausted;
  c.level = a.core.start;
  c.step = powers;
  c.notes.push_back("unit-core factor search exceeded its budget; " + std::to_string(alive) +
                    " elementary divisors of T^" + std::to_string(powers) + " did not grow");
  v.certificates.push_back(std::move(c));
  v.descriptor = GroupDescriptor::free_abelian(alive, Confidence::horizon_certified);
  return v;
}

MittagLefflerResult mittag_leffler(const Tower& tower, std::size_t horizon) {
  require_direction(tower, Direction::contravariant, "mittag_leffler");
  require_horizon(tower, horizon);
  MittagLefflerResult r;
  if (tower.is_finite()) {
    r.verdict = MLVerdict::holds;
    for (std::size_t n = 0; n < tower.depth(); ++n)
      r.certificates.push_back(finite_chain_certificate(tower, n));
    return r;
  }
  PeriodicAnalysis a = analyze_periodic(tower, horizon);
  if (!a.decision.holds) {
    r.verdict = MLVerdict::fails;
    r.certificates.push_back(std::move(a.primary));
    return r;
  }
  r.verdict = MLVerdict::holds;
  r.certificates.push_back(a.primary);
  // Levels below the start of the tail and the other residues of the period.
  const std::size_t s = a.core.start;
  const std::size_t p = a.core.period;
  for (std::size_t n = 0; n < s + p; ++n) {
    if (n == s) continue;
    const std::size_t bound = (s > n ? s - n : 0) + p * (tower.rank(n) + a.core.rank + 3);
    Certificate c;
    c.kind = CertificateKind::image_chain_stabilized;
    c.level = n;
    c.period = p;
    c.chain = image_chain(tower, n, bound);
    bool found = false;
    c.step = stabilization_in(c.chain, p, found);
    if (!found) {
      c.kind = CertificateKind::horizon_exhausted;
      c.notes.push_back("no stabilization observed within " + std::to_string(bound) + " steps");
    }
    r.certificates.push_back(std::move(c));
  }
  return r;
}

LimitVerdict lim1_descriptor(const Tower& tower, std::size_t horizon) {
  require_direction(tower, Direction::contravariant, "lim1_descriptor");
  require_horizon(tower, horizon);
  MittagLefflerResult ml = mittag_leffler(tower, horizon);
  LimitVerdict v{GroupDescriptor::zero(), std::move(ml.certificates)};
  if (ml.verdict == MLVerdict::holds) return v;
  if (ml.verdict == MLVerdict::unknown) {
    v.descriptor = GroupDescriptor::direct_limit_presentation(tower.rank(0), Confidence::horizon_certified);
    return v;
  }
  const PeriodicCore core = periodic_core(tower);
  if (core.rank == 1) {
    v.descriptor = GroupDescriptor::profinite_quotient(
        SupernaturalNumber::infinite_part_of(abs(core.T(0, 0))));
    return v;
  }
  v.descriptor = GroupDescriptor::nonzero_uncountable_lim1(core.start);
  return v;
}

// ---------------------------------------------------------------------------
// Certificates

bool recheck(const Tower& tower, const Certificate& cert) {
  auto chain_matches = [&] {
    if (cert.chain.empty()) return false;
    return image_chain(tower, cert.level, cert.chain.size() - 1) == cert.chain;
  };
  switch (cert.kind) {
    case CertificateKind::image_chain_stabilized: {
      if (!chain_matches()) return false;
      if (cert.step + cert.period < cert.chain.size())
        return cert.chain[cert.step] == cert.chain[cert.step + cert.period];
      return tower.is_finite() && cert.level + cert.step == tower.depth();
    }
    case CertificateKind::strictly_decreasing_witness: {
      if (!chain_matches()) return false;
      const std::size_t p = cert.period;
      if (cert.step + p >= cert.chain.size()) return false;
      if (cert.chain[cert.step].rank() != cert.chain[cert.step + p].rank()) return false;
      for (std::size_t j = cert.step; j + p < cert.chain.size(); ++j) {
        if (!cert.chain[j].contains(cert.chain[j + p])) return false;
        if (cert.chain[j] == cert.chain[j + p]) return false;
      }
      return true;
    }
    case CertificateKind::injectivity:
      return std::all_of(cert.matrices.begin(), cert.matrices.end(),
                         [](const IntMatrix& m) { return is_injective(m); });
    case CertificateKind::unit_core: {
      if (cert.matrices.size() != 1 || cert.polynomials.size() != 3) return false;
      const auto& h = cert.polynomials[0];
      const auto& u = cert.polynomials[1];
      const auto& dead = cert.polynomials[2];
      if (strip_zero_roots(characteristic_polynomial(cert.matrices[0])) != h) return false;
      if (multiply(u, dead) != h) return false;
      if (abs(u[0]) != 1) return false;
      IntPolynomial again;
      return unit_part(dead, again) && degree(again) == 0;
    }
    case CertificateKind::horizon_exhausted:
    case CertificateKind::exact_sequence:
    case CertificateKind::pairing_vanishing:
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Direct-limit elements

LimitElement colim_inject(std::shared_ptr<const Tower> tower, std::size_t level, IntVector v) {
  if (!tower) throw Error(ErrorKind::invalid_argument, "null tower");
  require_direction(*tower, Direction::covariant, "colim_inject");
  if (tower->is_finite() && level > tower->depth()) {
    throw Error(ErrorKind::depth_overflow, "level " + std::to_string(level) +
                                               " beyond tower depth " +
                                               std::to_string(tower->depth()));
  }
  if (v.size() != tower->rank(level)) {
    throw Error(ErrorKind::shape_mismatch, "vector of length " + std::to_string(v.size()) +
                                               " at a level of rank " +
                                               std::to_string(tower->rank(level)));
  }
  return {std::move(tower), level, std::move(v)};
}

LimitElement colim_raise(const LimitElement& x, std::size_t level) {
  if (level < x.level) throw Error(ErrorKind::invalid_argument, "cannot lower a limit element");
  LimitElement out = x;
  for (std::size_t n = x.level; n < level; ++n) out.vector = x.tower->step(n) * out.vector;
  out.level = level;
  return out;
}

namespace {

void require_same_tower(const LimitElement& x, const LimitElement& y) {
  if (x.tower != y.tower && !(x.tower && y.tower && *x.tower == *y.tower)) {
    throw Error(ErrorKind::mixed_towers, "limit elements belong to different towers");
  }
}

}  // namespace

LimitElement colim_add(const LimitElement& x, const LimitElement& y) {
  require_same_tower(x, y);
  const std::size_t level = std::max(x.level, y.level);
  LimitElement a = colim_raise(x, level);
  LimitElement b = colim_raise(y, level);
  for (std::size_t i = 0; i < a.vector.size(); ++i) a.vector[i] += b.vector[i];
  return a;
}

LimitElement colim_negate(const LimitElement& x) {
  LimitElement out = x;
  for (auto& e : out.vector) e = -e;
  return out;
}

ColimComparison colim_equal(const LimitElement& x, const LimitElement& y) {
  require_same_tower(x, y);
  const Tower& t = *x.tower;
  const std::size_t level = std::max(x.level, y.level);
  LimitElement diff = colim_add(colim_raise(x, level), colim_negate(colim_raise(y, level)));

  ColimComparison out;
  out.certificate.level = level;
  if (is_zero(diff.vector)) {
    out.equal = true;
    out.certificate.kind = CertificateKind::image_chain_stabilized;
    out.certificate.notes.push_back("representatives agree at level " + std::to_string(level));
    return out;
  }

  // Finite towers: the direct limit is the top group.
  if (t.is_finite()) {
    LimitElement top = colim_raise(diff, t.depth());
    out.equal = is_zero(top.vector);
    out.certificate.kind = CertificateKind::image_chain_stabilized;
    out.certificate.step = t.depth() - level;
    out.certificate.notes.push_back(std::string("difference at the top level is ") +
                                    (out.equal ? "zero" : "nonzero"));
    return out;
  }

  const auto& tail = *t.tail;
  const std::size_t p = tail.cycle.size();
  const std::size_t aligned =
      level <= tail.start ? tail.start
                          : tail.start + ((level - tail.start + p - 1) / p) * p;

  // All maps from `level` on injective: nonzero classes never die.
  Certificate inj;
  inj.kind = CertificateKind::injectivity;
  inj.level = level;
  for (std::size_t n = level; n < aligned + p; ++n) inj.matrices.push_back(t.step(n));
  if (recheck(t, inj)) {
    out.equal = false;
    inj.notes.push_back("every step from level " + std::to_string(level) +
                        " through one full period is injective");
    out.certificate = std::move(inj);
    return out;
  }

  // Otherwise kernels of T^m stabilize within rank + 1 periods.
  const std::size_t bound = aligned + p * (t.rank(aligned) + 1);
  LimitElement cur = diff;
  for (std::size_t n = level; n < bound; ++n) {
    cur = colim_raise(cur, n + 1);
    if (is_zero(cur.vector)) {
      out.equal = true;
      out.certificate.kind = CertificateKind::image_chain_stabilized;
      out.certificate.step = n + 1 - level;
      out.certificate.notes.push_back("difference vanishes at level " + std::to_string(n + 1));
      return out;
    }
  }
  out.equal = false;
  out.certificate.kind = CertificateKind::image_chain_stabilized;
  out.certificate.step = bound - level;
  out.certificate.notes.push_back("difference survives to level " + std::to_string(bound) +
                                  ", past the point where kernels of the period composite stabilize");
  return out;
}

}  // namespace afk
