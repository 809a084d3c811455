#include "afk/khom.hpp"

#include "afk/error.hpp"

#include <algorithm>
#include <sstream>

namespace afk {

std::size_t effective_horizon(const BratteliDiagram& diagram, std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorKind::horizon_overflow, "horizon must be at least 1");
  if (auto depth = diagram.finite_depth()) return std::min(horizon, *depth);
  return horizon;
}

std::size_t analysis_depth(const BratteliDiagram& diagram, std::size_t horizon) {
  if (auto depth = diagram.finite_depth()) return *depth;
  return horizon;
}

namespace {

Certificate single_level_certificate(std::size_t rank) {
  Certificate c;
  c.kind = CertificateKind::image_chain_stabilized;
  c.chain = {Lattice::full(rank)};
  c.notes.push_back("single-level diagram: the tower is constant and its limit is the level-0 group");
  return c;
}

}  // namespace

MilnorAssembly milnor_assemble(const BratteliDiagram& diagram, std::size_t horizon) {
  const std::size_t h = effective_horizon(diagram, horizon);
  const std::size_t depth = analysis_depth(diagram, horizon);
  MilnorAssembly out;
  out.even = khomology_tower(diagram, depth);
  out.odd = zero_tower(Direction::contravariant, depth);

  const LimitVerdict odd_lim = lim_descriptor(out.odd, std::max<std::size_t>(h, 1));
  const LimitVerdict odd_lim1 = lim1_descriptor(out.odd, std::max<std::size_t>(h, 1));
  if (odd_lim.descriptor != GroupDescriptor::zero() ||
      odd_lim1.descriptor != GroupDescriptor::zero()) {
    throw Error(ErrorKind::invalid_argument, "odd K-homology tower is not trivial");
  }

  if (h == 0) {
    const std::size_t k = diagram.blocks(0);
    out.kk0 = GroupDescriptor::free_abelian(k);
    out.kk1 = GroupDescriptor::zero();
    out.even_ml = MLVerdict::holds;
    out.certificates.push_back(single_level_certificate(k));
  } else {
    LimitVerdict lim = lim_descriptor(out.even, h);
    LimitVerdict lim1 = lim1_descriptor(out.even, h);
    out.even_ml = mittag_leffler(out.even, h).verdict;
    out.kk0 = lim.descriptor;
    out.kk1 = lim1.descriptor;
    for (auto& c : lim.certificates) out.certificates.push_back(std::move(c));
    for (auto& c : lim1.certificates) {
      const bool duplicate = std::any_of(
          out.certificates.begin(), out.certificates.end(), [&](const Certificate& o) {
            return o.kind == c.kind && o.level == c.level && o.step == c.step &&
                   o.chain == c.chain;
          });
      if (!duplicate) out.certificates.push_back(std::move(c));
    }
  }

  Certificate seq;
  seq.kind = CertificateKind::exact_sequence;
  seq.notes.push_back("KK^1(A_n) = 0 at every level, so lim KK^1(A_n) = 0 and lim^1 KK^1(A_n) = 0");
  seq.notes.push_back("0 -> lim^1 KK^1(A_n) = 0 -> KK^0(A) -> lim KK^0(A_n) -> 0 gives KK^0(A) = " +
                      out.kk0.text());
  seq.notes.push_back("0 -> lim^1 KK^0(A_n) -> KK^1(A) -> lim KK^1(A_n) = 0 -> 0 gives KK^1(A) = " +
                      out.kk1.text());
  seq.notes.push_back("one end of each sequence vanishes, so there is no extension problem");
  out.certificates.push_back(std::move(seq));
  return out;
}

// ---------------------------------------------------------------------------
// Divisibility obstruction

std::string DivisibilityObstruction::text() const {
  if (forces_zero) return "0 (every integer divides)";
  return to_pretty_string(value);
}

namespace {

Integer content_of(const IntMatrix& m) {
  Integer g = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g = gcd(g, m(i, j));
  return g;
}

std::uint64_t valuation(Integer n, const Integer& p) {
  std::uint64_t v = 0;
  while (sgn(n) != 0 && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

IntMatrix power(const IntMatrix& m, std::size_t e) {
  IntMatrix r = IntMatrix::identity(m.rows());
  for (std::size_t i = 0; i < e; ++i) r = r * m;
  return r;
}

bool nilpotent_mod(const IntMatrix& u, const Integer& p) {
  IntMatrix t = power(u, u.rows());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j)
      if (t(i, j) % p != 0) return false;
  return true;
}

}  // namespace

DivisibilityObstruction divisibility_obstruction(const BratteliDiagram& diagram,
                                                 std::size_t level, std::size_t horizon) {
  DivisibilityObstruction out;
  if (auto depth = diagram.finite_depth()) {
    if (level > *depth) {
      throw Error(ErrorKind::depth_overflow, "level " + std::to_string(level) +
                                                 " beyond diagram depth " + std::to_string(*depth));
    }
    const Tower t = khomology_tower(diagram, *depth);
    const Integer c = content_of(t.composite(level, *depth));
    if (sgn(c) == 0) out.forces_zero = true;
    else out.value = SupernaturalNumber::of(c);
    out.notes.push_back("finite diagram: content of the composite from the top level " +
                        std::to_string(*depth) + " down to level " + std::to_string(level));
    return out;
  }

  const Tower t = khomology_tower(diagram, 0);
  const auto& tail = *t.tail;
  const std::size_t p = tail.cycle.size();
  const std::size_t base = std::max(level, tail.start);
  const IntMatrix P = t.composite(level, base);
  const IntMatrix U = t.composite(base, base + p);
  const std::size_t k = U.rows();

  // Mittag-Leffler case: the images stabilize, so does their content.
  IntMatrix Um = IntMatrix::identity(k);
  Lattice cur = Lattice::full(k);
  for (std::size_t m = 0; m <= k; ++m) {
    IntMatrix next = Um * U;
    Lattice nl = image_lattice(next);
    if (nl == cur) {
      const Integer c = content_of(P * Um);
      if (sgn(c) == 0) out.forces_zero = true;
      else out.value = SupernaturalNumber::of(c);
      out.notes.push_back("images of the composites stabilize after " + std::to_string(m) +
                          " periods; the obstruction is the content of the stable image");
      return out;
    }
    if (nl.rank() == cur.rank()) break;
    Um = std::move(next);
    cur = std::move(nl);
  }

  const std::size_t powers = std::max<std::size_t>(2 * (k + 1), horizon / p);
  const IntMatrix far = P * power(U, powers);
  const IntMatrix near = P * power(U, powers / 2);
  const Integer c_far = content_of(far);
  if (sgn(c_far) == 0) {
    out.forces_zero = true;
    out.notes.push_back("composites vanish after " + std::to_string(powers) + " periods");
    return out;
  }
  const Integer c_near = content_of(near);
  const Integer det = determinant(U);
  if (sgn(det) == 0) out.confidence = Confidence::horizon_certified;
  for (const auto& [q, e] : factorize(abs(c_far))) {
    if (nilpotent_mod(U, q)) {
      out.value.multiply_prime(q, Exponent::infinite());
      out.notes.push_back("period composite is nilpotent mod " + q.get_str() + ": " + q.get_str() +
                          "^inf exactly");
    } else if (sgn(det) != 0 && det % q != 0) {
      out.value.multiply_prime(q, Exponent(e));
    } else if (valuation(c_near, q) < e) {
      out.value.multiply_prime(q, Exponent::infinite());
      out.confidence = Confidence::horizon_certified;
      out.notes.push_back("exponent of " + q.get_str() + " still growing after " +
                          std::to_string(powers) + " periods");
    } else {
      out.value.multiply_prime(q, Exponent(e));
      out.confidence = Confidence::horizon_certified;
    }
  }
  // Nilpotent primes dividing the determinant but not yet the content.
  if (sgn(det) != 0) {
    for (const auto& [q, e] : factorize(abs(det))) {
      (void)e;
      if (out.value.exponents().count(q) == 0 && nilpotent_mod(U, q)) {
        out.value.multiply_prime(q, Exponent::infinite());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairing vanishing

namespace {

constexpr std::size_t pairing_block_limit = 4096;

EvenFredholmModule pull_down(EvenFredholmModule m, const BratteliDiagram& d, std::size_t times) {
  for (std::size_t i = 0; i < times; ++i) m = pullback(m, d);
  return m;
}

Rational pair_signed(const EvenFredholmModule& m, const BratteliDiagram& d, std::size_t level,
                     const IntVector& x) {
  IntVector pos(x.size()), neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    pos[i] = sgn(x[i]) > 0 ? x[i] : Integer(0);
    neg[i] = sgn(x[i]) < 0 ? Integer(-x[i]) : Integer(0);
  }
  Rational v = chern_pair(m, realize_class(d, level, pos), 1);
  if (!is_zero(neg)) v -= chern_pair(m, realize_class(d, level, neg), 1);
  return v;
}

}  // namespace

Certificate pairing_vanishing_certificate(const BratteliDiagram& diagram, std::size_t level,
                                          const IntVector& x, std::size_t extra_levels) {
  const auto depth = diagram.finite_depth();
  if (depth && level > *depth) {
    throw Error(ErrorKind::depth_overflow, "level " + std::to_string(level) +
                                               " beyond diagram depth " + std::to_string(*depth));
  }
  const std::size_t kn = diagram.blocks(level);
  if (x.size() != kn) {
    throw Error(ErrorKind::shape_mismatch, "class vector of length " + std::to_string(x.size()) +
                                               " at a level with " + std::to_string(kn) +
                                               " blocks");
  }
  const DivisibilityObstruction obs = divisibility_obstruction(diagram, level);
  if (!obs.is_infinite()) {
    throw Error(ErrorKind::obstruction_finite,
                "divisibility obstruction at level " + std::to_string(level) + " is " + obs.text() +
                    "; pulled-back generators need not pair to zero");
  }

  Certificate c;
  c.kind = CertificateKind::pairing_vanishing;
  c.level = level;
  c.notes.push_back("divisibility obstruction at level " + std::to_string(level) + ": " +
                    obs.text() + " (" + std::string(to_string(obs.confidence)) + ")");
  if (is_zero(x)) {
    c.notes.push_back("x = 0 pairs to zero with every class");
    return c;
  }

  std::size_t available = extra_levels;
  if (depth) available = std::min(available, *depth - level);
  const Tower t = khomology_tower(diagram, level + available);
  IntVector pushed = x;
  std::size_t checked = 0;
  for (std::size_t p = 1; p <= available; ++p) {
    const auto sizes = block_sizes(diagram, level + p);
    if (*std::max_element(sizes.begin(), sizes.end()) > pairing_block_limit) break;
    pushed = k0_pushforward(diagram, level + p - 1, pushed);
    const Integer content = content_of(t.composite(level, level + p));
    std::string values;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      const EvenFredholmModule z = canonical_module(diagram, level + p, j);
      const EvenFredholmModule down = pull_down(z, diagram, p);
      const Rational lhs = pair_signed(down, diagram, level, x);
      const Rational rhs = pair_signed(z, diagram, level + p, pushed);
      if (lhs != rhs || lhs != Rational(pushed[j])) {
        throw Error(ErrorKind::invalid_argument,
                    "pairing naturality failed at level " + std::to_string(level + p) +
                        ", block " + std::to_string(j) + ": " + lhs.get_str() + " vs " +
                        rhs.get_str());
      }
      if (sgn(content) != 0 && lhs.get_num() % content != 0) {
        throw Error(ErrorKind::invalid_argument,
                    "pulled-back pairing " + lhs.get_str() + " is not divisible by " +
                        content.get_str());
      }
      if (j) values += ",";
      values += lhs.get_str();
    }
    c.notes.push_back("p = " + std::to_string(p) + ": pulled-back generators pair with x to (" +
                      values + "), all divisible by " + content.get_str());
    checked = p;
  }
  c.step = checked;
  if (checked > 0) c.matrices.push_back(t.composite(level, level + checked));
  c.notes.push_back("a class z pulls back to k z_0 at level " + std::to_string(level) +
                    " with k divisible by the obstruction; k = 0 is forced, so every even "
                    "pairing with x vanishes");
  return c;
}

// ---------------------------------------------------------------------------
// Report

bool AnalysisReport::has_inexact() const {
  return !k0.is_exact() || !k1.is_exact() || !kk0.is_exact() || !kk1.is_exact() ||
         obstruction.confidence != Confidence::exact;
}

AnalysisReport full_report(const BratteliDiagram& diagram, std::size_t horizon) {
  AnalysisReport r;
  r.diagram_name = diagram.name();
  r.diagram_kind = std::string(diagram.kind_name());
  r.finite = diagram.is_finite();
  r.horizon = effective_horizon(diagram, horizon);
  const std::size_t depth = analysis_depth(diagram, horizon);
  for (std::size_t n = 0; n <= depth; ++n) r.blocks_per_level.push_back(diagram.blocks(n));

  r.k0_tower = k0_tower(diagram, depth);
  r.k0 = colim_descriptor(r.k0_tower);
  r.k1 = GroupDescriptor::zero();

  MilnorAssembly m = milnor_assemble(diagram, horizon);
  r.kk0 = m.kk0;
  r.kk1 = m.kk1;
  r.even_tower = std::move(m.even);
  r.odd_tower = std::move(m.odd);
  r.even_ml = m.even_ml;
  r.certificates = std::move(m.certificates);
  r.obstruction = divisibility_obstruction(diagram, 0, horizon);

  const std::size_t top = std::min<std::size_t>(depth, 3);
  for (std::size_t n = 0; n <= top; ++n) {
    const auto sizes = block_sizes(diagram, n);
    if (*std::max_element(sizes.begin(), sizes.end()) > 256) break;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const EvenFredholmModule z = canonical_module(diagram, n, i);
      for (std::size_t j = 0; j < sizes.size(); ++j)
        r.pairing_summary.push_back({n, i, j, chern_pair(z, minimal_projection(diagram, n, j), 1)});
    }
  }
  return r;
}

Json to_json(const GroupDescriptor& d) {
  Json j;
  j["variant"] = std::string(to_string(d.variant()));
  j["text"] = d.text();
  j["confidence"] = std::string(to_string(d.confidence()));
  switch (d.variant()) {
    case DescriptorVariant::free_abelian:
    case DescriptorVariant::direct_limit_presentation:
      j["rank"] = d.rank();
      break;
    case DescriptorVariant::localization:
    case DescriptorVariant::profinite_quotient:
      j["supernatural"] = to_string(d.supernatural());
      break;
    case DescriptorVariant::nonzero_uncountable_lim1:
      j["witness_level"] = d.witness_level();
      break;
    case DescriptorVariant::zero:
      break;
  }
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["kind"] = std::string(to_string(c.kind));
  j["level"] = c.level;
  j["step"] = c.step;
  j["period"] = c.period;
  Json chain = Json::array();
  for (const auto& l : c.chain) chain.push_back(to_string(l));
  j["chain"] = std::move(chain);
  Json mats = Json::array();
  for (const auto& m : c.matrices) mats.push_back(to_string(m));
  j["matrices"] = std::move(mats);
  Json polys = Json::array();
  for (const auto& p : c.polynomials) polys.push_back(polynomial_to_string(p));
  j["polynomials"] = std::move(polys);
  j["notes"] = c.notes;
  return j;
}

Json to_json(const Tower& t) {
  Json j;
  j["direction"] = std::string(to_string(t.direction));
  j["base_rank"] = t.base_rank;
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(to_string(s));
  j["steps"] = std::move(steps);
  if (t.tail) {
    Json cycle = Json::array();
    for (const auto& s : t.tail->cycle) cycle.push_back(to_string(s));
    j["tail"] = Json{{"start", t.tail->start}, {"cycle", std::move(cycle)}};
  } else {
    j["tail"] = nullptr;
  }
  return j;
}

Json to_json(const DivisibilityObstruction& o) {
  Json j;
  j["value"] = o.forces_zero ? std::string("0") : to_string(o.value);
  j["forces_zero"] = o.forces_zero;
  j["infinite"] = o.is_infinite();
  j["confidence"] = std::string(to_string(o.confidence));
  j["notes"] = o.notes;
  return j;
}

Json to_json(const AnalysisReport& r) {
  Json j;
  j["diagram"] = Json{{"name", r.diagram_name},
                      {"kind", r.diagram_kind},
                      {"finite", r.finite},
                      {"blocks_per_level", r.blocks_per_level}};
  j["horizon"] = r.horizon;
  j["k0"] = to_json(r.k0);
  j["k1"] = to_json(r.k1);
  j["kk0"] = to_json(r.kk0);
  j["kk1"] = to_json(r.kk1);
  j["mittag_leffler"] = std::string(to_string(r.even_ml));
  j["divisibility_obstruction"] = to_json(r.obstruction);
  j["towers"] = Json{{"k0", to_json(r.k0_tower)},
                     {"kk0_levels", to_json(r.even_tower)},
                     {"kk1_levels", to_json(r.odd_tower)}};
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  j["certificates"] = std::move(certs);
  Json table = Json::array();
  for (const auto& e : r.pairing_summary) {
    table.push_back(Json{{"level", e.level},
                         {"module_block", e.module_block},
                         {"projection_block", e.projection_block},
                         {"value", e.value.get_str()}});
  }
  j["pairing_summary"] = std::move(table);
  return j;
}

namespace {


std::string chain_summary(const std::vector<Lattice>& chain) {
  if (chain.empty()) return "";
  std::string s;
  const std::size_t shown = std::min<std::size_t>(chain.size(), 4);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) s += " > ";
    s += to_string(chain[i]);
  }
  if (chain.size() > shown) s += " > ... > " + to_string(chain.back());
  return s + " (" + std::to_string(chain.size()) + " lattices)";
}

}  // namespace

std::string describe(const GroupDescriptor& d) {
  std::string s = d.text();
  s += "  [" + std::string(to_string(d.variant()));
  if (d.variant() == DescriptorVariant::localization ||
      d.variant() == DescriptorVariant::profinite_quotient) {
    s += "(" + to_pretty_string(d.supernatural()) + ")";
  } else if (d.variant() == DescriptorVariant::free_abelian ||
             d.variant() == DescriptorVariant::direct_limit_presentation) {
    s += "(" + std::to_string(d.rank()) + ")";
  }
  s += ", " + std::string(to_string(d.confidence())) + "]";
  return s;
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "diagram: " << r.diagram_name << " (" << r.diagram_kind << ", "
     << (r.finite ? "finite" : "unbounded") << ")\n";
  os << "horizon: " << r.horizon << "\n";
  os << "K0  = " << describe(r.k0) << "\n";
  os << "K1  = " << describe(r.k1) << "\n";
  os << "KK0 = " << describe(r.kk0) << "\n";
  os << "KK1 = " << describe(r.kk1) << "\n";
  os << "Mittag-Leffler (KK0 tower): " << to_string(r.even_ml) << "\n";
  os << "divisibility obstruction at level 0: " << r.obstruction.text() << " ("
     << to_string(r.obstruction.confidence) << ")\n";
  os << "certificates:\n";
  for (const auto& c : r.certificates) {
    os << "  - " << to_string(c.kind) << " at level " << c.level;
    if (!c.chain.empty()) os << ": " << chain_summary(c.chain);
    os << "\n";
    for (const auto& n : c.notes) os << "      " << n << "\n";
  }
  if (!r.pairing_summary.empty()) {
    os << "pairing summary <ch(z_i), [p_j]>:\n";
    bool first = true;
    std::size_t level = 0;
    std::size_t row = static_cast<std::size_t>(-1);
    for (const auto& e : r.pairing_summary) {
      if (first || e.level != level) {
        if (!first) os << "\n";
        first = false;
        level = e.level;
        row = static_cast<std::size_t>(-1);
        os << "  level " << e.level << ":";
      }
      if (e.module_block != row) {
        row = e.module_block;
        os << (e.module_block == 0 ? " " : " | ");
      } else {
        os << " ";
      }
      os << e.value.get_str();
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace afk
