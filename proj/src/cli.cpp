#include "afk/cli.hpp"

#include "afk/error.hpp"
#include "afk/khom.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace afk {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CostGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string diagram;
  std::size_t horizon = default_horizon;
  std::size_t max_k = 5;
  std::size_t level = 0;
  std::size_t block = 0;
  std::size_t k = 1;
  std::string format = "text";
  std::string tower = "khom";
  std::string module_spec;
  std::string class_spec;
  bool strict = false;
};

bool structured(const Options& o) { return o.format == "structured"; }

void check_horizon(const Options& o) {
  if (o.horizon == 0) throw Error(ErrorKind::horizon_overflow, "horizon must be at least 1");
  if (o.horizon > max_horizon) {
    throw CostGuard("horizon " + std::to_string(o.horizon) + " exceeds the limit of " +
                    std::to_string(max_horizon));
  }
}

void check_level(std::size_t level, const char* what) {
  if (level > max_fredholm_level) {
    throw CostGuard(std::string(what) + " " + std::to_string(level) + " exceeds the limit of " +
                    std::to_string(max_fredholm_level));
  }
}

BratteliDiagram load(const std::string& source, std::size_t depth) {
  if (source.empty()) throw IoError("no diagram given (use --diagram <path|car|uhf:...>)");
  if (auto p = preset(source, depth)) return *p;
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError("cannot read diagram file '" + source + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_diagram(buf.str());
}

IntVector parse_vector(std::string text) {
  text.erase(std::remove_if(text.begin(), text.end(), [](char c) { return c == ' '; }), text.end());
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw Error(ErrorKind::syntax, "unbalanced brackets in '" + text + "'");
    text = text.substr(1, text.size() - 2);
  }
  IntVector v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.emplace_back(item);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::syntax, "'" + item + "' is not an integer");
    }
  }
  if (v.empty()) throw Error(ErrorKind::syntax, "empty class vector");
  return v;
}

std::pair<std::size_t, std::string> split_spec(const std::string& spec, const char* what) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorKind::syntax, std::string(what) + " spec '" + spec + "' is not level:value");
  }
  std::size_t level = 0;
  try {
    std::size_t used = 0;
    level = std::stoul(spec.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorKind::syntax, std::string(what) + " spec '" + spec + "' has a bad level");
  }
  return {level, spec.substr(colon + 1)};
}

std::string join_chain(const std::vector<Lattice>& chain) {
  std::string s;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) s += " ⊋ ";
    s += to_string(chain[i]);
  }
  return s;
}

void print_certificates(std::ostream& out, const std::vector<Certificate>& certs) {
  for (const auto& c : certs) {
    out << "  - " << to_string(c.kind) << " at level " << c.level;
    if (c.period != 1) out << ", period " << c.period;
    if (!c.chain.empty()) out << ", from step " << c.step;
    out << "\n";
    if (!c.chain.empty()) out << "      chain: " << join_chain(c.chain) << "\n";
    for (const auto& m : c.matrices) out << "      matrix: " << to_string(m) << "\n";
    for (const auto& n : c.notes) out << "      " << n << "\n";
  }
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_analyze(const Options& o, std::ostream& out) {
  check_horizon(o);
  const BratteliDiagram d = load(o.diagram, o.horizon);
  const AnalysisReport r = full_report(d, o.horizon);
  if (structured(o)) out << to_json(r).dump(2) << "\n";
  else out << to_text(r);
  return o.strict && r.has_inexact() ? exit_inexact : exit_ok;
}

int cmd_limits(const Options& o, std::ostream& out) {
  check_horizon(o);
  const BratteliDiagram d = load(o.diagram, o.horizon);
  const std::size_t depth = analysis_depth(d, o.horizon);
  const std::size_t h = effective_horizon(d, o.horizon);
  bool inexact = false;
  Json j;
  j["diagram"] = d.name();
  j["horizon"] = h;

  if (o.tower == "k0") {
    const Tower t = k0_tower(d, depth);
    const GroupDescriptor colim = colim_descriptor(t);
    inexact = !colim.is_exact();
    j["tower"] = to_json(t);
    j["colim"] = to_json(colim);
    if (structured(o)) {
      out << j.dump(2) << "\n";
    } else {
      out << "tower: K0 (covariant) of " << d.name() << "\n";
      out << "colim = " << describe(colim) << "\n";
    }
    return o.strict && inexact ? exit_inexact : exit_ok;
  }
  if (o.tower != "khom") {
    throw Error(ErrorKind::syntax, "unknown tower '" + o.tower + "' (expected khom or k0)");
  }

  const Tower t = khomology_tower(d, depth);
  GroupDescriptor lim = GroupDescriptor::free_abelian(t.rank(0));
  GroupDescriptor lim1 = GroupDescriptor::zero();
  MittagLefflerResult ml{MLVerdict::holds, {}};
  std::vector<Certificate> lim_certs;
  if (h > 0) {
    LimitVerdict lv = lim_descriptor(t, h);
    lim = lv.descriptor;
    lim_certs = std::move(lv.certificates);
    lim1 = lim1_descriptor(t, h).descriptor;
    ml = mittag_leffler(t, h);
  }
  inexact = !lim.is_exact() || !lim1.is_exact();

  if (structured(o)) {
    j["tower"] = to_json(t);
    j["lim"] = to_json(lim);
    j["lim1"] = to_json(lim1);
    Json lc = Json::array();
    for (const auto& c : lim_certs) lc.push_back(to_json(c));
    j["lim_certificates"] = std::move(lc);
    Json mc = Json::array();
    for (const auto& c : ml.certificates) mc.push_back(to_json(c));
    j["mittag_leffler"] = Json{{"verdict", std::string(to_string(ml.verdict))},
                               {"certificates", std::move(mc)}};
    out << j.dump(2) << "\n";
  } else {
    out << "tower: K-homology (contravariant, maps M^T) of " << d.name() << ", horizon " << h
        << "\n";
    out << "lim   = " << describe(lim) << "\n";
    out << "lim^1 = " << describe(lim1) << "\n";
    out << "Mittag-Leffler: " << to_string(ml.verdict) << "\n";
    out << "lim certificates:\n";
    print_certificates(out, lim_certs);
    out << "Mittag-Leffler certificates:\n";
    print_certificates(out, ml.certificates);
  }
  return o.strict && inexact ? exit_inexact : exit_ok;
}

int cmd_verify_fredholm(const Options& o, std::ostream& out) {
  check_level(o.level, "level");
  if (o.max_k > max_k_limit) {
    throw CostGuard("max-k " + std::to_string(o.max_k) + " exceeds the limit of " +
                    std::to_string(max_k_limit));
  }
  const BratteliDiagram d = load(o.diagram, std::max(o.horizon, o.level + 1));
  const EvenFredholmModule z = canonical_module(d, o.level, o.block);
  const AlgebraElement p = minimal_projection(d, o.level, o.block);
  const AxiomsReport axioms = axioms_check(z);
  std::vector<Rational> values;
  bool all_one = true;
  for (std::size_t k = 0; k <= o.max_k; ++k) {
    values.push_back(chern_pair(z, p, k));
    all_one = all_one && values.back() == 1;
  }
  const bool ok = all_one && axioms.ok();

  if (structured(o)) {
    Json j;
    j["diagram"] = d.name();
    j["level"] = o.level;
    j["block"] = o.block;
    j["graded_dimension"] = z.dim();
    Json table = Json::array();
    for (std::size_t k = 0; k < values.size(); ++k)
      table.push_back(Json{{"k", k}, {"value", values[k].get_str()}});
    j["pairings"] = std::move(table);
    Json checks = Json::array();
    for (const auto& c : axioms.checks)
      checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["axioms"] = std::move(checks);
    j["passed"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << "canonical module z_0 at level " << o.level << ", block " << o.block << " of "
        << d.name() << " (graded dimension " << z.dim() << ")\n";
    out << "axioms:\n";
    for (const auto& c : axioms.checks) {
      out << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name;
      if (!c.detail.empty()) out << " (" << c.detail << ")";
      out << "\n";
    }
    out << "  k | <ch(z_0), [p]>\n";
    for (std::size_t k = 0; k < values.size(); ++k)
      out << "  " << k << " | " << values[k].get_str() << "\n";
    out << (ok ? "verified" : "NOT verified") << "\n";
  }
  return ok ? exit_ok : exit_validation;
}

int cmd_verify_pullback(const Options& o, std::ostream& out) {
  check_level(o.level + 1, "level + 1");
  const std::size_t n = o.level;
  const BratteliDiagram d = load(o.diagram, std::max(o.horizon, n + 2));
  if (auto depth = d.finite_depth(); depth && n + 1 > *depth) {
    throw Error(ErrorKind::depth_overflow, "level " + std::to_string(n + 1) +
                                               " is not materialized (depth " +
                                               std::to_string(*depth) + ")");
  }
  const IntMatrix m = d.multiplicity(n);
  bool ok = true;
  Json rows = Json::array();
  Json witnesses = Json::array();
  std::ostringstream text;
  text << "pullback from level " << n + 1 << " to level " << n << " of " << d.name() << "\n";
  text << "  z_j(n+1) | p_i(n) | <ch(pullback z_j), [p_i]> | <ch z_j, [push p_i]> | M[j][i]\n";
  for (std::size_t j = 0; j < m.rows(); ++j) {
    const EvenFredholmModule up = canonical_module(d, n + 1, j);
    const EvenFredholmModule down = pullback(up, d);
    for (std::size_t i = 0; i < m.cols(); ++i) {
      IntVector e(m.cols(), Integer(0));
      e[i] = 1;
      const Rational lhs = chern_pair(down, minimal_projection(d, n, i), 1);
      const Rational rhs = chern_pair(up, realize_class(d, n + 1, k0_pushforward(d, n, e)), 1);
      const Rational expected = Rational(m(j, i)) *
                                chern_pair(canonical_module(d, n, i), minimal_projection(d, n, i), 1);
      const bool row_ok = lhs == rhs && lhs == expected;
      ok = ok && row_ok;
      rows.push_back(Json{{"module_block", j},
                          {"projection_block", i},
                          {"pullback_pairing", lhs.get_str()},
                          {"pushforward_pairing", rhs.get_str()},
                          {"multiplicity", m(j, i).get_str()},
                          {"ok", row_ok}});
      text << "  " << j << " | " << i << " | " << lhs.get_str() << " | " << rhs.get_str() << " | "
           << m(j, i).get_str() << (row_ok ? "" : "  MISMATCH") << "\n";
    }

    std::optional<EvenFredholmModule> target;
    std::string target_text;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      for (Integer c = 0; c < m(j, i); ++c) {
        const EvenFredholmModule zi = canonical_module(d, n, i);
        target = target ? direct_sum(*target, zi) : zi;
        if (!target_text.empty()) target_text += " + ";
        target_text += "z_" + std::to_string(i);
      }
    }
    EquivalenceWitness w;
    if (target) w = equivalence_witness(down, *target);
    else w.reason = "pullback has no summands";
    ok = ok && w.found;
    Json wj{{"module_block", j}, {"target", target_text}, {"found", w.found}};
    if (w.found) wj["permutation"] = w.permutation;
    else wj["reason"] = w.reason;
    witnesses.push_back(std::move(wj));
    text << "  pullback z_" << j << " ~ " << target_text << ": ";
    if (w.found) {
      text << "permutation witness [";
      const std::size_t shown = std::min<std::size_t>(w.permutation.size(), 16);
      for (std::size_t t = 0; t < shown; ++t) text << (t ? "," : "") << w.permutation[t];
      if (w.permutation.size() > shown) text << ",... (" << w.permutation.size() << " entries)";
      text << "]\n";
    } else {
      text << "no witness (" << w.reason << ")\n";
    }
  }
  text << (ok ? "verified" : "NOT verified") << "\n";

  if (structured(o)) {
    Json j;
    j["diagram"] = d.name();
    j["level"] = n;
    j["naturality"] = std::move(rows);
    j["witnesses"] = std::move(witnesses);
    j["passed"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return ok ? exit_ok : exit_validation;
}

int cmd_pair(const Options& o, std::ostream& out) {
  if (o.module_spec.empty() || o.class_spec.empty()) throw IoError("pair needs --module and --class");
  auto [module_level, block_text] = split_spec(o.module_spec, "module");
  auto [class_level, vector_text] = split_spec(o.class_spec, "class");
  check_level(module_level, "module level");
  if (o.k > max_k_limit) {
    throw CostGuard("k " + std::to_string(o.k) + " exceeds the limit of " +
                    std::to_string(max_k_limit));
  }
  std::size_t block = 0;
  try {
    std::size_t used = 0;
    block = std::stoul(block_text, &used);
    if (used != block_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorKind::syntax, "module spec '" + o.module_spec + "' has a bad block index");
  }
  const IntVector x = parse_vector(vector_text);
  const BratteliDiagram d = load(o.diagram, std::max(o.horizon, module_level + 1));
  if (class_level > module_level) {
    throw Error(ErrorKind::level_mismatch,
                "class at level " + std::to_string(class_level) +
                    " lies above the module at level " + std::to_string(module_level) +
                    "; modules can only be pulled back to lower levels");
  }
  EvenFredholmModule z = canonical_module(d, module_level, block);
  std::string moved = "none";
  if (class_level < module_level) {
    for (std::size_t l = module_level; l > class_level; --l) z = pullback(z, d);
    moved = "module pulled back from level " + std::to_string(module_level) + " to level " +
            std::to_string(class_level);
  }
  const AlgebraElement p = realize_class(d, class_level, x);
  const Rational value = chern_pair(z, p, o.k);
  if (structured(o)) {
    Json j;
    j["diagram"] = d.name();
    j["module"] = o.module_spec;
    j["class"] = o.class_spec;
    j["k"] = o.k;
    j["moved"] = moved;
    j["value"] = value.get_str();
    out << j.dump(2) << "\n";
  } else {
    if (moved != "none") out << moved << "\n";
    out << value.get_str() << "\n";
  }
  return exit_ok;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::syntax ? exit_io : exit_validation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact K-theory and K-homology of AF algebras from Bratteli diagrams", "afk"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--diagram", o.diagram, "diagram file or preset (car, uhf:2,3+)");
    sub->add_option("--horizon", o.horizon, "levels examined by the limit analysis")
        ->capture_default_str();
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();
    sub->add_flag("--strict", o.strict, "exit 3 when a verdict is only horizon-certified");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "full K-theory / K-homology report");
  add_common(analyze);
  analyze->add_option("source", o.diagram, "diagram file or preset");

  CLI::App* limits = app.add_subcommand("limits", "tower limits with certificates");
  add_common(limits);
  limits->add_option("--tower", o.tower, "khom or k0")->capture_default_str();
  limits->add_option("source", o.diagram, "diagram file or preset");

  CLI::App* verify = app.add_subcommand("verify", "numerical verifications");
  verify->require_subcommand(1);
  CLI::App* fredholm = verify->add_subcommand("fredholm", "pairing of the canonical module");
  add_common(fredholm);
  fredholm->add_option("--level", o.level, "diagram level")->capture_default_str();
  fredholm->add_option("--block", o.block, "block index")->capture_default_str();
  fredholm->add_option("--max-k", o.max_k, "largest cocycle degree k")->capture_default_str();
  CLI::App* pull = verify->add_subcommand("pullback", "pullback naturality and witnesses");
  add_common(pull);
  pull->add_option("--level", o.level, "target level n (modules come from n+1)")
      ->capture_default_str();

  CLI::App* pair = app.add_subcommand("pair", "pair a canonical module with a K_0 class");
  add_common(pair);
  pair->add_option("--module", o.module_spec, "level:block");
  pair->add_option("--class", o.class_spec, "level:[r_0,r_1,...]");
  pair->add_option("--k", o.k, "cocycle degree")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (limits->parsed()) return cmd_limits(o, out);
    if (fredholm->parsed()) return cmd_verify_fredholm(o, out);
    if (pull->parsed()) return cmd_verify_pullback(o, out);
    if (pair->parsed()) return cmd_pair(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const CostGuard& e) {
    err << "error: cost guard: " << e.what() << "\n";
    return exit_cost_guard;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  err << "error: no command\n";
  return exit_io;
}

}  // namespace afk
