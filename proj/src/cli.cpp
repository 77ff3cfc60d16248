#include "recede/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "recede/asymptotics.hpp"
#include "recede/conditions.hpp"
#include "recede/cones.hpp"
#include "recede/errors.hpp"
#include "recede/infinity_variational.hpp"
#include "recede/models.hpp"
#include "recede/parse.hpp"
#include "recede/report.hpp"
#include "recede/solver.hpp"
#include "recede/stability.hpp"

namespace recede {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::parse_error, "cannot open input file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) fail(ErrorCode::usage_error, "cannot open output file: " + out);
  f << text;
}

Eigen::VectorXd parse_dir(const std::string& text, int dim) {
  std::vector<double> vals;
  std::string tok;
  std::istringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::usage_error, "--dir expects comma-separated floats, got '" + tok + "'");
    }
  }
  if (static_cast<int>(vals.size()) != dim) {
    std::ostringstream os;
    os << "--dir has " << vals.size() << " entries; the problem has dimension " << dim;
    fail(ErrorCode::usage_error, os.str());
  }
  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) d[i] = vals[static_cast<std::size_t>(i)];
  return d;
}

CheckKind kind_of(const std::string& s) {
  if (s == "plain") return CheckKind::plain;
  if (s == "q") return CheckKind::q;
  if (s == "sublevel") return CheckKind::sublevel;
  fail(ErrorCode::usage_error, "--kind must be plain, q, or sublevel");
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::holds: return 0;
    case Verdict::violated: return 2;
    case Verdict::inconclusive: return 3;
  }
  return 1;
}

struct Opts {
  std::string input;
  std::string out;
  std::string format = "json";
  std::string kind = "plain";
  std::string dir_text;
  double lambda = 0.0;
  double eps = 0.25;
  double radius = 3.0;
  int rings = 4;
  int rays = 16;
  int samples = 0;  // 0: module default
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool lambda_set = false;
};

ProblemSpec load_problem(const Opts& o, std::vector<std::string>* warnings) {
  ProblemSpec p = parse_problem(slurp(o.input), warnings);
  if (o.seed_set) p.options.seed = o.seed;
  return p;
}

int cmd_cone(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  emit(dump_json(json_of(asymptotic_cone(p.set))), o.out);
  return 0;
}

int cmd_asymfn(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  const Eigen::VectorXd d = parse_dir(o.dir_text, p.dimension);
  AsymCfg cfg = cfg_from_options(p.options);
  const CheckKind kind = kind_of(o.kind);
  Estimate e;
  switch (kind) {
    case CheckKind::plain: e = asym_fn(p.f, d, cfg); break;
    case CheckKind::q: e = q_asym_fn(p.f, d, cfg); break;
    case CheckKind::sublevel:
      if (!o.lambda_set)
        fail(ErrorCode::usage_error, "--kind sublevel requires --lambda");
      e = sublevel_asym_fn(p.f, o.lambda, d, cfg);
      break;
  }
  nlohmann::json j = json_of(e);
  j["kind"] = check_kind_name(kind);
  j["dir"] = json_of(d);
  if (kind == CheckKind::sublevel) j["lambda"] = json_of(o.lambda);
  emit(dump_json(j), o.out);
  return 0;
}

int cmd_check(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  const CheckKind kind = kind_of(o.kind);
  if (kind == CheckKind::sublevel && !o.lambda_set)
    fail(ErrorCode::usage_error, "--kind sublevel requires --lambda");
  RecessionCfg cfg;
  cfg.asym = cfg_from_options(p.options);
  const CheckResult r = recession_check(p, kind, o.lambda, cfg);
  nlohmann::json j = json_of(r);
  j["kind"] = check_kind_name(kind);
  if (kind == CheckKind::sublevel) j["lambda"] = json_of(o.lambda);
  emit(dump_json(j), o.out);
  return verdict_exit(r.verdict);
}

int cmd_infinity(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  RecessionCfg rcfg;
  rcfg.asym = cfg_from_options(p.options);
  const CheckResult rec = recession_check(p, CheckKind::plain, 0.0, rcfg);
  SonCqCfg scfg;
  scfg.subdiff.seed = p.options.seed;
  const SonCqReport sq = son_cq_check(p, scfg);
  nlohmann::json j;
  j["recession_check"] = json_of(rec);
  j["recession_check"]["kind"] = check_kind_name(CheckKind::plain);
  j["son_cq_check"] = json_of(sq);
  emit(dump_json(j), o.out);
  if (rec.verdict == Verdict::violated || sq.verdict == Verdict::violated) return 2;
  if (rec.verdict == Verdict::inconclusive || sq.verdict == Verdict::inconclusive) return 3;
  return 0;
}

int cmd_solve(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  SolveCfg cfg;
  cfg.seed = p.options.seed;
  const SolverResult r = solve(p, cfg);
  emit(dump_json(json_of(r)), o.out);
  return r.status == SolveStatus::max_iter ? 3 : 0;
}

int cmd_stability(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  StabilityGridCfg cfg;
  cfg.rings = o.rings;
  cfg.rays = o.rays;
  cfg.solve.seed = p.options.seed;
  const StabilityReport rep = perturb_grid(p, o.eps, cfg);
  const SemiDiag diag = semicontinuity_diagnostics(rep);
  if (o.format == "csv") {
    emit(stability_csv(rep, diag), o.out);
  } else {
    nlohmann::json j = json_of(rep);
    j["diagnostics"] = json_of(diag);
    emit(dump_json(j), o.out);
  }
  return 0;
}

int cmd_sharp(const Opts& o) {
  ProblemSpec p = load_problem(o, nullptr);
  SolveCfg scfg;
  scfg.seed = p.options.seed;
  const SolverResult base = solve(p, scfg);
  if (base.status != SolveStatus::optimal)
    fail(ErrorCode::validation_error,
         std::string("sharp: base problem status is ") + solve_status_name(base.status));
  SharpCfg cfg;
  cfg.seed = p.options.seed;
  if (o.samples > 0) cfg.samples = o.samples;
  const SharpReport rep = weak_sharp_certify(p, base, o.radius, cfg);
  if (o.format == "csv")
    emit(sharp_csv(rep), o.out);
  else
    emit(dump_json(json_of(rep)), o.out);
  switch (rep.verdict) {
    case SharpVerdict::sharp: return 0;
    case SharpVerdict::not_sharp: return 2;
    case SharpVerdict::inconclusive: return 3;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Built-in fixture suite over the catalog examples. Two rows are flagged
// EXPECTED-DISCREPANCY: places where a commonly quoted closed form disagrees
// with what the defining limits actually give; the toolkit follows the
// definitions, and the rows document the gap rather than failing.

struct FixtureRow {
  std::string status;
  std::string label;
};

class FixtureTable {
 public:
  void pass(bool ok, const std::string& label) {
    rows_.push_back({ok ? "PASS" : "FAIL", label});
    if (!ok) ++failures_;
  }
  void discrepancy(const std::string& label) { rows_.push_back({"EXPECTED-DISCREPANCY", label}); }
  void error(const std::string& label, const std::string& what) {
    rows_.push_back({"FAIL", label + " (error: " + what + ")"});
    ++failures_;
  }
  int failures() const { return failures_; }
  std::string str() const {
    std::ostringstream os;
    for (const auto& r : rows_) {
      os << r.status;
      for (std::size_t i = r.status.size(); i < 22; ++i) os << ' ';
      os << r.label << "\n";
    }
    int disc = 0;
    for (const auto& r : rows_) disc += r.status == "EXPECTED-DISCREPANCY" ? 1 : 0;
    os << "----\n"
       << (rows_.size() - static_cast<std::size_t>(failures_ + disc)) << " pass, " << failures_
       << " fail, " << disc << " expected discrepancies\n";
    return os.str();
  }

 private:
  std::vector<FixtureRow> rows_;
  int failures_ = 0;
};

ProblemSpec strip_problem() {
  ProblemSpec p;
  p.dimension = 2;
  Eigen::MatrixXd q(2, 2);
  q << 0, 0, 0, 2;
  p.f = make_quadratic(q, Eigen::VectorXd::Zero(2), 0.0);
  Eigen::VectorXd lo(2), hi(2);
  lo << 0, 0;
  hi << 1, std::numeric_limits<double>::infinity();
  p.set = make_box(lo, hi);
  return p;
}

ProblemSpec line_problem(const FunctionModel& f) {
  ProblemSpec p;
  p.dimension = 1;
  p.f = f;
  p.set = make_whole_space(1);
  return p;
}

ProblemSpec halfline_problem(const FunctionModel& f) {
  ProblemSpec p;
  p.dimension = 1;
  p.f = f;
  Eigen::MatrixXd a(1, 1);
  a << -1;
  p.set = make_polyhedron(a, Eigen::VectorXd::Zero(1));
  return p;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

void fixture_strip(FixtureTable& t) {
  const ProblemSpec p = strip_problem();
  const AsymCfg acfg;
  try {
    const ConeRep cone = asymptotic_cone(p.set);
    t.pass(cone_contains(cone, vec2(0, 1)) && cone_contains(cone, vec2(0, 0)) &&
               !cone_contains(cone, vec2(1, 0)) && !cone_contains(cone, vec2(0, -1)),
           "strip: asymptotic cone is the upward vertical ray {0} x [0, inf)");
    t.discrepancy(
        "strip: a commonly quoted closed form lists the full vertical line {0} x R for this cone; "
        "the defining limit keeps only the upward ray, and the toolkit follows the definition");

    const Estimate e_flat = asym_fn(p.f, vec2(1, 0), acfg);
    t.pass(e_flat.bound == BoundKind::exact && e_flat.value.is_finite() &&
               e_flat.value.raw() == 0.0,
           "strip: asymptotic slope along (1,0) is exactly 0");
    const Estimate e_up = asym_fn(p.f, vec2(0, 1), acfg);
    t.pass(e_up.bound == BoundKind::exact && e_up.value.is_plus_inf(),
           "strip: asymptotic slope along (0,1) is +inf");

    RecessionCfg rcfg;
    const CheckResult rc = recession_check(p, CheckKind::plain, 0.0, rcfg);
    t.pass(rc.verdict == Verdict::holds && rc.exact_mode,
           "strip: recession condition holds in exact mode");

    const InfNormalCone nc = normal_cone_at_infinity(p.set);
    bool zero_piece = false, plus = false, minus = false, extra = false;
    for (const auto& piece : nc.pieces) {
      if (piece.rows() == 0) {
        zero_piece = true;
      } else if (piece.rows() == 1) {
        const Eigen::VectorXd g = piece.row(0).transpose().normalized();
        if ((g - vec2(1, 0)).norm() <= 1e-9)
          plus = true;
        else if ((g - vec2(-1, 0)).norm() <= 1e-9)
          minus = true;
        else
          extra = true;
      } else {
        extra = true;
      }
    }
    t.pass(zero_piece && plus && minus && !extra,
           "strip: normal cone at infinity generates the horizontal line R x {0}");

    const SonCqReport sq = son_cq_check(p, SonCqCfg{});
    t.pass(sq.verdict == Verdict::violated && sq.delta <= 1e-6,
           "strip: stationarity-at-infinity condition fails (delta = 0), as the geometry demands");

    const SolverResult base = solve(p, SolveCfg{});
    bool sol_ok = base.status == SolveStatus::optimal && base.sol.hull_flag &&
                  base.sol.points.size() == 2 && std::abs(base.f_star.raw()) <= 1e-12;
    if (sol_ok) {
      bool v0 = false, v1 = false;
      for (const auto& pt : base.sol.points) {
        if ((pt - vec2(0, 0)).norm() <= 1e-9) v0 = true;
        if ((pt - vec2(1, 0)).norm() <= 1e-9) v1 = true;
      }
      sol_ok = v0 && v1;
    }
    t.pass(sol_ok, "strip: solver recovers f* = 0 with solution segment [0,1] x {0}");

    SharpCfg shc;
    shc.samples = 30000;
    const SharpReport sr = weak_sharp_certify(p, base, 3.0, shc);
    t.pass(sr.verdict == SharpVerdict::sharp && sr.c_emp >= 2.7 && sr.c_emp <= 2.9,
           "strip: weak sharpness at radius 3 with empirical constant near sqrt(8)");
  } catch (const std::exception& e) {
    t.error("strip fixture", e.what());
  }
}

void fixture_sqrt_abs(FixtureTable& t) {
  const ProblemSpec p = line_problem(make_sqrt_abs(1));
  const AsymCfg acfg;
  try {
    RecessionCfg rcfg;
    const CheckResult rc = recession_check(p, CheckKind::plain, 0.0, rcfg);
    bool witness_ok = rc.witness_dir && std::abs(rc.witness_dir->norm() - 1.0) <= 1e-9 &&
                      rc.witness_value && rc.witness_value->is_finite() &&
                      std::abs(rc.witness_value->raw()) <= 1e-6;
    t.pass(rc.verdict == Verdict::violated && witness_ok,
           "sqrt_abs: plain recession condition is violated with a unit witness of value 0");

    const CheckResult rq = recession_check(p, CheckKind::q, 0.0, rcfg);
    const Estimate eq = q_asym_fn(p.f, Eigen::VectorXd::Ones(1), acfg);
    t.pass(rq.verdict == Verdict::holds && eq.value.is_plus_inf() && eq.divergence_flag,
           "sqrt_abs: q-recession condition holds; the q-slope at +-1 diverges past every cap");

    const SolverResult base = solve(p, SolveCfg{});
    bool sol_ok = base.status == SolveStatus::optimal && !base.sol.points.empty();
    for (const auto& pt : base.sol.points) sol_ok = sol_ok && pt.norm() <= 1e-3;
    t.pass(sol_ok && std::abs(base.f_star.raw()) <= 1e-3,
           "sqrt_abs: solver pins the minimizer at the origin within 1e-3");

    SharpCfg shc;
    shc.samples = 20000;
    const SharpReport sr = weak_sharp_certify(p, base, 4.0, shc);
    t.pass(sr.verdict == SharpVerdict::not_sharp && std::abs(sr.fit_exponent + 0.5) <= 0.05,
           "sqrt_abs: no sharp minimum at infinity; growth ratios decay like 1/sqrt(norm)");

    AsymCfg fine = acfg;
    const Estimate s6 = sublevel_asym_fn(p.f, 1.0, Eigen::VectorXd::Ones(1), fine);
    fine.t_min = 1e-8;
    const Estimate s8 = sublevel_asym_fn(p.f, 1.0, Eigen::VectorXd::Ones(1), fine);
    std::ostringstream os;
    os << "sqrt_abs: sublevel slope estimate at lambda=1 is a lower bound that grows as t_min "
          "shrinks ("
       << s6.value.str() << " at t_min=1e-6, " << s8.value.str()
       << " at t_min=1e-8, scaling like t_min^-1/2); a commonly quoted closed form bounds it by 2, "
          "which the defining supremum does not";
    t.discrepancy(os.str());
  } catch (const std::exception& e) {
    t.error("sqrt_abs fixture", e.what());
  }
}

void fixture_rational_squash(FixtureTable& t) {
  const ProblemSpec p = line_problem(make_rational_squash(1));
  const AsymCfg acfg;
  try {
    const double closed = 3.0 * std::sqrt(3.0) / 8.0;
    const Estimate eq = q_asym_fn(p.f, Eigen::VectorXd::Ones(1), acfg);
    t.pass(eq.value.is_finite() && std::abs(eq.value.raw() - closed) <= 1e-12,
           "rational_squash: closed-form q-slope equals 3*sqrt(3)/8");

    AsymCfg forced = acfg;
    forced.force_sampled = true;
    const Estimate es = q_asym_fn(p.f, Eigen::VectorXd::Ones(1), forced);
    t.pass(es.value.is_finite() && std::abs(es.value.raw() - closed) <= 2e-3,
           "rational_squash: sampled q-slope matches the closed form within 2e-3");

    RecessionCfg rcfg;
    const CoercivityReport co = coercivity_probe(p, rcfg);
    t.pass(co.verdict == CoercivityVerdict::not_coercive,
           "rational_squash: coercivity probe reports flat tails (not coercive)");

    const SolverResult base = solve(p, SolveCfg{});
    const CheckResult rq = recession_check(p, CheckKind::q, 0.0, rcfg);
    bool compact = base.status == SolveStatus::optimal && !base.sol.unbounded_dir;
    for (const auto& pt : base.sol.points) compact = compact && pt.norm() <= 1e-3;
    t.pass(compact && rq.verdict == Verdict::holds,
           "rational_squash: bounded solution set and q-recession condition agree (both hold)");
  } catch (const std::exception& e) {
    t.error("rational_squash fixture", e.what());
  }
}

void fixture_halfline(FixtureTable& t) {
  try {
    const ProblemSpec slope = halfline_problem(make_affine(Eigen::VectorXd::Ones(1), 0.0));
    const SonCqReport sq = son_cq_check(slope, SonCqCfg{});
    t.pass(sq.verdict == Verdict::holds && std::abs(sq.delta - 1.0) <= 1e-9,
           "half-line, f(x)=x: stationarity-at-infinity condition holds with gap 1");
    RecessionCfg rcfg;
    const CheckResult rc = recession_check(slope, CheckKind::plain, 0.0, rcfg);
    t.pass(rc.verdict == Verdict::holds && rc.exact_mode,
           "half-line, f(x)=x: recession condition holds in exact mode");
    const SolverResult base = solve(slope, SolveCfg{});
    t.pass(base.status == SolveStatus::optimal && std::abs(base.f_star.raw()) <= 1e-12,
           "half-line, f(x)=x: minimum 0 at the origin");
    SharpCfg shc;
    shc.samples = 10000;
    const SharpReport sr = weak_sharp_certify(slope, base, 5.0, shc);
    t.pass(sr.verdict == SharpVerdict::sharp && std::abs(sr.c_emp - 1.0) <= 1e-9,
           "half-line, f(x)=x: sharp with empirical constant exactly 1");

    const ProblemSpec flat = halfline_problem(make_affine(Eigen::VectorXd::Zero(1), 0.0));
    const CheckResult rf = recession_check(flat, CheckKind::plain, 0.0, rcfg);
    t.pass(rf.verdict == Verdict::violated,
           "half-line, f=0: recession condition is violated (flat ray)");
    StabilityGridCfg gcfg;
    gcfg.rings = 4;
    gcfg.rays = 2;
    const StabilityReport rep = perturb_grid(flat, 0.4, gcfg);
    bool ok = true;
    for (const auto& rec : rep.records) {
      if (rec.ring == 0) continue;
      if (rec.u[0] > 0)
        ok = ok && rec.status == SolveStatus::unbounded_below && rec.mu.is_minus_inf();
      else
        ok = ok && rec.status == SolveStatus::optimal && std::abs(rec.mu.raw()) <= 1e-12;
    }
    t.pass(ok,
           "half-line, f=0: every positive tilt is unbounded below, every negative tilt "
           "solves at the origin");
  } catch (const std::exception& e) {
    t.error("half-line fixture", e.what());
  }
}

void fixture_plus_sqrt(FixtureTable& t) {
  const ProblemSpec p = line_problem(make_plus_sqrt(1));
  try {
    RecessionCfg rcfg;
    const CheckResult rq = recession_check(p, CheckKind::q, 0.0, rcfg);
    t.pass(rq.verdict == Verdict::holds, "plus_sqrt: q-recession condition holds");

    const SolverResult base = solve(p, SolveCfg{});
    bool sol_ok = base.status == SolveStatus::optimal && std::abs(base.f_star.raw()) <= 1e-3;
    for (const auto& pt : base.sol.points) sol_ok = sol_ok && pt.norm() <= 1e-3;
    t.pass(sol_ok, "plus_sqrt: unique minimizer at the origin");

    StabilityGridCfg gcfg;
    gcfg.rings = 3;
    gcfg.rays = 2;
    const StabilityReport rep = perturb_grid(p, 0.5, gcfg);
    const SemiDiag diag = semicontinuity_diagnostics(rep);
    t.pass(diag.solset_usc && diag.solset_lsc && diag.value_usc && diag.value_lsc,
           "plus_sqrt: tilt sweep keeps the solution map and value continuous at 0");

    Eigen::VectorXd lo = Eigen::VectorXd::Constant(1, -10.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(1, 10.0);
    AlphaCfg ac;
    ac.tilts = 8;
    ac.qc.pairs = 500;
    const AlphaResult ar = alpha_robust_test(p.f, 0.9, make_box(lo, hi), ac);
    t.pass(ar.verdict == Verdict::holds,
           "plus_sqrt: quasiconvexity survives every tested tilt of norm < 0.9");
  } catch (const std::exception& e) {
    t.error("plus_sqrt fixture", e.what());
  }
}

int cmd_fixtures(const Opts& o) {
  FixtureTable t;
  fixture_strip(t);
  fixture_sqrt_abs(t);
  fixture_rational_squash(t);
  fixture_halfline(t);
  fixture_plus_sqrt(t);
  emit(t.str(), o.out);
  return t.failures() == 0 ? 0 : 1;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{
      "recede: asymptotic cones, generalized asymptotic functions, recession conditions, "
      "variational analysis at infinity, and tilt-stability experiments"};
  app.require_subcommand(1);
  Opts o;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "problem document (JSON)")->required();
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "override the document RNG seed");
    sub->add_option("--out", o.out, "write the report to a file instead of stdout");
    sub->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* cone = app.add_subcommand("cone", "asymptotic cone of the feasible set");
  add_input(cone);
  add_common(cone);

  CLI::App* asymfn = app.add_subcommand("asymfn", "asymptotic function estimate along a direction");
  add_input(asymfn);
  add_common(asymfn);
  asymfn->add_option("--dir", o.dir_text, "direction, comma-separated floats")->required();
  asymfn->add_option("--kind", o.kind, "plain | q | sublevel");
  asymfn->add_option("--lambda", o.lambda, "sublevel height (kind=sublevel)");

  CLI::App* check = app.add_subcommand("check", "recession condition verdict");
  add_input(check);
  add_common(check);
  check->add_option("--kind", o.kind, "plain | q | sublevel");
  check->add_option("--lambda", o.lambda, "sublevel height (kind=sublevel)");

  CLI::App* infinity =
      app.add_subcommand("infinity", "recession and stationarity-at-infinity verdicts side by side");
  add_input(infinity);
  add_common(infinity);

  CLI::App* solve_cmd = app.add_subcommand("solve", "minimize f over X");
  add_input(solve_cmd);
  add_common(solve_cmd);

  CLI::App* stability = app.add_subcommand("stability", "tilt-perturbation sweep and diagnostics");
  add_input(stability);
  add_common(stability);
  stability->add_option("--eps", o.eps, "tilt ball radius");
  stability->add_option("--rings", o.rings, "grid rings");
  stability->add_option("--rays", o.rays, "grid rays");

  CLI::App* sharp = app.add_subcommand("sharp", "empirical weak-sharpness certificate");
  add_input(sharp);
  add_common(sharp);
  sharp->add_option("--R", o.radius, "inner sampling radius");
  sharp->add_option("--samples", o.samples, "accepted-sample target");

  CLI::App* fixtures = app.add_subcommand("fixtures", "run the built-in example suite");
  fixtures->add_option("--out", o.out, "write the table to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  o.seed_set = asymfn->count("--seed") || check->count("--seed") || cone->count("--seed") ||
               infinity->count("--seed") || solve_cmd->count("--seed") ||
               stability->count("--seed") || sharp->count("--seed");
  o.lambda_set = asymfn->count("--lambda") || check->count("--lambda");

  try {
    if (cone->parsed()) return cmd_cone(o);
    if (asymfn->parsed()) return cmd_asymfn(o);
    if (check->parsed()) return cmd_check(o);
    if (infinity->parsed()) return cmd_infinity(o);
    if (solve_cmd->parsed()) return cmd_solve(o);
    if (stability->parsed()) return cmd_stability(o);
    if (sharp->parsed()) return cmd_sharp(o);
    if (fixtures->parsed()) return cmd_fixtures(o);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace recede
