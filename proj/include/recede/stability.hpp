#pragma once
// Linear-tilt perturbation sweeps: the optimal value mu(u) and solution cloud
// Sol(u) of  min_X f - <u,x>  over a polar grid of the ball B_eps, with
// semicontinuity diagnostics at u = 0 and empirical weak-sharpness
// certification of the unperturbed problem.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "recede/ext_real.hpp"
#include "recede/models.hpp"
#include "recede/solver.hpp"

namespace recede {

struct PerturbRecord {
  int ring = 0;  // 0 is the unperturbed record
  int ray = 0;
  Eigen::VectorXd u;
  double norm_u = 0.0;
  SolveStatus status = SolveStatus::optimal;
  ExtReal mu;
  SolCloud sol;
};

struct StabilityGridCfg {
  int rings = 4;
  int rays = 16;
  // Optional explicit unit directions; when empty the grid uses equiangular
  // rays for n = 2, the sign pair for n = 1, and seeded sphere points above.
  std::vector<Eigen::VectorXd> ray_dirs;
  SolveCfg solve;
};

struct StabilityReport {
  double epsilon = 0.0;
  int rings = 0;
  int rays = 0;
  PerturbRecord base;
  std::vector<PerturbRecord> records;  // base first, then (ring, ray) order
};

// Solves the tilted problem on every grid node; records are byte-stable for a
// fixed seed (grid nodes run in parallel, aggregation is by grid order).
StabilityReport perturb_grid(const ProblemSpec& p, double epsilon,
                             const StabilityGridCfg& cfg = {});

struct SemiRow {
  int ring = 0;
  int ray = 0;
  double norm_u = 0.0;
  double excess = 0.0;      // max over Sol(u) cloud of dist to Sol(0)
  double deficiency = 0.0;  // max over Sol(0) cloud of dist to Sol(u)
  bool skipped = false;     // record without a finite optimum
};

struct SemiDiag {
  bool solset_outer = false;  // excess ring-medians decay, inner ring small
  bool solset_usc = false;
  bool solset_lsc = false;
  bool value_usc = false;
  bool value_lsc = false;
  double inner_excess = 0.0;       // max excess on the innermost ring
  double inner_deficiency = 0.0;   // max deficiency on the innermost ring
  double value_gap_up = 0.0;       // max of mu(u) - mu(0) on the innermost ring
  double value_gap_down = 0.0;     // max of mu(0) - mu(u) on the innermost ring
  std::vector<double> excess_medians;      // one entry per ring, innermost first
  std::vector<double> deficiency_medians;  // likewise
  std::vector<SemiRow> rows;               // aligned with report.records
  int skipped_records = 0;
  std::string note;
};

// Set and value semicontinuity at u = 0 at grid resolution: excess/deficiency
// must decay in ring-median toward 0 and sit below `tol` on the innermost
// ring; mu(u) must stay within `tol` of mu(0) there. Records without a finite
// optimum are skipped from the set diagnostics and counted.
SemiDiag semicontinuity_diagnostics(const StabilityReport& rep, double tol = 0.05);

enum class SharpVerdict { sharp, not_sharp, inconclusive };
const char* sharp_verdict_name(SharpVerdict v);

struct SharpWindow {
  double lo = 0.0;
  double hi = 0.0;
  double min_ratio = 0.0;
  int count = 0;
};

struct SharpCfg {
  int samples = 20000;     // accepted-sample target (budget = attempt_factor x)
  int attempt_factor = 10;
  int doublings = 4;       // sampling reaches radius * 2^doublings
  double r_max = 0.0;      // explicit outer radius; 0 defers to doublings
  double c_min = 1e-2;
  double decay_ratio = 0.5;  // window-min drop that flags a vanishing slope
  std::uint64_t seed = 42;
};

struct SharpReport {
  SharpVerdict verdict = SharpVerdict::inconclusive;
  double c_emp = 0.0;  // min over samples of (f(x) - f*) / dist(x, Sol)
  double radius = 0.0;
  double r_max = 0.0;
  int accepted = 0;
  Eigen::VectorXd arg_x;  // sample attaining c_emp
  std::vector<SharpWindow> windows;  // dyadic norm windows [R 2^k, R 2^(k+1))
  double fit_exponent = 0.0;  // window mins ~ fit_scale * r^fit_exponent
  double fit_scale = 0.0;
  std::string note;
};

// Samples feasible points with norm in [radius, r_max] (recession-ray offsets
// from a feasible anchor mixed with radial rejection) and reports the
// empirical sharpness constant. Verdict: not_sharp when the dyadic window
// minima decay monotonically below decay_ratio of the first window (or
// vanish below 1e-4); otherwise sharp iff c_emp >= c_min.
SharpReport weak_sharp_certify(const ProblemSpec& p, const SolverResult& base, double radius,
                               const SharpCfg& cfg = {});

}  // namespace recede
