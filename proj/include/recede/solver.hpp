#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recede/ext_real.hpp"
#include "recede/models.hpp"

namespace recede {

enum class SolveStatus { optimal, unbounded_below, infeasible, max_iter };
const char* solve_status_name(SolveStatus s);

// Finite representation of the solution set: cloud points are minimizers (or
// vertices of the optimal face when hull_flag is set); unbounded_dir carries a
// recession direction of the optimal face when it is not compact.
struct SolCloud {
  std::vector<Eigen::VectorXd> points;
  bool hull_flag = false;
  double cluster_radius = 1e-4;
  std::optional<Eigen::VectorXd> unbounded_dir;
};

struct SolverResult {
  SolveStatus status = SolveStatus::optimal;
  ExtReal f_star = 0.0;
  SolCloud sol;
  std::optional<Eigen::VectorXd> certificate;  // descent ray for unbounded_below
  bool exact_mode = false;
  std::string note;
};

struct SolveCfg {
  int starts = 64;
  int max_iters = 2000;        // per start
  double armijo = 1e-4;
  double cluster_radius = 1e-4;
  double value_window = 1e-6;  // terminals within this of the best join the cloud
  std::uint64_t seed = 42;
  double box_halfwidth = 10.0;  // start sampling window
  bool force_multistart = false;
};

// Minimize f over X. Exact KKT active-set enumeration for affine/PSD-quadratic
// objectives over halfspace sets (with optimal-face vertex recovery);
// multistart projected descent plus compass polish otherwise. Unboundedness is
// screened first via recession slopes.
SolverResult solve(const ProblemSpec& p, const SolveCfg& cfg = {});

// Distance from x to the represented solution set: nearest cloud point, or
// exact distance to the convex hull of the cloud when hull_flag is set
// (support enumeration up to Caratheodory size).
double dist_to_solset(const Eigen::VectorXd& x, const SolCloud& sol);

}  // namespace recede
