#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "recede/conditions.hpp"
#include "recede/models.hpp"

namespace recede {

// Union of finitely generated cones; piece rows are the generators (a piece
// with zero rows is the origin cone {0}).
struct InfNormalCone {
  int dim = 0;
  std::vector<Eigen::MatrixXd> pieces;
};

// Exact for polyhedra: each nonempty unbounded face {A_I x = b_I, rest <=}
// contributes the cone generated by the rows A_I. Bounded sets contribute
// nothing; the whole space contributes {0}.
InfNormalCone normal_cone_at_infinity(const SetModel& x_set);

struct SubdiffCfg {
  std::vector<double> shells{1e2, 1e3, 1e4};  // sample radii, ascending
  int samples = 10000;                        // gradient samples per shell
  double cap_g = 1e3;                         // gradient norms above: unbounded ray
  double cluster_radius = 0.05;
  std::uint64_t seed = 42;
};

// Gradient limit points at infinity: finite representatives (norm <= cap) that
// persist across shells, plus unit directions of diverging gradients.
struct InfSubdiff {
  int dim = 0;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> unbounded_rays;
  double cap_g = 1e3;
  bool exact = false;  // affine: points == {c} exactly
};

InfSubdiff subdiff_at_infinity(const FunctionModel& f, const SubdiffCfg& cfg);

struct SonCqCfg {
  SubdiffCfg subdiff;
  double fail_tol = 1e-6;  // delta at or below: the criticality condition fails
  double hold_tol = 1e-3;  // delta at or above: it holds
  bool force_sampled = false;
};

// Is 0 outside the sum of the subdifferential at infinity and the normal cone
// at infinity? delta = min |g + nu| over the two representations; exact
// minimization for affine/quadratic f, sampled representatives otherwise.
struct SonCqReport {
  Verdict verdict = Verdict::inconclusive;  // holds: 0 is outside the sum
  double delta = 0.0;
  bool exact_mode = false;
  Eigen::VectorXd arg_g, arg_nu;  // minimizing pair (when a piece exists)
  InfNormalCone ncone;
  InfSubdiff subdiff;
  std::string note;
};

SonCqReport son_cq_check(const ProblemSpec& p, const SonCqCfg& cfg);

}  // namespace recede
