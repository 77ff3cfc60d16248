#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "recede/errors.hpp"
#include "recede/ext_real.hpp"

namespace recede {

enum class FunctionKind {
  affine,           // c.x + beta
  quadratic,        // 0.5 x'Qx + c.x + beta
  pnorm,            // |x|_p, p >= 1
  sqrt_abs,         // sum_i sqrt|x_i|
  rational_squash,  // |x|^2 / (1 + |x|^2)
  cap_abs,          // min(sum_i |x_i|, 1)
  plus_sqrt,        // sum_i |x_i| + sum_i sqrt|x_i|
  tilt,             // base(x) - u.x
  blackbox,
};

struct FunctionFlags {
  bool convex = false;
  bool quasiconvex = false;
  bool smooth_away_from_kinks = false;
  bool closed_form_asymptotics = false;
};

struct FunctionModel {
  FunctionKind kind = FunctionKind::affine;
  int dim = 0;
  Eigen::MatrixXd Q;  // quadratic
  Eigen::VectorXd c;  // affine, quadratic
  double beta = 0.0;
  double p = 2.0;                           // pnorm
  std::shared_ptr<const FunctionModel> base;  // tilt
  Eigen::VectorXd u;                        // tilt
  std::function<double(const Eigen::VectorXd&)> eval_oracle;          // blackbox
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_oracle;  // blackbox, optional
  FunctionFlags flags;
};

FunctionModel make_affine(const Eigen::VectorXd& c, double beta);
// Q symmetrized to (Q+Q')/2; *was_asymmetric reports drift above 1e-12.
FunctionModel make_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, double beta,
                             bool* was_asymmetric = nullptr);
FunctionModel make_pnorm(int dim, double p);
FunctionModel make_sqrt_abs(int dim);
FunctionModel make_rational_squash(int dim);
FunctionModel make_cap_abs(int dim);
FunctionModel make_plus_sqrt(int dim);
FunctionModel make_tilt(FunctionModel base, const Eigen::VectorXd& u);
FunctionModel make_blackbox(int dim, std::function<double(const Eigen::VectorXd&)> eval,
                            std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad = nullptr,
                            FunctionFlags flags = {});

bool matrix_psd(const Eigen::MatrixXd& q, double eig_floor = -1e-10);

enum class SetKind { whole_space, box, ball, polyhedron, union_of };

struct SetModel {
  SetKind kind = SetKind::whole_space;
  int dim = 0;
  Eigen::VectorXd lo, hi;  // box; +/-inf entries allowed
  Eigen::VectorXd center;  // ball
  double radius = 0.0;     // ball
  Eigen::MatrixXd A;       // polyhedron {Ax <= b}
  Eigen::VectorXd b;
  std::vector<SetModel> members;  // union
};

SetModel make_whole_space(int dim);
SetModel make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
SetModel make_ball(const Eigen::VectorXd& center, double radius);
SetModel make_polyhedron(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
SetModel make_union(std::vector<SetModel> members);

struct Options {
  std::uint64_t seed = 42;
  double t_min = 1e-6;
  double t_max = 1e8;
  int samples = 4096;
};

struct ProblemSpec {
  int dimension = 0;
  FunctionModel f;
  SetModel set;
  Options options;
};

// Throws on dimension drift or an empty feasible set.
void validate(const ProblemSpec& p);

ExtReal eval(const FunctionModel& f, const Eigen::VectorXd& x);
// Analytic gradient; NonSmoothPoint within 1e-9 of a kink set.
Eigen::VectorXd grad(const FunctionModel& f, const Eigen::VectorXd& x);
// Conservative proxy for the distance from x to the kink set of f (inf if none).
double kink_distance(const FunctionModel& f, const Eigen::VectorXd& x);

bool member(const SetModel& x_set, const Eigen::VectorXd& x, double tol = 1e-9);
// Euclidean projection; Dykstra sweeps for multi-row polyhedra.
Eigen::VectorXd project(const SetModel& x_set, const Eigen::VectorXd& x, double tol = 1e-10);
// Any feasible point (LP probe for polyhedra); throws InfeasibleSet/EmptySet.
Eigen::VectorXd feasible_point(const SetModel& x_set);

// Flattens tilt-of-affine and tilt-of-quadratic into the base kind with the
// shifted linear term; other tilts are returned unchanged. Gives closed-form
// paths a second, independent route to tilted values.
FunctionModel absorb_tilt(const FunctionModel& f);

const char* function_kind_name(FunctionKind k);
const char* set_kind_name(SetKind k);

}  // namespace recede
