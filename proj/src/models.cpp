#include "recede/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "recede/lp.hpp"

namespace recede {
namespace {

constexpr double kKinkTol = 1e-9;
const double kInf = std::numeric_limits<double>::infinity();

void check_dim(const FunctionModel& f, const Eigen::VectorXd& x) {
  if (static_cast<int>(x.size()) != f.dim)
    fail(ErrorCode::dimension_mismatch, "function expects dimension " + std::to_string(f.dim));
}

double abs_sum(const Eigen::VectorXd& x) { return x.cwiseAbs().sum(); }

Eigen::VectorXd sign_vec(const Eigen::VectorXd& x) {
  Eigen::VectorXd s(x.size());
  for (int i = 0; i < x.size(); ++i) s[i] = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0);
  return s;
}

}  // namespace

bool matrix_psd(const Eigen::MatrixXd& q, double eig_floor) {
  if (q.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= eig_floor;
}

FunctionModel make_affine(const Eigen::VectorXd& c, double beta) {
  FunctionModel f;
  f.kind = FunctionKind::affine;
  f.dim = static_cast<int>(c.size());
  f.c = c;
  f.beta = beta;
  f.flags = {true, true, true, true};
  return f;
}

FunctionModel make_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, double beta,
                             bool* was_asymmetric) {
  if (q.rows() != q.cols() || q.rows() != c.size())
    fail(ErrorCode::validation_error, "quadratic: Q must be square and match c");
  double drift = (q - q.transpose()).cwiseAbs().maxCoeff();
  if (was_asymmetric) *was_asymmetric = drift > 1e-12;
  FunctionModel f;
  f.kind = FunctionKind::quadratic;
  f.dim = static_cast<int>(c.size());
  f.Q = 0.5 * (q + q.transpose());
  f.c = c;
  f.beta = beta;
  bool psd = matrix_psd(f.Q);
  f.flags = {psd, psd, true, true};
  return f;
}

FunctionModel make_pnorm(int dim, double p) {
  if (dim < 1 || !(p >= 1.0) || !std::isfinite(p))
    fail(ErrorCode::validation_error, "pnorm: need dim >= 1 and finite p >= 1");
  FunctionModel f;
  f.kind = FunctionKind::pnorm;
  f.dim = dim;
  f.p = p;
  f.flags = {true, true, true, true};
  return f;
}

FunctionModel make_sqrt_abs(int dim) {
  FunctionModel f;
  f.kind = FunctionKind::sqrt_abs;
  f.dim = dim;
  f.flags = {false, dim == 1, true, true};
  return f;
}

FunctionModel make_rational_squash(int dim) {
  FunctionModel f;
  f.kind = FunctionKind::rational_squash;
  f.dim = dim;
  f.flags = {false, true, true, true};
  return f;
}

FunctionModel make_cap_abs(int dim) {
  FunctionModel f;
  f.kind = FunctionKind::cap_abs;
  f.dim = dim;
  f.flags = {false, true, true, true};
  return f;
}

FunctionModel make_plus_sqrt(int dim) {
  FunctionModel f;
  f.kind = FunctionKind::plus_sqrt;
  f.dim = dim;
  f.flags = {false, dim == 1, true, true};
  return f;
}

FunctionModel make_tilt(FunctionModel base, const Eigen::VectorXd& u) {
  if (static_cast<int>(u.size()) != base.dim)
    fail(ErrorCode::dimension_mismatch, "tilt: u must match base dimension");
  FunctionModel f;
  f.kind = FunctionKind::tilt;
  f.dim = base.dim;
  f.u = u;
  f.flags = base.flags;
  // Linear terms keep convexity; plain quasiconvexity survives only for u=0.
  f.flags.quasiconvex = base.flags.convex || (u.isZero(0.0) && base.flags.quasiconvex);
  f.base = std::make_shared<const FunctionModel>(std::move(base));
  return f;
}

FunctionModel make_blackbox(int dim, std::function<double(const Eigen::VectorXd&)> eval,
                            std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
                            FunctionFlags flags) {
  if (!eval) fail(ErrorCode::validation_error, "blackbox: evaluation oracle required");
  FunctionModel f;
  f.kind = FunctionKind::blackbox;
  f.dim = dim;
  f.eval_oracle = std::move(eval);
  f.grad_oracle = std::move(grad);
  f.flags = flags;
  f.flags.closed_form_asymptotics = false;
  return f;
}

FunctionModel absorb_tilt(const FunctionModel& f) {
  if (f.kind != FunctionKind::tilt) return f;
  FunctionModel base = absorb_tilt(*f.base);
  if (base.kind == FunctionKind::affine) return make_affine(base.c - f.u, base.beta);
  if (base.kind == FunctionKind::quadratic) return make_quadratic(base.Q, base.c - f.u, base.beta);
  FunctionModel out = f;
  out.base = std::make_shared<const FunctionModel>(std::move(base));
  return out;
}

ExtReal eval(const FunctionModel& f, const Eigen::VectorXd& x) {
  check_dim(f, x);
  switch (f.kind) {
    case FunctionKind::affine:
      return f.c.dot(x) + f.beta;
    case FunctionKind::quadratic:
      return 0.5 * x.dot(f.Q * x) + f.c.dot(x) + f.beta;
    case FunctionKind::pnorm: {
      if (f.p == 1.0) return abs_sum(x);
      if (f.p == 2.0) return x.norm();
      return std::pow(x.cwiseAbs().array().pow(f.p).sum(), 1.0 / f.p);
    }
    case FunctionKind::sqrt_abs:
      return x.cwiseAbs().cwiseSqrt().sum();
    case FunctionKind::rational_squash: {
      double s = x.squaredNorm();
      return s / (1.0 + s);
    }
    case FunctionKind::cap_abs:
      return std::min(abs_sum(x), 1.0);
    case FunctionKind::plus_sqrt:
      return abs_sum(x) + x.cwiseAbs().cwiseSqrt().sum();
    case FunctionKind::tilt:
      return eval(*f.base, x) - ExtReal(f.u.dot(x));
    case FunctionKind::blackbox:
      return ExtReal(f.eval_oracle(x));
  }
  fail(ErrorCode::validation_error, "eval: unknown kind");
}

double kink_distance(const FunctionModel& f, const Eigen::VectorXd& x) {
  switch (f.kind) {
    case FunctionKind::affine:
    case FunctionKind::quadratic:
    case FunctionKind::rational_squash:
      return kInf;
    case FunctionKind::pnorm:
      return f.p == 1.0 ? x.cwiseAbs().minCoeff() : x.norm();
    case FunctionKind::sqrt_abs:
    case FunctionKind::plus_sqrt:
      return x.cwiseAbs().minCoeff();
    case FunctionKind::cap_abs: {
      double s = abs_sum(x);
      // Inside the cap the axes are kinks; on the plateau only its rim is.
      if (s > 1.0) return s - 1.0;
      return std::min(x.cwiseAbs().minCoeff(), 1.0 - s);
    }
    case FunctionKind::tilt:
      return kink_distance(*f.base, x);
    case FunctionKind::blackbox:
      return kInf;
  }
  return kInf;
}

Eigen::VectorXd grad(const FunctionModel& f, const Eigen::VectorXd& x) {
  check_dim(f, x);
  if (kink_distance(f, x) < kKinkTol)
    fail(ErrorCode::non_smooth_point, "grad: point lies on a kink set");
  switch (f.kind) {
    case FunctionKind::affine:
      return f.c;
    case FunctionKind::quadratic:
      return f.Q * x + f.c;
    case FunctionKind::pnorm: {
      if (f.p == 1.0) return sign_vec(x);
      double norm = eval(f, x).finite();
      Eigen::VectorXd g(x.size());
      for (int i = 0; i < x.size(); ++i)
        g[i] = (x[i] == 0.0 ? 0.0
                            : std::copysign(std::pow(std::abs(x[i]) / norm, f.p - 1.0), x[i]));
      return g;
    }
    case FunctionKind::sqrt_abs: {
      Eigen::VectorXd g(x.size());
      for (int i = 0; i < x.size(); ++i) g[i] = std::copysign(0.5 / std::sqrt(std::abs(x[i])), x[i]);
      return g;
    }
    case FunctionKind::rational_squash: {
      double d = 1.0 + x.squaredNorm();
      return 2.0 * x / (d * d);
    }
    case FunctionKind::cap_abs:
      return abs_sum(x) > 1.0 ? Eigen::VectorXd::Zero(x.size()).eval() : sign_vec(x);
    case FunctionKind::plus_sqrt: {
      Eigen::VectorXd g(x.size());
      for (int i = 0; i < x.size(); ++i)
        g[i] = std::copysign(1.0 + 0.5 / std::sqrt(std::abs(x[i])), x[i]);
      return g;
    }
    case FunctionKind::tilt:
      return grad(*f.base, x) - f.u;
    case FunctionKind::blackbox:
      if (!f.grad_oracle)
        fail(ErrorCode::nonsmooth_unsupported, "grad: blackbox has no gradient oracle");
      return f.grad_oracle(x);
  }
  fail(ErrorCode::validation_error, "grad: unknown kind");
}

SetModel make_whole_space(int dim) {
  if (dim < 1) fail(ErrorCode::validation_error, "whole_space: dim >= 1");
  SetModel s;
  s.kind = SetKind::whole_space;
  s.dim = dim;
  return s;
}

SetModel make_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size()) fail(ErrorCode::dimension_mismatch, "box: lo/hi sizes differ");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) fail(ErrorCode::validation_error, "box: lo > hi at coordinate " + std::to_string(i));
  SetModel s;
  s.kind = SetKind::box;
  s.dim = static_cast<int>(lo.size());
  s.lo = lo;
  s.hi = hi;
  return s;
}

SetModel make_ball(const Eigen::VectorXd& center, double radius) {
  if (radius < 0) fail(ErrorCode::validation_error, "ball: radius must be >= 0");
  SetModel s;
  s.kind = SetKind::ball;
  s.dim = static_cast<int>(center.size());
  s.center = center;
  s.radius = radius;
  return s;
}

SetModel make_polyhedron(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) fail(ErrorCode::dimension_mismatch, "polyhedron: A rows must match b");
  if (a.rows() == 0) fail(ErrorCode::validation_error, "polyhedron: need at least one row");
  for (int i = 0; i < a.rows(); ++i)
    if (a.row(i).norm() == 0.0)
      fail(ErrorCode::validation_error, "polyhedron: all-zero row " + std::to_string(i));
  SetModel s;
  s.kind = SetKind::polyhedron;
  s.dim = static_cast<int>(a.cols());
  s.A = a;
  s.b = b;
  return s;
}

SetModel make_union(std::vector<SetModel> members) {
  if (members.empty()) fail(ErrorCode::validation_error, "union: no members");
  for (const auto& m : members)
    if (m.dim != members.front().dim)
      fail(ErrorCode::dimension_mismatch, "union: members must share dimension");
  SetModel s;
  s.kind = SetKind::union_of;
  s.dim = members.front().dim;
  s.members = std::move(members);
  return s;
}

bool member(const SetModel& x_set, const Eigen::VectorXd& x, double tol) {
  if (static_cast<int>(x.size()) != x_set.dim)
    fail(ErrorCode::dimension_mismatch, "member: dimension mismatch");
  switch (x_set.kind) {
    case SetKind::whole_space:
      return true;
    case SetKind::box:
      for (int i = 0; i < x.size(); ++i)
        if (x[i] < x_set.lo[i] - tol || x[i] > x_set.hi[i] + tol) return false;
      return true;
    case SetKind::ball:
      return (x - x_set.center).norm() <= x_set.radius + tol;
    case SetKind::polyhedron:
      return ((x_set.A * x - x_set.b).array() <= tol).all();
    case SetKind::union_of:
      for (const auto& m : x_set.members)
        if (member(m, x, tol)) return true;
      return false;
  }
  return false;
}

namespace {

Eigen::VectorXd project_halfspace(const Eigen::RowVectorXd& a, double b, const Eigen::VectorXd& x) {
  double viol = a.dot(x) - b;
  if (viol <= 0) return x;
  return x - (viol / a.squaredNorm()) * a.transpose();
}

// Dykstra/Hildreth cyclic corrections over the rows; converges to the
// Euclidean projection for nonempty polyhedra.
Eigen::VectorXd project_polyhedron(const SetModel& s, const Eigen::VectorXd& x, double tol) {
  const int m = static_cast<int>(s.A.rows());
  Eigen::VectorXd z = x;
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(m, s.dim);
  const int max_sweeps = 10000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd y = z + corr.row(i).transpose();
      Eigen::VectorXd znew = project_halfspace(s.A.row(i), s.b[i], y);
      corr.row(i) = (y - znew).transpose();
      change = std::max(change, (znew - z).norm());
      z = znew;
    }
    if (change < tol) return z;
  }
  fail(ErrorCode::max_iterations, "project: polyhedron sweeps exhausted");
}

}  // namespace

Eigen::VectorXd project(const SetModel& x_set, const Eigen::VectorXd& x, double tol) {
  if (static_cast<int>(x.size()) != x_set.dim)
    fail(ErrorCode::dimension_mismatch, "project: dimension mismatch");
  switch (x_set.kind) {
    case SetKind::whole_space:
      return x;
    case SetKind::box:
      return x.cwiseMax(x_set.lo).cwiseMin(x_set.hi);
    case SetKind::ball: {
      Eigen::VectorXd d = x - x_set.center;
      double norm = d.norm();
      if (norm <= x_set.radius) return x;
      if (norm == 0.0) return x_set.center;
      return x_set.center + (x_set.radius / norm) * d;
    }
    case SetKind::polyhedron:
      if (member(x_set, x, 0.0)) return x;
      if (x_set.A.rows() == 1) return project_halfspace(x_set.A.row(0), x_set.b[0], x);
      return project_polyhedron(x_set, x, tol);
    case SetKind::union_of:
      fail(ErrorCode::not_convex_set, "project: union is not convex");
  }
  fail(ErrorCode::validation_error, "project: unknown kind");
}

Eigen::VectorXd feasible_point(const SetModel& x_set) {
  switch (x_set.kind) {
    case SetKind::whole_space:
      return Eigen::VectorXd::Zero(x_set.dim);
    case SetKind::box: {
      Eigen::VectorXd x(x_set.dim);
      for (int i = 0; i < x_set.dim; ++i) {
        double v = 0.0;
        if (v < x_set.lo[i]) v = x_set.lo[i];
        if (v > x_set.hi[i]) v = x_set.hi[i];
        x[i] = v;
      }
      return x;
    }
    case SetKind::ball:
      return x_set.center;
    case SetKind::polyhedron: {
      if (member(x_set, Eigen::VectorXd::Zero(x_set.dim))) return Eigen::VectorXd::Zero(x_set.dim);
      auto pt = lp_feasible_ineq(x_set.A, x_set.b);
      if (!pt) fail(ErrorCode::infeasible_set, "polyhedron is empty");
      return *pt;
    }
    case SetKind::union_of:
      for (const auto& m : x_set.members) {
        try {
          return feasible_point(m);
        } catch (const Error&) {
        }
      }
      fail(ErrorCode::infeasible_set, "union: all members empty");
  }
  fail(ErrorCode::validation_error, "feasible_point: unknown kind");
}

void validate(const ProblemSpec& p) {
  if (p.dimension < 1) fail(ErrorCode::validation_error, "dimension must be >= 1");
  if (p.f.dim != p.dimension) fail(ErrorCode::dimension_mismatch, "function dimension mismatch");
  if (p.set.dim != p.dimension) fail(ErrorCode::dimension_mismatch, "set dimension mismatch");
  if (!(p.options.t_min > 0) || !(p.options.t_max > p.options.t_min))
    fail(ErrorCode::config_error, "options: need 0 < t_min < t_max");
  if (p.options.samples < 1) fail(ErrorCode::config_error, "options: samples must be >= 1");
  feasible_point(p.set);  // throws InfeasibleSet on an empty X
}

const char* function_kind_name(FunctionKind k) {
  switch (k) {
    case FunctionKind::affine: return "affine";
    case FunctionKind::quadratic: return "quadratic";
    case FunctionKind::pnorm: return "pnorm";
    case FunctionKind::sqrt_abs: return "sqrt_abs";
    case FunctionKind::rational_squash: return "rational_squash";
    case FunctionKind::cap_abs: return "cap_abs";
    case FunctionKind::plus_sqrt: return "plus_sqrt";
    case FunctionKind::tilt: return "tilt";
    case FunctionKind::blackbox: return "blackbox";
  }
  return "unknown";
}

const char* set_kind_name(SetKind k) {
  switch (k) {
    case SetKind::whole_space: return "whole_space";
    case SetKind::box: return "box";
    case SetKind::ball: return "ball";
    case SetKind::polyhedron: return "polyhedron";
    case SetKind::union_of: return "union";
  }
  return "unknown";
}

}  // namespace recede
