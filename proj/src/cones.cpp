#include "recede/cones.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "recede/lp.hpp"
#include "recede/rng.hpp"

namespace recede {
namespace {

const double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd out = a;
  for (int i = 0; i < out.rows(); ++i) {
    double norm = out.row(i).norm();
    if (norm > 0) out.row(i) /= norm;
  }
  return out;
}

}  // namespace

ConeRep make_zero_cone(int dim) {
  ConeRep c;
  c.kind = ConeKind::zero;
  c.dim = dim;
  return c;
}

ConeRep make_whole_cone(int dim) {
  ConeRep c;
  c.kind = ConeKind::whole;
  c.dim = dim;
  return c;
}

std::optional<Eigen::VectorXd> cone_has_nonzero(const Eigen::MatrixXd& a_eq,
                                                const Eigen::MatrixXd& a_in) {
  const int n = static_cast<int>(a_eq.cols() > 0 ? a_eq.cols() : a_in.cols());
  Eigen::VectorXd b_eq_base = Eigen::VectorXd::Zero(a_eq.rows());
  Eigen::VectorXd b_in = Eigen::VectorXd::Zero(a_in.rows());
  for (int i = 0; i < n; ++i) {
    for (double sigma : {1.0, -1.0}) {
      // Pin u_i = sigma; any nonzero cone element scales to hit some pin.
      Eigen::MatrixXd eq(a_eq.rows() + 1, n);
      Eigen::VectorXd beq(a_eq.rows() + 1);
      if (a_eq.rows() > 0) {
        eq.topRows(a_eq.rows()) = a_eq;
        beq.head(a_eq.rows()) = b_eq_base;
      }
      eq.row(eq.rows() - 1) = Eigen::RowVectorXd::Unit(n, i);
      beq[eq.rows() - 1] = sigma;
      auto sol = lp_feasible(eq, beq, a_in, b_in);
      if (sol) return sol;
    }
  }
  return std::nullopt;
}

ConeRep make_polyhedral_cone(const Eigen::MatrixXd& a_rows, int dim) {
  if (a_rows.rows() == 0) return make_whole_cone(dim);
  if (a_rows.cols() != dim) fail(ErrorCode::dimension_mismatch, "polyhedral cone: bad row width");
  Eigen::MatrixXd a = normalize_rows(a_rows);
  if (!cone_has_nonzero(Eigen::MatrixXd(0, dim), a)) return make_zero_cone(dim);
  ConeRep c;
  c.kind = ConeKind::polyhedral;
  c.dim = dim;
  c.A = a;
  return c;
}

ConeRep make_ray_union(std::vector<ConeRep> pieces) {
  if (pieces.empty()) fail(ErrorCode::validation_error, "ray_union: no pieces");
  for (const auto& p : pieces)
    if (p.dim != pieces.front().dim)
      fail(ErrorCode::dimension_mismatch, "ray_union: pieces must share dimension");
  bool all_zero = true;
  for (const auto& p : pieces) all_zero = all_zero && p.kind == ConeKind::zero;
  if (all_zero) return make_zero_cone(pieces.front().dim);
  ConeRep c;
  c.kind = ConeKind::ray_union;
  c.dim = pieces.front().dim;
  c.pieces = std::move(pieces);
  return c;
}

ConeRep make_sampled_cone(std::vector<Eigen::VectorXd> dirs, double resolution) {
  ConeRep c;
  c.kind = ConeKind::sampled;
  c.resolution = resolution;
  if (dirs.empty()) fail(ErrorCode::validation_error, "sampled cone: no directions");
  c.dim = static_cast<int>(dirs.front().size());
  for (auto& d : dirs) {
    double norm = d.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
      if (norm == 0) fail(ErrorCode::validation_error, "sampled cone: zero direction");
      d /= norm;
    }
  }
  c.dirs = std::move(dirs);
  return c;
}

ConeRep asymptotic_cone(const SetModel& x_set) {
  switch (x_set.kind) {
    case SetKind::whole_space:
      return make_whole_cone(x_set.dim);
    case SetKind::ball:
      return make_zero_cone(x_set.dim);
    case SetKind::box: {
      // Finite faces pin the matching sign of u; doubly infinite axes are free.
      std::vector<Eigen::RowVectorXd> rows;
      for (int i = 0; i < x_set.dim; ++i) {
        if (x_set.hi[i] < kInf) rows.push_back(Eigen::RowVectorXd::Unit(x_set.dim, i));
        if (x_set.lo[i] > -kInf) rows.push_back(-Eigen::RowVectorXd::Unit(x_set.dim, i));
      }
      Eigen::MatrixXd a(static_cast<int>(rows.size()), x_set.dim);
      for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<int>(i)) = rows[i];
      return make_polyhedral_cone(a, x_set.dim);
    }
    case SetKind::polyhedron: {
      if (!lp_feasible_ineq(x_set.A, x_set.b)) fail(ErrorCode::empty_set, "asymptotic_cone: X empty");
      return make_polyhedral_cone(x_set.A, x_set.dim);
    }
    case SetKind::union_of: {
      std::vector<ConeRep> pieces;
      bool any_nonempty = false;
      for (const auto& m : x_set.members) {
        try {
          pieces.push_back(asymptotic_cone(m));
          any_nonempty = true;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::empty_set) throw;
        }
      }
      if (!any_nonempty) fail(ErrorCode::empty_set, "asymptotic_cone: all union members empty");
      return make_ray_union(std::move(pieces));
    }
  }
  fail(ErrorCode::validation_error, "asymptotic_cone: unknown kind");
}

bool cone_contains(const ConeRep& c, const Eigen::VectorXd& u, double tol) {
  if (static_cast<int>(u.size()) != c.dim)
    fail(ErrorCode::dimension_mismatch, "cone_contains: dimension mismatch");
  switch (c.kind) {
    case ConeKind::zero:
      return u.norm() <= tol;
    case ConeKind::whole:
      return true;
    case ConeKind::polyhedral:
      return (c.A * u).maxCoeff() <= tol * u.norm();
    case ConeKind::ray_union:
      for (const auto& p : c.pieces)
        if (cone_contains(p, u, tol)) return true;
      return false;
    case ConeKind::sampled: {
      double norm = u.norm();
      if (norm <= tol) return true;
      for (const auto& d : c.dirs)
        if ((u / norm - d).norm() <= c.resolution) return true;
      return false;
    }
  }
  return false;
}

namespace {

// Cyclic corrections onto {a_i . v <= 0}; converges to a cone point (POCS).
std::optional<Eigen::VectorXd> push_into_cone(const Eigen::MatrixXd& a, Eigen::VectorXd v) {
  for (int sweep = 0; sweep < 500; ++sweep) {
    double worst = 0;
    for (int i = 0; i < a.rows(); ++i) {
      double viol = a.row(i).dot(v);
      if (viol > 0) v -= viol * a.row(i).transpose();  // rows are unit length
      worst = std::max(worst, viol);
    }
    if (worst <= 1e-13) break;
  }
  double norm = v.norm();
  if (norm < 1e-7) return std::nullopt;
  v /= norm;
  if ((a * v).maxCoeff() > 1e-9) return std::nullopt;
  return v;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_cone_unit(const ConeRep& c, int k, std::uint64_t seed) {
  if (c.kind == ConeKind::zero) fail(ErrorCode::degenerate_cone, "sample_cone_unit: cone is {0}");
  CounterRng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(k);
  if (c.kind == ConeKind::whole) {
    for (int i = 0; i < k; ++i) out.push_back(rng.sphere(streams::cone_unit, i, c.dim));
    return out;
  }
  if (c.kind == ConeKind::sampled) {
    for (int i = 0; i < k; ++i) out.push_back(c.dirs[i % c.dirs.size()]);
    return out;
  }
  if (c.kind == ConeKind::ray_union) {
    std::vector<const ConeRep*> live;
    for (const auto& p : c.pieces)
      if (p.kind != ConeKind::zero) live.push_back(&p);
    for (int i = 0; i < k; ++i) {
      auto piece = sample_cone_unit(*live[i % live.size()], 1, seed ^ (0x517cc1b727220a95ull + i));
      out.push_back(piece.front());
    }
    return out;
  }
  // polyhedral
  std::uint64_t proposals = 0;
  while (static_cast<int>(out.size()) < k) {
    Eigen::VectorXd v = rng.sphere(streams::cone_unit, proposals, c.dim);
    ++proposals;
    if (auto unit = push_into_cone(c.A, v)) out.push_back(*unit);
    if (proposals >= 1000000 && out.size() < proposals / 1000)
      fail(ErrorCode::sampling_stalled, "sample_cone_unit: acceptance below 0.1%");
  }
  return out;
}

Eigen::VectorXd project_onto_halfspace_cone(const Eigen::MatrixXd& a_rows, const Eigen::VectorXd& u) {
  const int m = static_cast<int>(a_rows.rows());
  const int n = static_cast<int>(u.size());
  if (m > 16) fail(ErrorCode::too_many_constraints, "cone projection: m > 16");
  if (m == 0) return u;
  Eigen::MatrixXd a = normalize_rows(a_rows);
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);  // apex is always feasible
  double best_dist = u.norm();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    // Candidate: projection of u onto null(A_S); keep it if it lands in the cone.
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    Eigen::VectorXd v;
    if (idx.empty()) {
      v = u;
    } else {
      Eigen::MatrixXd as(static_cast<int>(idx.size()), n);
      for (std::size_t i = 0; i < idx.size(); ++i) as.row(static_cast<int>(i)) = a.row(idx[i]);
      Eigen::MatrixXd gram = as * as.transpose();
      Eigen::VectorXd lambda = gram.completeOrthogonalDecomposition().solve(as * u);
      v = u - as.transpose() * lambda;
    }
    if ((a * v).maxCoeff() > 1e-10 * (1.0 + u.norm())) continue;
    double dist = (u - v).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = v;
    }
  }
  return best;
}

Eigen::VectorXd project_onto_generated_cone(const Eigen::MatrixXd& g, const Eigen::VectorXd& u) {
  const int m = static_cast<int>(g.cols());
  if (m > 16) fail(ErrorCode::too_many_constraints, "cone projection: too many generators");
  Eigen::VectorXd best = Eigen::VectorXd::Zero(u.size());
  double best_dist = u.norm();
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    Eigen::MatrixXd gs(u.size(), static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) gs.col(static_cast<int>(i)) = g.col(idx[i]);
    Eigen::VectorXd lambda = gs.completeOrthogonalDecomposition().solve(u);
    if ((lambda.array() < -1e-12).any()) continue;
    Eigen::VectorXd v = gs * lambda;
    double dist = (u - v).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = v;
    }
  }
  return best;
}

ConeRep probe_cone(const std::function<bool(const Eigen::VectorXd&)>& member_pred,
                   const Eigen::VectorXd& anchor, int count, std::uint64_t seed, double reach_lo,
                   double reach_hi, double resolution) {
  const int n = static_cast<int>(anchor.size());
  CounterRng rng(seed);
  // Farthest feasible multiple of d from the anchor, doubling ladder plus a
  // bisection tail so nearby directions get distinguishable reaches.
  const auto reach = [&](const Eigen::VectorXd& d) -> double {
    if (!member_pred(anchor + d)) return 0.0;
    double t = 1.0;
    while (t * 2.0 <= reach_hi && member_pred(anchor + (t * 2.0) * d)) t *= 2.0;
    if (t * 2.0 > reach_hi) {
      if (member_pred(anchor + reach_hi * d)) return reach_hi;
    }
    double lo = t, hi = std::min(t * 2.0, reach_hi);
    for (int it = 0; it < 24 && hi - lo > 1e-3 * lo; ++it) {
      const double mid = 0.5 * (lo + hi);
      (member_pred(anchor + mid * d) ? lo : hi) = mid;
    }
    return lo;
  };
  std::vector<Eigen::VectorXd> dirs;
  std::vector<std::pair<double, Eigen::VectorXd>> stubs;  // promising partial reaches
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd d = rng.sphere(streams::cone_unit, i, n);
    const double t = reach(d);
    if (t >= reach_lo) {
      const Eigen::VectorXd far = anchor + t * d;
      if (far.norm() >= reach_lo) dirs.push_back(far / far.norm());
    } else if (t > 0.0) {
      stubs.emplace_back(t, d);
    }
  }
  // Thin cones dodge raw sphere samples; hill-climb the best stubs on feasible
  // reach so a wedge of any positive angle is still found.
  if (dirs.empty() && !stubs.empty()) {
    std::stable_sort(stubs.begin(), stubs.end(),
                     [](const auto& p, const auto& q) { return p.first > q.first; });
    const int climbers = std::min<std::size_t>(4, stubs.size());
    for (int b = 0; b < climbers; ++b) {
      double t_best = stubs[b].first;
      Eigen::VectorXd d_best = stubs[b].second;
      double sigma = 0.5;
      for (int j = 0; j < 96 && t_best < reach_lo && sigma > 1e-6; ++j) {
        const std::uint64_t idx = (std::uint64_t(1) << 32) + std::uint64_t(b) * 1024 + j;
        const Eigen::VectorXd prop =
            (d_best + sigma * rng.sphere(streams::cone_unit, idx, n)).normalized();
        const double t = reach(prop);
        if (t > t_best) {
          t_best = t;
          d_best = prop;
        } else {
          sigma *= 0.8;
        }
      }
      if (t_best >= reach_lo) {
        const Eigen::VectorXd far = anchor + t_best * d_best;
        if (far.norm() >= reach_lo) dirs.push_back(far / far.norm());
      }
    }
  }
  if (dirs.empty()) return make_zero_cone(n);
  return make_sampled_cone(std::move(dirs), resolution);
}

const char* cone_kind_name(ConeKind k) {
  switch (k) {
    case ConeKind::zero: return "zero";
    case ConeKind::whole: return "whole";
    case ConeKind::polyhedral: return "polyhedral";
    case ConeKind::ray_union: return "ray_union";
    case ConeKind::sampled: return "sampled";
  }
  return "unknown";
}

}  // namespace recede
