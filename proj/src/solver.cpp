#include "recede/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "recede/asymptotics.hpp"
#include "recede/cones.hpp"
#include "recede/errors.hpp"
#include "recede/lp.hpp"
#include "recede/parallel.hpp"
#include "recede/rng.hpp"

namespace recede {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool halfspace_rows(const SetModel& s, Eigen::MatrixXd* a, Eigen::VectorXd* b) {
  switch (s.kind) {
    case SetKind::whole_space:
      *a = Eigen::MatrixXd(0, s.dim);
      *b = Eigen::VectorXd(0);
      return true;
    case SetKind::polyhedron:
      *a = s.A;
      *b = s.b;
      return true;
    case SetKind::box: {
      std::vector<std::pair<Eigen::VectorXd, double>> rows;
      for (int i = 0; i < s.dim; ++i) {
        if (std::isfinite(s.hi[i])) rows.push_back({Eigen::VectorXd::Unit(s.dim, i), s.hi[i]});
        if (std::isfinite(s.lo[i])) rows.push_back({-Eigen::VectorXd::Unit(s.dim, i), -s.lo[i]});
      }
      a->resize(static_cast<int>(rows.size()), s.dim);
      b->resize(static_cast<int>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        a->row(static_cast<int>(i)) = rows[i].first.transpose();
        (*b)[static_cast<int>(i)] = rows[i].second;
      }
      return true;
    }
    default:
      return false;
  }
}

// Descent recession ray for the convex-quadratic class: Au <= 0, Qu = 0,
// c.u <= -1 (scale pins the slope strictly negative).
std::optional<Eigen::VectorXd> unbounded_ray_exact(const Eigen::MatrixXd& q,
                                                   const Eigen::VectorXd& c,
                                                   const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd a_in(a.rows() + 1, n);
  Eigen::VectorXd b_in = Eigen::VectorXd::Zero(a.rows() + 1);
  if (a.rows() > 0) a_in.topRows(a.rows()) = a;
  a_in.row(a.rows()) = c.transpose();
  b_in[a.rows()] = -1.0;
  const Eigen::MatrixXd a_eq = q.size() ? q : Eigen::MatrixXd(0, n);
  return lp_feasible(a_eq, Eigen::VectorXd::Zero(a_eq.rows()), a_in, b_in);
}

struct ExactOutcome {
  bool found = false;
  double value = kInf;
  Eigen::VectorXd x;
};

// KKT stationarity over every active subset; for a PSD objective any feasible
// KKT point is a global minimizer.
ExactOutcome kkt_enumerate(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, double beta,
                           const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(a.rows());
  const bool has_q = q.size() > 0;
  const std::uint32_t masks = 1u << m;

  std::vector<ExactOutcome> per_mask(masks);
  parallel_for(static_cast<int>(masks), [&](int mi) {
    const std::uint32_t mask = static_cast<std::uint32_t>(mi);
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1u) act.push_back(i);
    const int k = static_cast<int>(act.size());
    if (k > n) return;  // more tight rows than dimensions never needed
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    if (has_q) kkt.topLeftCorner(n, n) = q;
    Eigen::VectorXd rhs(n + k);
    rhs.head(n) = -c;
    for (int i = 0; i < k; ++i) {
      kkt.block(0, n + i, n, 1) = a.row(act[i]).transpose();
      kkt.block(n + i, 0, 1, n) = a.row(act[i]);
      rhs[n + i] = b[act[i]];
    }
    const Eigen::VectorXd z = kkt.completeOrthogonalDecomposition().solve(rhs);
    if ((kkt * z - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
      return;  // inconsistent stationarity system
    const Eigen::VectorXd x = z.head(n);
    for (int i = 0; i < k; ++i)
      if (z[n + i] < -1e-9) return;  // multiplier sign
    if (m > 0 && ((a * x - b).maxCoeff() > 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>() )))
      return;  // primal feasibility
    per_mask[mi].found = true;
    per_mask[mi].x = x;
    per_mask[mi].value = 0.5 * (has_q ? x.dot(q * x) : 0.0) + c.dot(x) + beta;
  });

  ExactOutcome best;
  for (std::uint32_t mask = 0; mask < masks; ++mask)
    if (per_mask[mask].found && per_mask[mask].value < best.value - 1e-15) best = per_mask[mask];
  return best;
}

void face_vertices(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                   const Eigen::VectorXd& b, const Eigen::VectorXd& xbar, SolCloud* sol) {
  const int n = static_cast<int>(c.size());
  const bool has_q = q.size() > 0;
  // Optimal face: feasibility + fixed gradient + fixed linear part.
  const Eigen::VectorXd g = has_q ? (q * xbar).eval() : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd lin = c + g;
  const int er = (has_q ? n : 0) + 1;
  Eigen::MatrixXd e(er, n);
  Eigen::VectorXd ev(er);
  if (has_q) {
    e.topRows(n) = q;
    ev.head(n) = g;
  }
  e.row(er - 1) = lin.transpose();
  ev[er - 1] = lin.dot(xbar);

  const int m = static_cast<int>(a.rows());
  std::vector<Eigen::VectorXd> verts;
  std::vector<int> subset;
  auto try_subset = [&](const std::vector<int>& t) {
    Eigen::MatrixXd sys(er + static_cast<int>(t.size()), n);
    Eigen::VectorXd rhs(er + static_cast<int>(t.size()));
    sys.topRows(er) = e;
    rhs.head(er) = ev;
    for (std::size_t i = 0; i < t.size(); ++i) {
      sys.row(er + static_cast<int>(i)) = a.row(t[i]);
      rhs[er + static_cast<int>(i)] = b[t[i]];
    }
    const auto cod = sys.completeOrthogonalDecomposition();
    if (cod.rank() < n) return;
    const Eigen::VectorXd x = cod.solve(rhs);
    if ((sys * x - rhs).lpNorm<Eigen::Infinity>() > 1e-7 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
      return;
    if (m > 0 && (a * x - b).maxCoeff() > 1e-7) return;
    for (const auto& v : verts)
      if ((v - x).norm() <= 1e-7) return;
    verts.push_back(x);
  };
  // All row subsets up to size n (the equality block supplies the rest of the rank).
  std::function<void(int, int)> rec = [&](int startc, int left) {
    try_subset(subset);
    if (left == 0) return;
    for (int i = startc; i < m; ++i) {
      subset.push_back(i);
      rec(i + 1, left - 1);
      subset.pop_back();
    }
  };
  rec(0, std::min(n, m));

  sol->hull_flag = true;
  if (verts.empty())
    sol->points.push_back(xbar);
  else
    sol->points = std::move(verts);
  if (static_cast<int>(sol->points.size()) > 16) sol->points.resize(16);
  if (auto ray = cone_has_nonzero(e, a)) sol->unbounded_dir = *ray / ray->norm();
}

struct Terminal {
  Eigen::VectorXd x;
  double value = kInf;
  bool converged = false;
  bool dived = false;  // value fell through the unboundedness floor
};

Terminal descend(const ProblemSpec& p, const Eigen::VectorXd& start, const SolveCfg& cfg) {
  Terminal t;
  Eigen::VectorXd x = start;
  double fx = eval(p.f, x).raw();
  int budget = cfg.max_iters;

  // Projected gradient with Armijo backtracking while gradients exist.
  while (budget > 0) {
    --budget;
    Eigen::VectorXd g;
    try {
      g = grad(p.f, x);
    } catch (const Error&) {
      break;  // kink or no oracle: compass handles it
    }
    if (!g.allFinite() || g.norm() <= 1e-12) break;
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-14) {
      const Eigen::VectorXd y = project(p.set, x - alpha * g);
      const double fy = eval(p.f, y).raw();
      // Floor the required decrease: approximate projections jitter by ~1e-9,
      // and an underflowed Armijo term would accept those equal-value wobble
      // steps forever.
      const double decrease = std::max(cfg.armijo / alpha * (y - x).squaredNorm(),
                                       1e-15 * (1.0 + std::abs(fx)));
      if (fy <= fx - decrease && std::isfinite(fy)) {
        if ((y - x).norm() <= 1e-12) {
          accepted = false;  // stationary: projection returns x itself
          break;
        }
        x = y;
        fx = fy;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (fx < -1e12) {
      t.x = x;
      t.value = fx;
      t.dived = true;
      return t;
    }
    if (!accepted) break;
  }

  // Compass polish: axis probes with a shrinking stencil; handles kinks.
  double h = 0.25;
  const int n = static_cast<int>(x.size());
  while (h >= 1e-9 && budget > 0) {
    bool improved = false;
    for (int i = 0; i < n && budget > 0; ++i) {
      for (double sgn : {1.0, -1.0}) {
        --budget;
        const Eigen::VectorXd y = project(p.set, x + sgn * h * Eigen::VectorXd::Unit(n, i));
        const double fy = eval(p.f, y).raw();
        if (fy < fx - 1e-15 * (1.0 + std::abs(fx))) {
          x = y;
          fx = fy;
          improved = true;
        }
      }
    }
    if (fx < -1e12) {
      t.x = x;
      t.value = fx;
      t.dived = true;
      return t;
    }
    if (!improved) h *= 0.5;
  }
  t.x = x;
  t.value = fx;
  t.converged = h < 1e-8;
  return t;
}

std::vector<Eigen::VectorXd> screen_directions(const ProblemSpec& p, const ConeRep& cone,
                                               const SolveCfg& cfg) {
  std::vector<Eigen::VectorXd> cands;
  auto push_into = [&](const Eigen::VectorXd& v) {
    if (v.norm() <= 1e-9) return;
    switch (cone.kind) {
      case ConeKind::whole:
        cands.push_back(v / v.norm());
        break;
      case ConeKind::polyhedral: {
        if (cone.A.rows() > 16) break;
        const Eigen::VectorXd w = project_onto_halfspace_cone(cone.A, v);
        if (w.norm() > 1e-9) cands.push_back(w / w.norm());
        break;
      }
      case ConeKind::ray_union: {
        for (const auto& piece : cone.pieces) {
          if (piece.kind == ConeKind::whole) {
            cands.push_back(v / v.norm());
          } else if (piece.kind == ConeKind::polyhedral && piece.A.rows() <= 16) {
            const Eigen::VectorXd w = project_onto_halfspace_cone(piece.A, v);
            if (w.norm() > 1e-9) cands.push_back(w / w.norm());
          }
        }
        break;
      }
      default:
        break;
    }
  };
  const FunctionModel fa = absorb_tilt(p.f);
  if (fa.kind == FunctionKind::quadratic) {
    // Negative curvature dives on its own; flat (kernel) directions only fall
    // through the linear term, and descent runs drift too slowly to reveal
    // them inside an iteration budget. Screen both.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fa.Q);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()[i] < 1e-10 * scale) {
        push_into(es.eigenvectors().col(i));
        push_into(-es.eigenvectors().col(i));
      }
  }
  if (fa.c.size() == p.dimension) push_into(-fa.c);
  for (const auto& d : sample_cone_unit(cone, 64, cfg.seed)) cands.push_back(d);
  return cands;
}

std::optional<Eigen::VectorXd> verify_descent_ray(const ProblemSpec& p, const Eigen::VectorXd& anchor,
                                                  const Eigen::VectorXd& d) {
  double prev = eval(p.f, anchor).raw();
  const double f0 = prev;
  for (double t : {1e2, 1e3, 1e4}) {
    const Eigen::VectorXd x = anchor + t * d;
    if (!member(p.set, x, 1e-6)) return std::nullopt;
    const double v = eval(p.f, x).raw();
    if (!(v < prev)) return std::nullopt;
    prev = v;
  }
  if (!(prev < f0 - 1.0)) return std::nullopt;  // require a real drop, not noise
  return d;
}

SolverResult multistart_solve(const ProblemSpec& p, const Eigen::VectorXd& anchor,
                              const SolveCfg& cfg) {
  SolverResult r;
  const int n = p.dimension;
  const CounterRng rng(cfg.seed);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -cfg.box_halfwidth);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, cfg.box_halfwidth);

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(anchor);
  for (auto& x : latin_hypercube(rng, streams::multistart, lo, hi, std::max(cfg.starts - 1, 0)))
    starts.push_back(project(p.set, x));

  std::vector<Terminal> terms(starts.size());
  parallel_for(static_cast<int>(starts.size()),
               [&](int i) { terms[i] = descend(p, starts[i], cfg); });

  int best = 0;
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (terms[i].value < terms[best].value - 1e-15) best = static_cast<int>(i);

  for (const auto& t : terms) {
    if (!t.dived) continue;
    Eigen::VectorXd d = t.x - anchor;
    if (d.norm() <= 1e-9) continue;
    d /= d.norm();
    AsymCfg acfg;
    acfg.seed = cfg.seed;
    const Estimate est = asym_fn(p.f, d, acfg);
    if (est.value < ExtReal(0.0) && (est.bound == BoundKind::exact || est.hi < 0.0)) {
      r.status = SolveStatus::unbounded_below;
      r.f_star = ExtReal::minus_inf();
      r.certificate = d;
      r.note = "descent run fell through the floor along a negative-slope recession ray";
      return r;
    }
  }

  r.status = terms[best].converged ? SolveStatus::optimal : SolveStatus::max_iter;
  r.f_star = terms[best].value;
  std::vector<int> order(terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a2, int b2) { return terms[a2].value < terms[b2].value; });
  for (int idx : order) {
    if (terms[idx].value > terms[best].value + cfg.value_window) break;
    bool dup = false;
    for (const auto& pt : r.sol.points)
      if ((pt - terms[idx].x).norm() <= cfg.cluster_radius) {
        dup = true;
        break;
      }
    if (!dup) r.sol.points.push_back(terms[idx].x);
  }
  r.sol.hull_flag = false;
  r.sol.cluster_radius = cfg.cluster_radius;
  return r;
}

SolverResult solve_union(const ProblemSpec& p, const SolveCfg& cfg) {
  SolverResult r;
  bool any_feasible = false;
  std::vector<SolverResult> subs;
  for (const auto& memb : p.set.members) {
    ProblemSpec sub;
    sub.dimension = p.dimension;
    sub.f = p.f;
    sub.set = memb;
    sub.options = p.options;
    SolverResult sr = solve(sub, cfg);
    if (sr.status == SolveStatus::infeasible) continue;
    any_feasible = true;
    if (sr.status == SolveStatus::unbounded_below) return sr;
    subs.push_back(std::move(sr));
  }
  if (!any_feasible) {
    r.status = SolveStatus::infeasible;
    r.f_star = ExtReal::plus_inf();
    r.note = "every union member is empty";
    return r;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < subs.size(); ++i)
    if (subs[i].f_star < subs[best].f_star) best = i;
  r = subs[best];
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (i == best) continue;
    if (!(subs[i].f_star.raw() <= subs[best].f_star.raw() + cfg.value_window)) continue;
    for (const auto& pt : subs[i].sol.points) {
      bool dup = false;
      for (const auto& q : r.sol.points)
        if ((q - pt).norm() <= cfg.cluster_radius) {
          dup = true;
          break;
        }
      if (!dup) {
        r.sol.points.push_back(pt);
        r.sol.hull_flag = false;  // points from different pieces: no single face
      }
    }
  }
  return r;
}

}  // namespace

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::unbounded_below: return "unbounded_below";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

SolverResult solve(const ProblemSpec& p, const SolveCfg& cfg) {
  if (p.set.kind == SetKind::union_of) return solve_union(p, cfg);

  SolverResult r;
  Eigen::VectorXd anchor;
  try {
    anchor = feasible_point(p.set);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::infeasible_set || e.code() == ErrorCode::empty_set) {
      r.status = SolveStatus::infeasible;
      r.f_star = ExtReal::plus_inf();
      r.note = e.what();
      return r;
    }
    throw;
  }

  const FunctionModel fa = absorb_tilt(p.f);
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  const bool rows_ok = halfspace_rows(p.set, &a, &b) && a.rows() <= 20;
  const bool exact_fn = fa.kind == FunctionKind::affine ||
                        (fa.kind == FunctionKind::quadratic && matrix_psd(fa.Q));
  if (rows_ok && exact_fn && !cfg.force_multistart) {
    const Eigen::MatrixXd q = fa.kind == FunctionKind::quadratic ? fa.Q : Eigen::MatrixXd();
    if (auto u = unbounded_ray_exact(q, fa.c, a)) {
      r.status = SolveStatus::unbounded_below;
      r.f_star = ExtReal::minus_inf();
      r.certificate = *u / u->norm();
      r.exact_mode = true;
      r.note = "recession ray with strictly negative slope";
      return r;
    }
    const ExactOutcome out = kkt_enumerate(q, fa.c, fa.beta, a, b);
    if (out.found) {
      r.status = SolveStatus::optimal;
      r.f_star = out.value;
      r.exact_mode = true;
      face_vertices(q, fa.c, a, b, out.x, &r.sol);
      r.sol.cluster_radius = cfg.cluster_radius;
      return r;
    }
    r.note = "stationarity enumeration found no candidate; fell back to multistart";
  }

  const ConeRep cone = asymptotic_cone(p.set);
  if (cone.kind != ConeKind::zero) {
    AsymCfg acfg;
    acfg.seed = cfg.seed;
    for (const auto& d : screen_directions(p, cone, cfg)) {
      const Estimate est = asym_fn(p.f, d, acfg);
      const bool negative =
          est.value < ExtReal(0.0) && (est.bound == BoundKind::exact || est.hi < 0.0);
      if (!negative) continue;
      if (auto cert = verify_descent_ray(p, anchor, d)) {
        r.status = SolveStatus::unbounded_below;
        r.f_star = ExtReal::minus_inf();
        r.certificate = *cert;
        r.note = "sampled recession direction with verified decreasing ray";
        return r;
      }
    }
  }

  SolverResult ms = multistart_solve(p, anchor, cfg);
  if (!r.note.empty()) ms.note = ms.note.empty() ? r.note : r.note + "; " + ms.note;
  return ms;
}

double dist_to_solset(const Eigen::VectorXd& x, const SolCloud& sol) {
  if (sol.points.empty()) fail(ErrorCode::empty_sol_set, "dist_to_solset: empty solution cloud");
  double best = kInf;
  for (const auto& pt : sol.points) best = std::min(best, (pt - x).norm());
  if (!sol.hull_flag || sol.points.size() < 2) return best;

  const int n = static_cast<int>(x.size());
  const int k = static_cast<int>(sol.points.size());
  const int max_support = std::min(n + 1, k);
  std::vector<int> subset;
  // Projection onto the hull sits in the relative interior of a face spanned
  // by at most n+1 vertices; over that face it solves the affine least squares.
  std::function<void(int, int)> rec = [&](int startc, int left) {
    if (static_cast<int>(subset.size()) >= 2) {
      const int t = static_cast<int>(subset.size());
      Eigen::MatrixXd v(n, t);
      for (int i = 0; i < t; ++i) v.col(i) = sol.points[subset[i]];
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(t + 1, t + 1);
      kkt.topLeftCorner(t, t) = v.transpose() * v;
      kkt.block(0, t, t, 1).setOnes();
      kkt.block(t, 0, 1, t).setOnes();
      Eigen::VectorXd rhs(t + 1);
      rhs.head(t) = v.transpose() * x;
      rhs[t] = 1.0;
      const Eigen::VectorXd lam = kkt.completeOrthogonalDecomposition().solve(rhs).head(t);
      bool ok = true;
      for (int i = 0; i < t; ++i)
        if (lam[i] < -1e-12) ok = false;
      if (ok) best = std::min(best, (v * lam - x).norm());
    }
    if (left == 0) return;
    for (int i = startc; i < k; ++i) {
      subset.push_back(i);
      rec(i + 1, left - 1);
      subset.pop_back();
    }
  };
  rec(0, max_support);
  return best;
}

}  // namespace recede
