#include "recede/infinity_variational.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "recede/cones.hpp"
#include "recede/errors.hpp"
#include "recede/lp.hpp"
#include "recede/parallel.hpp"
#include "recede/rng.hpp"

namespace recede {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd box_rows(const SetModel& box, Eigen::VectorXd* rhs) {
  std::vector<std::pair<Eigen::VectorXd, double>> rows;
  for (int i = 0; i < box.dim; ++i) {
    if (std::isfinite(box.hi[i])) rows.push_back({Eigen::VectorXd::Unit(box.dim, i), box.hi[i]});
    if (std::isfinite(box.lo[i])) rows.push_back({-Eigen::VectorXd::Unit(box.dim, i), -box.lo[i]});
  }
  Eigen::MatrixXd a(static_cast<int>(rows.size()), box.dim);
  rhs->resize(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<int>(i)) = rows[i].first.transpose();
    (*rhs)[static_cast<int>(i)] = rows[i].second;
  }
  return a;
}

std::string piece_key(const Eigen::MatrixXd& piece) {
  std::vector<std::string> rows;
  for (int i = 0; i < piece.rows(); ++i) {
    std::ostringstream os;
    for (int j = 0; j < piece.cols(); ++j) {
      os.precision(12);
      os << std::round(piece(i, j) * 1e12) / 1e12 << ",";
    }
    rows.push_back(os.str());
  }
  std::sort(rows.begin(), rows.end());
  std::string key;
  for (auto& r : rows) key += r + ";";
  return key;
}

InfNormalCone polyhedron_infinity_normals(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (m > 20) fail(ErrorCode::too_many_constraints, "normal_cone_at_infinity: more than 20 rows");

  const std::uint32_t masks = 1u << m;
  std::vector<char> contributes(masks, 0);
  parallel_for(static_cast<int>(masks), [&](int mi) {
    const std::uint32_t mask = static_cast<std::uint32_t>(mi);
    std::vector<int> eq, in;
    for (int i = 0; i < m; ++i) ((mask >> i) & 1u ? eq : in).push_back(i);
    Eigen::MatrixXd a_eq(static_cast<int>(eq.size()), n), a_in(static_cast<int>(in.size()), n);
    Eigen::VectorXd b_eq(static_cast<int>(eq.size())), b_in(static_cast<int>(in.size()));
    for (std::size_t i = 0; i < eq.size(); ++i) {
      a_eq.row(static_cast<int>(i)) = a.row(eq[i]);
      b_eq[static_cast<int>(i)] = b[eq[i]];
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
      a_in.row(static_cast<int>(i)) = a.row(in[i]);
      b_in[static_cast<int>(i)] = b[in[i]];
    }
    if (!lp_feasible(a_eq, b_eq, a_in, b_in)) return;          // empty face
    if (!cone_has_nonzero(a_eq, a_in)) return;                 // bounded face
    contributes[mi] = 1;
  });

  InfNormalCone nc;
  nc.dim = n;
  std::vector<std::string> seen;
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    if (!contributes[mask]) continue;
    std::vector<int> eq;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1u) eq.push_back(i);
    Eigen::MatrixXd piece(static_cast<int>(eq.size()), n);
    for (std::size_t i = 0; i < eq.size(); ++i)
      piece.row(static_cast<int>(i)) = a.row(eq[i]) / a.row(eq[i]).norm();
    const std::string key = piece_key(piece);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    nc.pieces.push_back(std::move(piece));
  }
  return nc;
}

}  // namespace

InfNormalCone normal_cone_at_infinity(const SetModel& x_set) {
  switch (x_set.kind) {
    case SetKind::polyhedron:
      return polyhedron_infinity_normals(x_set.A, x_set.b);
    case SetKind::box: {
      Eigen::VectorXd b;
      const Eigen::MatrixXd a = box_rows(x_set, &b);
      return polyhedron_infinity_normals(a, b);
    }
    case SetKind::whole_space: {
      InfNormalCone nc;
      nc.dim = x_set.dim;
      nc.pieces.push_back(Eigen::MatrixXd(0, x_set.dim));  // {0}: normals vanish everywhere
      return nc;
    }
    case SetKind::ball: {
      InfNormalCone nc;  // bounded: no escaping sequence exists
      nc.dim = x_set.dim;
      return nc;
    }
    case SetKind::union_of:
      fail(ErrorCode::validation_error, "normal_cone_at_infinity: unions are not supported");
  }
  fail(ErrorCode::validation_error, "normal_cone_at_infinity: unknown set kind");
}

namespace {

bool subdiff_supported(const FunctionModel& f) {
  switch (f.kind) {
    case FunctionKind::affine:
    case FunctionKind::quadratic:
    case FunctionKind::rational_squash:
      return true;
    case FunctionKind::pnorm:
      return f.p > 1.0;
    case FunctionKind::tilt:
      return subdiff_supported(*f.base);
    case FunctionKind::blackbox:
      return static_cast<bool>(f.grad_oracle);
    default:
      return false;  // kink sets reach arbitrarily far out
  }
}

// Greedy radius clustering in deterministic input order.
std::vector<Eigen::VectorXd> cluster_cloud(const std::vector<Eigen::VectorXd>& cloud,
                                           double radius) {
  std::vector<Eigen::VectorXd> reps;
  for (const auto& g : cloud) {
    bool found = false;
    for (const auto& r : reps)
      if ((g - r).norm() <= radius) {
        found = true;
        break;
      }
    if (!found && reps.size() < 50000) reps.push_back(g);
  }
  return reps;
}

bool near_some(const Eigen::VectorXd& g, const std::vector<Eigen::VectorXd>& reps, double radius) {
  for (const auto& r : reps)
    if ((g - r).norm() <= radius) return true;
  return false;
}

}  // namespace

InfSubdiff subdiff_at_infinity(const FunctionModel& f, const SubdiffCfg& cfg) {
  if (cfg.shells.empty()) fail(ErrorCode::config_error, "subdiff_at_infinity: no shells");
  for (std::size_t i = 0; i < cfg.shells.size(); ++i)
    if (!(cfg.shells[i] > 0.0) || (i > 0 && cfg.shells[i] <= cfg.shells[i - 1]))
      fail(ErrorCode::config_error, "subdiff_at_infinity: shells must be positive ascending");
  if (cfg.samples < 1) fail(ErrorCode::config_error, "subdiff_at_infinity: samples must be positive");
  if (!(cfg.cap_g > 0.0) || !(cfg.cluster_radius > 0.0))
    fail(ErrorCode::config_error, "subdiff_at_infinity: cap and cluster radius must be positive");

  InfSubdiff sd;
  sd.dim = f.dim;
  sd.cap_g = cfg.cap_g;

  const FunctionModel fa = absorb_tilt(f);
  if (fa.kind == FunctionKind::affine) {
    sd.points.push_back(fa.c);
    sd.exact = true;
    return sd;
  }
  if (!subdiff_supported(fa))
    fail(ErrorCode::nonsmooth_unsupported,
         "subdiff_at_infinity: kink set is unbounded; only smooth kinds are supported");

  const CounterRng rng(cfg.seed);
  const int n = f.dim;
  std::vector<std::vector<Eigen::VectorXd>> shell_reps;
  std::vector<Eigen::VectorXd> ray_dirs;
  for (std::size_t s = 0; s < cfg.shells.size(); ++s) {
    const double R = cfg.shells[s];
    const double w = std::min(R / 2.0, cfg.cap_g);
    std::vector<Eigen::VectorXd> grads(cfg.samples, Eigen::VectorXd());
    parallel_for(cfg.samples, [&](int i) {
      const std::uint64_t idx = static_cast<std::uint64_t>(s) * cfg.samples + i;
      Eigen::VectorXd x;
      if (n == 1 || i % 2 == 0) {
        x = R * rng.sphere(streams::subdiff_sphere, idx, n);
      } else {
        // Slab design: one coordinate held small so structured gradient limit
        // sets (flat directions) are densely covered.
        const int j = static_cast<int>((i / 2) % n);  // rotate the held-small axis
        const double sj = rng.uniform(streams::subdiff_slab, 2 * idx, -w, w);
        const Eigen::VectorXd omega = rng.sphere(streams::subdiff_slab, 2 * idx + 1, n - 1);
        x = Eigen::VectorXd(n);
        x[j] = sj;
        const double scale = std::sqrt(std::max(R * R - sj * sj, 0.0));
        int k = 0;
        for (int c = 0; c < n; ++c)
          if (c != j) x[c] = scale * omega[k++];
      }
      try {
        grads[i] = grad(f, x);
      } catch (const Error&) {
        // kink grazed despite the far shell; drop the sample
      }
    });
    std::vector<Eigen::VectorXd> small;
    for (const auto& g : grads) {
      if (g.size() == 0) continue;
      if (g.norm() <= cfg.cap_g)
        small.push_back(g);
      else
        ray_dirs.push_back(g / g.norm());
    }
    shell_reps.push_back(cluster_cloud(small, cfg.cluster_radius));
  }

  // Retain clusters of the finest shell present in every coarser shell.
  const auto& fine = shell_reps.back();
  for (const auto& r : fine) {
    bool stable = true;
    for (std::size_t s = 0; s + 1 < shell_reps.size(); ++s)
      if (!near_some(r, shell_reps[s], 2.0 * cfg.cluster_radius)) {
        stable = false;
        break;
      }
    if (stable) sd.points.push_back(r);
  }
  sd.unbounded_rays = cluster_cloud(ray_dirs, cfg.cluster_radius);
  return sd;
}

namespace {

// min over y and lambda >= 0 of |Q y + c + piece^T lambda|; exact by support
// enumeration (the constrained optimum is stationary on its own support).
double exact_piece_delta(const Eigen::MatrixXd& q, const Eigen::VectorXd& c,
                         const Eigen::MatrixXd& piece, Eigen::VectorXd* arg_g,
                         Eigen::VectorXd* arg_nu) {
  const int n = static_cast<int>(c.size());
  const int k = static_cast<int>(piece.rows());
  if (k > 16) fail(ErrorCode::too_many_constraints, "criticality check: piece has too many generators");
  const int nq = q.size() ? n : 0;
  double best = kInf;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> sup;
    for (int i = 0; i < k; ++i)
      if ((mask >> i) & 1u) sup.push_back(i);
    Eigen::MatrixXd m(n, nq + static_cast<int>(sup.size()));
    if (nq) m.leftCols(n) = q;
    for (std::size_t i = 0; i < sup.size(); ++i) m.col(nq + static_cast<int>(i)) = piece.row(sup[i]).transpose();
    Eigen::VectorXd z;
    if (m.cols() == 0)
      z = Eigen::VectorXd(0);
    else
      z = m.completeOrthogonalDecomposition().solve(-c);
    bool ok = true;
    for (std::size_t i = 0; i < sup.size(); ++i)
      if (z[nq + static_cast<int>(i)] < -1e-9) ok = false;
    if (!ok) continue;
    const Eigen::VectorXd resid = (m.cols() ? (m * z + c).eval() : c);
    const double val = resid.norm();
    if (val < best) {
      best = val;
      Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < sup.size(); ++i)
        nu += z[nq + static_cast<int>(i)] * piece.row(sup[i]).transpose();
      if (arg_nu) *arg_nu = nu;
      if (arg_g) *arg_g = resid - nu;  // g = Qy + c lands on the residual minus nu
    }
  }
  return best;
}

}  // namespace

SonCqReport son_cq_check(const ProblemSpec& p, const SonCqCfg& cfg) {
  if (!(cfg.fail_tol > 0.0) || !(cfg.hold_tol > cfg.fail_tol))
    fail(ErrorCode::config_error, "son_cq_check: need 0 < fail_tol < hold_tol");
  SonCqReport r;
  r.ncone = normal_cone_at_infinity(p.set);
  r.subdiff.dim = p.dimension;
  if (r.ncone.pieces.empty()) {
    r.verdict = Verdict::holds;
    r.delta = kInf;
    r.exact_mode = true;
    r.note = "X is bounded: no normals at infinity, the sum is empty";
    return r;
  }

  const FunctionModel fa = absorb_tilt(p.f);
  const bool exact_fn = fa.kind == FunctionKind::affine || fa.kind == FunctionKind::quadratic;
  r.subdiff = subdiff_at_infinity(p.f, cfg.subdiff);

  double best = kInf;
  Eigen::VectorXd bg, bn;
  if (exact_fn && !cfg.force_sampled) {
    r.exact_mode = true;
    const Eigen::MatrixXd q = fa.kind == FunctionKind::quadratic ? fa.Q : Eigen::MatrixXd();
    for (const auto& piece : r.ncone.pieces) {
      Eigen::VectorXd g, nu;
      const double d = exact_piece_delta(q, fa.c, piece, &g, &nu);
      if (d < best) {
        best = d;
        bg = g;
        bn = nu;
      }
    }
  } else {
    for (const auto& piece : r.ncone.pieces) {
      const Eigen::MatrixXd gens = piece.transpose();  // columns generate the piece
      for (const auto& g : r.subdiff.points) {
        const Eigen::VectorXd nu = project_onto_generated_cone(gens, -g);
        const double d = (g + nu).norm();
        if (d < best) {
          best = d;
          bg = g;
          bn = nu;
        }
      }
      for (const auto& ray : r.subdiff.unbounded_rays) {
        // points t*ray with t >= cap: the cone scales, so the min sits at t=cap
        const Eigen::VectorXd proj = project_onto_generated_cone(-gens, ray);
        const double d = cfg.subdiff.cap_g * (ray - proj).norm();
        if (d < best) {
          best = d;
          bg = cfg.subdiff.cap_g * ray;
          bn = -cfg.subdiff.cap_g * proj;
        }
      }
    }
    if (r.subdiff.points.empty() && r.subdiff.unbounded_rays.empty()) {
      r.verdict = Verdict::holds;
      r.delta = kInf;
      r.note = "no gradient limit representatives: the sum is empty at sampling resolution";
      return r;
    }
  }

  r.delta = best;
  r.arg_g = bg;
  r.arg_nu = bn;
  if (best <= cfg.fail_tol) {
    r.verdict = Verdict::violated;
    r.note = "0 lies in the sum of the infinity subdifferential and normal cone";
  } else if (best >= cfg.hold_tol) {
    r.verdict = Verdict::holds;
    r.note = "the sum stays away from 0";
  } else {
    r.verdict = Verdict::inconclusive;
    r.note = "minimum distance sits inside the tolerance band";
  }
  return r;
}

}  // namespace recede
