#include "recede/asymptotics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "recede/errors.hpp"
#include "recede/rng.hpp"

namespace recede {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lp_norm(const Eigen::VectorXd& d, double p) {
  if (p == 1.0) return d.lpNorm<1>();
  if (p == 2.0) return d.norm();
  double s = 0.0;
  for (int i = 0; i < d.size(); ++i) s += std::pow(std::abs(d[i]), p);
  return std::pow(s, 1.0 / p);
}

// value = +inf always carries the truncation level, so the divergence
// invariant (flag => +inf with a finite last level) holds on every route.
Estimate finalize(Estimate e, double cap) {
  if (e.value.is_plus_inf()) {
    e.divergence_flag = true;
    if (e.levels.empty() || !std::isfinite(e.levels.back())) e.levels.push_back(cap);
  }
  return e;
}

Estimate exact_estimate(ExtReal v, double cap) {
  Estimate e;
  e.value = v;
  e.method = EstimateMethod::closed;
  e.bound = BoundKind::exact;
  e.lo = v.raw();
  e.hi = v.raw();
  return finalize(e, cap);
}

// f-infinity for the catalog. nullopt when only sampling can answer.
std::optional<ExtReal> asym_closed(const FunctionModel& f0, const Eigen::VectorXd& d) {
  const FunctionModel f = absorb_tilt(f0);
  switch (f.kind) {
    case FunctionKind::affine:
      return ExtReal(f.c.dot(d));
    case FunctionKind::quadratic: {
      const double qmax = f.Q.size() ? f.Q.cwiseAbs().maxCoeff() : 0.0;
      const double s = d.dot(f.Q * d);
      const double tol_s = 1e-12 * (1.0 + d.squaredNorm()) * (1.0 + qmax);
      if (s > tol_s) return ExtReal::plus_inf();
      if (s < -tol_s) return ExtReal::minus_inf();
      const double qd = (f.Q * d).lpNorm<Eigen::Infinity>();
      if (qd > 1e-10 * (1.0 + d.norm()) * (1.0 + qmax)) return ExtReal::minus_inf();
      if (!matrix_psd(f.Q)) return ExtReal::minus_inf();
      return ExtReal(f.c.dot(d));
    }
    case FunctionKind::pnorm:
      return ExtReal(lp_norm(d, f.p));
    case FunctionKind::sqrt_abs:
    case FunctionKind::rational_squash:
    case FunctionKind::cap_abs:
      return ExtReal(0.0);  // sublinear / bounded growth
    case FunctionKind::plus_sqrt:
      return ExtReal(d.lpNorm<1>());
    case FunctionKind::tilt: {
      auto b = asym_closed(*f.base, d);
      if (!b) return std::nullopt;
      return *b - ExtReal(f.u.dot(d));
    }
    case FunctionKind::blackbox:
      return std::nullopt;
  }
  return std::nullopt;
}

// sup-of-quotients form for the catalog. Coincides with asym_closed exactly on
// the convex kinds.
std::optional<ExtReal> q_asym_closed(const FunctionModel& f0, const Eigen::VectorXd& u) {
  const FunctionModel f = absorb_tilt(f0);
  const bool zero_dir = u.lpNorm<Eigen::Infinity>() == 0.0;
  switch (f.kind) {
    case FunctionKind::affine:
      return ExtReal(f.c.dot(u));
    case FunctionKind::quadratic: {
      const double qmax = f.Q.size() ? f.Q.cwiseAbs().maxCoeff() : 0.0;
      const double qu = (f.Q * u).lpNorm<Eigen::Infinity>();
      if (qu > 1e-10 * (1.0 + u.norm()) * (1.0 + qmax)) return ExtReal::plus_inf();
      return ExtReal(f.c.dot(u));
    }
    case FunctionKind::pnorm:
      return ExtReal(lp_norm(u, f.p));
    case FunctionKind::sqrt_abs:
      return zero_dir ? ExtReal(0.0) : ExtReal::plus_inf();
    case FunctionKind::rational_squash:
      // max gradient norm 2r/(1+r^2)^2 over r >= 0, attained at r = 1/sqrt(3)
      return ExtReal(0.375 * std::sqrt(3.0) * u.norm());
    case FunctionKind::cap_abs:
      return ExtReal(u.lpNorm<1>());  // unit l1 Lipschitz bound, tight at x = 0
    case FunctionKind::plus_sqrt:
      return zero_dir ? ExtReal(0.0) : ExtReal::plus_inf();
    case FunctionKind::tilt: {
      auto b = q_asym_closed(*f.base, u);
      if (!b) return std::nullopt;
      return *b - ExtReal(f.u.dot(u));
    }
    case FunctionKind::blackbox:
      return std::nullopt;
  }
  return std::nullopt;
}

// Sup of quotients over explicit samples; eval_fn may return +inf to mark
// points outside an effective domain.
Estimate quotient_sup_core(const std::function<ExtReal(const Eigen::VectorXd&)>& eval_fn,
                           const Eigen::VectorXd& u, const std::vector<Eigen::VectorXd>& x_list,
                           const std::vector<double>& t_grid, double cap) {
  if (x_list.empty()) fail(ErrorCode::validation_error, "quotient estimate: empty sample set");
  if (t_grid.empty()) fail(ErrorCode::config_error, "quotient estimate: empty t grid");

  Estimate e;
  e.method = EstimateMethod::sampled;
  e.bound = BoundKind::lower;

  double best = -kInf;
  bool any_domain_point = false;
  bool diverged = false;
  const std::size_t chunk = std::max<std::size_t>(1, x_list.size() / 8);
  for (std::size_t i = 0; i < x_list.size() && !diverged; ++i) {
    const ExtReal fx = eval_fn(x_list[i]);
    if (fx.is_finite()) {
      any_domain_point = true;
      for (double t : t_grid) {
        const ExtReal fs = eval_fn(x_list[i] + t * u);
        if (fs.is_plus_inf()) {
          diverged = true;  // step leaves the effective domain: quotient is +inf
          break;
        }
        best = std::max(best, (fs.raw() - fx.finite()) / t);
      }
    }
    if ((i + 1) % chunk == 0 && std::isfinite(best)) e.levels.push_back(best);
  }
  if (!any_domain_point)
    fail(ErrorCode::validation_error, "quotient estimate: no sample point in the domain");

  if (diverged || best > cap) {
    e.value = ExtReal::plus_inf();
    e.lo = std::isfinite(best) ? best : cap;
    e.hi = kInf;
    return finalize(e, cap);
  }
  e.value = best;
  e.lo = best;
  e.hi = kInf;
  return finalize(e, cap);
}

std::optional<ExtReal> sampled_inf_probe(const FunctionModel& f, const AsymCfg& cfg) {
  auto xs = asym_x_samples(cfg, f.dim);
  ExtReal best = ExtReal::plus_inf();
  for (const auto& x : xs) {
    const ExtReal v = eval(f, x);
    if (v < best) best = v;
  }
  return best.is_plus_inf() ? std::nullopt : std::optional<ExtReal>(best);
}

}  // namespace

AsymCfg cfg_from_options(const Options& o) {
  AsymCfg cfg;
  cfg.seed = o.seed;
  cfg.t_min = o.t_min;
  cfg.t_max = o.t_max;
  cfg.x_samples = o.samples;
  return cfg;
}

void validate_cfg(const AsymCfg& cfg) {
  if (!(cfg.t_min > 0.0) || !std::isfinite(cfg.t_min))
    fail(ErrorCode::config_error, "t_min must be positive and finite");
  if (!(cfg.t_max > cfg.t_min) || !std::isfinite(cfg.t_max))
    fail(ErrorCode::config_error, "t_max must exceed t_min and be finite");
  if (cfg.t_count < 2) fail(ErrorCode::config_error, "t_count must be at least 2");
  if (cfg.levels < 2) fail(ErrorCode::config_error, "levels must be at least 2");
  if (!(cfg.rho0 > 0.0)) fail(ErrorCode::config_error, "rho0 must be positive");
  if (cfg.dir_samples < 1) fail(ErrorCode::config_error, "dir_samples must be positive");
  if (!(cfg.cap > 0.0)) fail(ErrorCode::config_error, "cap must be positive");
  if (cfg.x_samples < 1) fail(ErrorCode::config_error, "x_samples must be positive");
  if (!(cfg.box_halfwidth > 0.0)) fail(ErrorCode::config_error, "box_halfwidth must be positive");
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) fail(ErrorCode::config_error, "log_grid needs 0 < lo < hi");
  if (count < 2) fail(ErrorCode::config_error, "log_grid needs at least 2 points");
  std::vector<double> g(count);
  const double ratio = hi / lo;
  for (int i = 0; i < count; ++i)
    g[i] = lo * std::pow(ratio, static_cast<double>(i) / (count - 1));
  g.back() = hi;
  return g;
}

Estimate asym_fn(const FunctionModel& f, const Eigen::VectorXd& d, const AsymCfg& cfg) {
  validate_cfg(cfg);
  if (d.size() != f.dim) fail(ErrorCode::dimension_mismatch, "asym_fn: direction dimension");
  if (!cfg.force_sampled) {
    if (auto v = asym_closed(f, d)) return exact_estimate(*v, cfg.cap);
  }

  // Nested-pool liminf estimator: one master pool of (t, delta) probes, level j
  // keeps the probes with t >= T_j and |delta| <= rho_j. Levels use shrinking
  // subsets of the same pool, so the level minima can never decrease.
  const CounterRng rng(cfg.seed);
  const int n = f.dim;
  const int J = cfg.levels;
  struct Probe {
    double t, rnorm, q;
  };
  std::vector<Probe> pool;
  pool.reserve(static_cast<std::size_t>(cfg.t_count + cfg.dir_samples) * J);
  auto push_probe = [&](double t, const Eigen::VectorXd& delta) {
    const ExtReal v = eval(f, t * (d + delta));
    pool.push_back({t, delta.norm(), v.raw() / t});
  };
  for (double t : log_grid(cfg.t_min, cfg.t_max, cfg.t_count * J))
    push_probe(t, Eigen::VectorXd::Zero(n));
  const double rho_min = cfg.rho0 * std::pow(2.0, -(J - 1));
  const std::uint64_t jitters = static_cast<std::uint64_t>(cfg.dir_samples) * J;
  for (std::uint64_t i = 0; i < jitters; ++i) {
    const Eigen::VectorXd omega = rng.sphere(streams::asym_dir, i, n);
    const double r = rho_min * std::pow(cfg.rho0 / rho_min, rng.uniform(streams::asym_radius, i));
    const double t =
        cfg.t_min * std::pow(cfg.t_max / cfg.t_min, rng.uniform(streams::asym_t, i));
    push_probe(t, r * omega);
  }

  Estimate e;
  e.method = EstimateMethod::sampled;
  for (int j = 0; j < J; ++j) {
    const double t_j = cfg.t_min * std::pow(cfg.t_max / cfg.t_min, static_cast<double>(j) / J);
    const double rho_j = cfg.rho0 * std::pow(2.0, -j);
    double m = kInf;
    for (const Probe& p : pool)
      if (p.t >= t_j && p.rnorm <= rho_j) m = std::min(m, p.q);
    e.levels.push_back(m);
  }
  for (std::size_t j = 1; j < e.levels.size(); ++j)
    if (e.levels[j] < e.levels[j - 1]) e.monotone = false;

  const double m_last = e.levels[J - 1];
  const double m_prev = e.levels[J - 2];
  if (!std::isfinite(m_last)) {
    // every top-level probe was outside the effective domain (+inf) or the
    // evaluations themselves diverged.
    e.value = m_last > 0 ? ExtReal::plus_inf() : ExtReal::minus_inf();
    e.bound = m_last > 0 ? BoundKind::lower : BoundKind::upper;
    e.lo = m_last > 0 ? cfg.cap : -kInf;
    e.hi = m_last > 0 ? kInf : -cfg.cap;
    return finalize(e, cfg.cap);
  }
  const double gap = std::isfinite(m_prev) ? std::abs(m_last - m_prev) : 0.0;
  if (m_last > cfg.cap) {
    e.value = ExtReal::plus_inf();
    e.bound = BoundKind::lower;
    e.lo = m_last;
    e.hi = kInf;
  } else if (m_last < -cfg.cap) {
    e.value = ExtReal::minus_inf();
    e.bound = BoundKind::upper;
    e.lo = -kInf;
    e.hi = m_last + gap;
  } else {
    e.value = m_last;
    e.bound = BoundKind::interval;
    e.lo = m_last - gap;
    e.hi = m_last + gap;
  }
  return finalize(e, cfg.cap);
}

std::vector<Eigen::VectorXd> asym_x_samples(const AsymCfg& cfg, int dim) {
  const CounterRng rng(cfg.seed);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -cfg.box_halfwidth);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, cfg.box_halfwidth);
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(static_cast<std::size_t>(cfg.x_samples) + 1);
  xs.push_back(Eigen::VectorXd::Zero(dim));
  for (auto& x : latin_hypercube(rng, streams::lhs_perm, lo, hi, cfg.x_samples))
    xs.push_back(std::move(x));
  return xs;
}

Estimate quotient_sup_estimate(const FunctionModel& f, const Eigen::VectorXd& u,
                               const std::vector<Eigen::VectorXd>& x_list,
                               const std::vector<double>& t_grid, double cap) {
  if (u.size() != f.dim) fail(ErrorCode::dimension_mismatch, "quotient estimate: direction dimension");
  return quotient_sup_core([&](const Eigen::VectorXd& x) { return eval(f, x); }, u, x_list,
                           t_grid, cap);
}

Estimate q_asym_fn(const FunctionModel& f, const Eigen::VectorXd& u, const AsymCfg& cfg) {
  validate_cfg(cfg);
  if (u.size() != f.dim) fail(ErrorCode::dimension_mismatch, "q_asym_fn: direction dimension");
  if (!cfg.force_sampled) {
    if (auto v = q_asym_closed(f, u)) return exact_estimate(*v, cfg.cap);
  }
  return quotient_sup_estimate(f, u, asym_x_samples(cfg, f.dim),
                               log_grid(cfg.t_min, cfg.t_max, cfg.t_count * cfg.levels), cfg.cap);
}

Estimate sublevel_asym_fn(const FunctionModel& f, double lambda, const Eigen::VectorXd& u,
                          const AsymCfg& cfg) {
  validate_cfg(cfg);
  if (u.size() != f.dim) fail(ErrorCode::dimension_mismatch, "sublevel_asym_fn: direction dimension");
  if (!std::isfinite(lambda)) fail(ErrorCode::config_error, "sublevel_asym_fn: lambda must be finite");

  const auto inf_v = inf_value_closed(f);
  if (inf_v && *inf_v > ExtReal(lambda)) {
    std::ostringstream os;
    os << "sublevel set empty: inf f = " << inf_v->str() << " exceeds lambda = " << lambda;
    fail(ErrorCode::empty_sublevel_set, os.str());
  }

  // Convex catalog collapse: any nonempty sublevel set leaves the asymptote
  // unchanged.
  if (!cfg.force_sampled && f.flags.convex && f.kind != FunctionKind::blackbox) {
    if (!inf_v) {
      auto probe = sampled_inf_probe(f, cfg);
      if (!probe || *probe > ExtReal(lambda))
        fail(ErrorCode::empty_sublevel_set, "sublevel set empty at sampled resolution");
    }
    if (auto v = asym_closed(f, u)) return exact_estimate(*v, cfg.cap);
  }

  std::vector<Eigen::VectorXd> kept;
  for (const auto& x : asym_x_samples(cfg, f.dim))
    if (eval(f, x) <= ExtReal(lambda)) kept.push_back(x);
  if (kept.empty())
    fail(ErrorCode::empty_sublevel_set, "no sampled point reaches the sublevel set");
  return quotient_sup_core([&](const Eigen::VectorXd& x) { return eval(f, x); }, u, kept,
                           log_grid(cfg.t_min, cfg.t_max, cfg.t_count * cfg.levels), cfg.cap);
}

Estimate q_asym_constrained(const FunctionModel& f, const SetModel& x_set, const Eigen::VectorXd& u,
                            const AsymCfg& cfg) {
  validate_cfg(cfg);
  if (u.size() != f.dim || x_set.dim != f.dim)
    fail(ErrorCode::dimension_mismatch, "q_asym_constrained: dimensions disagree");
  std::vector<Eigen::VectorXd> kept;
  kept.push_back(feasible_point(x_set));
  for (const auto& x : asym_x_samples(cfg, f.dim))
    if (member(x_set, x)) kept.push_back(x);
  auto eval_ind = [&](const Eigen::VectorXd& x) -> ExtReal {
    if (!member(x_set, x)) return ExtReal::plus_inf();
    return eval(f, x);
  };
  return quotient_sup_core(eval_ind, u, kept,
                           log_grid(cfg.t_min, cfg.t_max, cfg.t_count * cfg.levels), cfg.cap);
}

ChainEstimates chain_estimates(const FunctionModel& f, double lambda, const Eigen::VectorXd& u,
                               const AsymCfg& cfg) {
  validate_cfg(cfg);
  if (u.size() != f.dim) fail(ErrorCode::dimension_mismatch, "chain_estimates: direction dimension");
  const auto t_grid = log_grid(cfg.t_min, cfg.t_max, cfg.t_count * cfg.levels);
  const auto all = asym_x_samples(cfg, f.dim);
  std::vector<Eigen::VectorXd> kept;
  for (const auto& x : all)
    if (eval(f, x) <= ExtReal(lambda)) kept.push_back(x);
  if (kept.empty())
    fail(ErrorCode::empty_sublevel_set, "no sampled point reaches the sublevel set");
  ChainEstimates ch;
  ch.plain_proxy = quotient_sup_estimate(f, u, {kept.front()}, t_grid, cfg.cap);
  ch.sublevel = quotient_sup_estimate(f, u, kept, t_grid, cfg.cap);
  ch.q = quotient_sup_estimate(f, u, all, t_grid, cfg.cap);
  return ch;
}

std::optional<ExtReal> inf_value_closed(const FunctionModel& f0) {
  const FunctionModel f = absorb_tilt(f0);
  switch (f.kind) {
    case FunctionKind::affine:
      return f.c.lpNorm<Eigen::Infinity>() == 0.0 ? ExtReal(f.beta) : ExtReal::minus_inf();
    case FunctionKind::quadratic: {
      if (!matrix_psd(f.Q)) return ExtReal::minus_inf();
      const Eigen::VectorXd xh = f.Q.completeOrthogonalDecomposition().solve(-f.c);
      const double resid = (f.Q * xh + f.c).lpNorm<Eigen::Infinity>();
      if (resid > 1e-9 * (1.0 + f.c.lpNorm<Eigen::Infinity>())) return ExtReal::minus_inf();
      return eval(f, xh);
    }
    case FunctionKind::pnorm:
    case FunctionKind::sqrt_abs:
    case FunctionKind::rational_squash:
    case FunctionKind::cap_abs:
    case FunctionKind::plus_sqrt:
      return ExtReal(0.0);
    case FunctionKind::tilt: {
      const FunctionModel& b = *f.base;
      const bool zero_u = f.u.lpNorm<Eigen::Infinity>() == 0.0;
      if (zero_u) return inf_value_closed(b);
      switch (b.kind) {
        case FunctionKind::pnorm: {
          // |x|_p - u.x is bounded below iff the dual norm of u is at most 1.
          double dual;
          if (b.p == 1.0)
            dual = f.u.lpNorm<Eigen::Infinity>();
          else
            dual = lp_norm(f.u, b.p / (b.p - 1.0));
          return dual <= 1.0 ? ExtReal(0.0) : ExtReal::minus_inf();
        }
        case FunctionKind::sqrt_abs:
        case FunctionKind::rational_squash:
        case FunctionKind::cap_abs:
          return ExtReal::minus_inf();  // sublinear base cannot hold a tilt
        case FunctionKind::plus_sqrt:
          return f.u.lpNorm<Eigen::Infinity>() <= 1.0 ? ExtReal(0.0) : ExtReal::minus_inf();
        default:
          return std::nullopt;
      }
    }
    case FunctionKind::blackbox:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

Estimate shift_estimate(Estimate e, double delta) {
  e.value = e.value + ExtReal(delta);
  e.lo += delta;
  e.hi += delta;
  for (double& m : e.levels)
    if (std::isfinite(m)) m += delta;
  return e;
}

TiltIdentitySide identity_side(const Estimate& lhs, const Estimate& rhs, double slack) {
  TiltIdentitySide s;
  s.lhs = lhs;
  s.rhs = rhs;
  if (lhs.value.is_finite() && rhs.value.is_finite())
    s.gap = std::abs(lhs.value.finite() - rhs.value.finite());
  else
    s.gap = (lhs.value == rhs.value) ? 0.0 : kInf;
  const bool closed = lhs.method == EstimateMethod::closed && rhs.method == EstimateMethod::closed;
  const double tol = closed ? 1e-9 : lhs.width() + rhs.width() + slack;
  s.pass = s.gap <= tol;
  return s;
}

}  // namespace

TiltIdentityReport tilt_identity_check(const FunctionModel& f, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& d, const AsymCfg& cfg) {
  validate_cfg(cfg);
  if (u.size() != f.dim || d.size() != f.dim)
    fail(ErrorCode::dimension_mismatch, "tilt_identity_check: dimensions disagree");
  const FunctionModel fu = make_tilt(f, u);
  const double shift = -u.dot(d);
  // Sampled routes keep the same probe pool on both sides; the residual error
  // is the tilt of the direction jitter plus grid truncation.
  const double rho_last = cfg.rho0 * std::pow(2.0, -(cfg.levels - 1));
  const double slack =
      u.norm() * rho_last + 2.0 / std::sqrt(cfg.t_max) * (1.0 + d.norm() + u.norm()) + 1e-9;

  TiltIdentityReport r;
  r.plain = identity_side(asym_fn(fu, d, cfg), shift_estimate(asym_fn(f, d, cfg), shift), slack);
  r.q = identity_side(q_asym_fn(fu, d, cfg), shift_estimate(q_asym_fn(f, d, cfg), shift), slack);
  r.pass = r.plain.pass && r.q.pass;
  return r;
}

}  // namespace recede
