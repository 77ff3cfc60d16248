#include "recede/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "recede/cones.hpp"
#include "recede/errors.hpp"
#include "recede/parallel.hpp"
#include "recede/rng.hpp"

namespace recede {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Eigen::VectorXd> grid_rays(int n, int rays, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(rays));
  if (n == 1) {
    for (int k = 0; k < rays; ++k) dirs.push_back(Eigen::VectorXd::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
  } else if (n == 2) {
    for (int k = 0; k < rays; ++k) {
      const double th = 2.0 * std::numbers::pi * k / rays;
      Eigen::VectorXd d(2);
      d << std::cos(th), std::sin(th);
      dirs.push_back(d);
    }
  } else {
    const CounterRng rng(seed);
    for (int k = 0; k < rays; ++k)
      dirs.push_back(rng.sphere(streams::perturb_rays, static_cast<std::uint64_t>(k), n));
  }
  return dirs;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

bool nonincreasing_inward(const std::vector<double>& inner_first, double slack) {
  for (std::size_t r = 0; r + 1 < inner_first.size(); ++r)
    if (inner_first[r] > inner_first[r + 1] + slack) return false;
  return true;
}

}  // namespace

StabilityReport perturb_grid(const ProblemSpec& p, double epsilon, const StabilityGridCfg& cfg) {
  if (!(epsilon > 0.0)) fail(ErrorCode::validation_error, "perturb_grid: epsilon must be positive");
  if (cfg.rings < 1 || cfg.rays < 1)
    fail(ErrorCode::validation_error, "perturb_grid: rings and rays must be at least 1");
  const int n = p.dimension;
  std::vector<Eigen::VectorXd> dirs =
      cfg.ray_dirs.empty() ? grid_rays(n, cfg.rays, cfg.solve.seed) : cfg.ray_dirs;
  for (const auto& d : dirs) {
    if (d.size() != n) fail(ErrorCode::dimension_mismatch, "perturb_grid: ray dimension");
    if (d.norm() <= 1e-12) fail(ErrorCode::validation_error, "perturb_grid: zero ray");
  }
  const int rays = static_cast<int>(dirs.size());

  StabilityReport rep;
  rep.epsilon = epsilon;
  rep.rings = cfg.rings;
  rep.rays = rays;
  rep.records.resize(1 + static_cast<std::size_t>(cfg.rings) * rays);

  parallel_for(static_cast<int>(rep.records.size()), [&](int idx) {
    PerturbRecord rec;
    if (idx == 0) {
      rec.ring = 0;
      rec.ray = 0;
      rec.u = Eigen::VectorXd::Zero(n);
    } else {
      rec.ring = 1 + (idx - 1) / rays;
      rec.ray = (idx - 1) % rays;
      const Eigen::VectorXd& d = dirs[rec.ray];
      rec.u = (rec.ring * epsilon / cfg.rings) * (d / d.norm());
    }
    rec.norm_u = rec.u.norm();
    ProblemSpec tilted = p;
    tilted.f = make_tilt(p.f, rec.u);
    const SolverResult r = solve(tilted, cfg.solve);
    rec.status = r.status;
    rec.mu = r.f_star;
    rec.sol = r.sol;
    rep.records[idx] = std::move(rec);
  });

  rep.base = rep.records.front();
  return rep;
}

SemiDiag semicontinuity_diagnostics(const StabilityReport& rep, double tol) {
  if (rep.records.empty() || rep.base.status != SolveStatus::optimal ||
      rep.base.sol.points.empty())
    fail(ErrorCode::validation_error,
         "semicontinuity_diagnostics: base record must be solved to optimal");

  SemiDiag d;
  d.rows.resize(rep.records.size());
  const double mu0 = rep.base.mu.raw();

  std::vector<std::vector<double>> exc_by_ring(rep.rings), def_by_ring(rep.rings);
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const PerturbRecord& rec = rep.records[i];
    SemiRow row;
    row.ring = rec.ring;
    row.ray = rec.ray;
    row.norm_u = rec.norm_u;
    row.skipped = rec.status != SolveStatus::optimal && rec.status != SolveStatus::max_iter;
    if (!row.skipped && rec.sol.points.empty()) row.skipped = true;
    if (!row.skipped) {
      for (const auto& x : rec.sol.points)
        row.excess = std::max(row.excess, dist_to_solset(x, rep.base.sol));
      for (const auto& x : rep.base.sol.points)
        row.deficiency = std::max(row.deficiency, dist_to_solset(x, rec.sol));
      if (rec.ring >= 1) {
        exc_by_ring[rec.ring - 1].push_back(row.excess);
        def_by_ring[rec.ring - 1].push_back(row.deficiency);
        if (rec.ring == 1) {
          d.inner_excess = std::max(d.inner_excess, row.excess);
          d.inner_deficiency = std::max(d.inner_deficiency, row.deficiency);
        }
      }
    } else if (rec.ring >= 1) {
      ++d.skipped_records;
    }
    if (rec.ring == 1) {
      // Value gaps on the innermost ring; an unbounded record sinks lsc only.
      if (rec.mu.is_minus_inf())
        d.value_gap_down = kInf;
      else if (rec.mu.is_plus_inf())
        d.value_gap_up = kInf;
      else {
        d.value_gap_up = std::max(d.value_gap_up, rec.mu.raw() - mu0);
        d.value_gap_down = std::max(d.value_gap_down, mu0 - rec.mu.raw());
      }
    }
    d.rows[i] = row;
  }

  for (int r = 0; r < rep.rings; ++r) {
    d.excess_medians.push_back(median(exc_by_ring[r]));
    d.deficiency_medians.push_back(median(def_by_ring[r]));
  }

  const double slack = 1e-9;
  const bool exc_decay = nonincreasing_inward(d.excess_medians, slack);
  const bool def_decay = nonincreasing_inward(d.deficiency_medians, slack);
  d.solset_outer = exc_decay && d.inner_excess <= tol;
  d.solset_usc = d.solset_outer;
  d.solset_lsc = def_decay && d.inner_deficiency <= tol;
  d.value_usc = d.value_gap_up <= tol;
  d.value_lsc = d.value_gap_down <= tol;
  if (d.skipped_records > 0) {
    std::ostringstream os;
    os << d.skipped_records << " record(s) without a finite optimum skipped from set diagnostics";
    d.note = os.str();
  }
  return d;
}

const char* sharp_verdict_name(SharpVerdict v) {
  switch (v) {
    case SharpVerdict::sharp: return "sharp";
    case SharpVerdict::not_sharp: return "not_sharp";
    case SharpVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

SharpReport weak_sharp_certify(const ProblemSpec& p, const SolverResult& base, double radius,
                               const SharpCfg& cfg) {
  if (!(radius > 0.0)) fail(ErrorCode::validation_error, "weak_sharp_certify: radius must be positive");
  if (base.status != SolveStatus::optimal || base.sol.points.empty())
    fail(ErrorCode::validation_error, "weak_sharp_certify: base problem must be solved to optimal");
  if (cfg.samples < 1 || cfg.doublings < 1 || cfg.attempt_factor < 1)
    fail(ErrorCode::config_error, "weak_sharp_certify: positive samples/doublings/attempts required");

  SharpReport rep;
  rep.radius = radius;
  rep.r_max = cfg.r_max > 0.0 ? cfg.r_max : radius * std::pow(2.0, cfg.doublings);
  if (rep.r_max <= radius)
    fail(ErrorCode::config_error, "weak_sharp_certify: r_max must exceed radius");
  const int wins = std::max(1, static_cast<int>(std::ceil(std::log2(rep.r_max / radius) - 1e-12)));
  rep.windows.resize(wins);
  for (int k = 0; k < wins; ++k) {
    rep.windows[k].lo = radius * std::pow(2.0, k);
    rep.windows[k].hi = std::min(radius * std::pow(2.0, k + 1), rep.r_max);
    rep.windows[k].min_ratio = kInf;
  }

  const int n = p.dimension;
  const double fstar = base.f_star.raw();
  const Eigen::VectorXd anchor = feasible_point(p.set);
  const ConeRep cone = asymptotic_cone(p.set);
  std::vector<Eigen::VectorXd> ray_dirs;
  if (cone.kind != ConeKind::zero) ray_dirs = sample_cone_unit(cone, 128, cfg.seed);

  const CounterRng rng(cfg.seed);
  const std::int64_t budget =
      static_cast<std::int64_t>(cfg.attempt_factor) * static_cast<std::int64_t>(cfg.samples);
  const double log_span = std::log(rep.r_max / radius);

  struct Chunk {
    int accepted = 0;
    double best = kInf;
    std::int64_t best_idx = -1;
    Eigen::VectorXd best_x;
    std::vector<double> win_min;
    std::vector<int> win_count;
  };
  const int chunk_count = 256;
  std::vector<Chunk> chunks(chunk_count);
  for (auto& c : chunks) {
    c.win_min.assign(static_cast<std::size_t>(wins), kInf);
    c.win_count.assign(static_cast<std::size_t>(wins), 0);
  }

  parallel_for(chunk_count, [&](int ci) {
    Chunk& c = chunks[ci];
    const std::int64_t lo_i = budget * ci / chunk_count;
    const std::int64_t hi_i = budget * (ci + 1) / chunk_count;
    for (std::int64_t idx = lo_i; idx < hi_i; ++idx) {
      const auto ui = static_cast<std::uint64_t>(idx);
      Eigen::VectorXd x;
      if (idx % 2 == 0 && !ray_dirs.empty()) {
        // Recession-ray offset from the anchor; log-uniform reach.
        const double s =
            radius * std::exp(rng.uniform(streams::sharp_ray, ui) * log_span);
        x = anchor + s * ray_dirs[static_cast<std::size_t>(idx / 2) % ray_dirs.size()];
      } else {
        // Radial rejection: log-uniform shell radius, uniform direction.
        const double s =
            radius * std::exp(rng.uniform(streams::sharp_box, 2 * ui) * log_span);
        x = s * rng.sphere(streams::sharp_box, 2 * ui + 1, n);
      }
      const double nx = x.norm();
      if (nx < radius || nx > rep.r_max) continue;
      if (!member(p.set, x, 1e-9)) continue;
      const ExtReal fx = eval(p.f, x);
      if (!fx.is_finite()) continue;
      const double dist = dist_to_solset(x, base.sol);
      if (dist <= 1e-12) continue;  // on the solution set: ratio undefined
      const double ratio = (fx.raw() - fstar) / dist;
      ++c.accepted;
      const int k = std::min(wins - 1, std::max(0, static_cast<int>(std::floor(std::log2(nx / radius)))));
      c.win_min[static_cast<std::size_t>(k)] = std::min(c.win_min[static_cast<std::size_t>(k)], ratio);
      ++c.win_count[static_cast<std::size_t>(k)];
      if (ratio < c.best || (ratio == c.best && idx < c.best_idx)) {
        c.best = ratio;
        c.best_idx = idx;
        c.best_x = x;
      }
    }
  });

  double best = kInf;
  std::int64_t best_idx = -1;
  for (const auto& c : chunks) {
    rep.accepted += c.accepted;
    for (int k = 0; k < wins; ++k) {
      auto& w = rep.windows[static_cast<std::size_t>(k)];
      w.min_ratio = std::min(w.min_ratio, c.win_min[static_cast<std::size_t>(k)]);
      w.count += c.win_count[static_cast<std::size_t>(k)];
    }
    if (c.best < best || (c.best == best && c.best_idx >= 0 && c.best_idx < best_idx)) {
      best = c.best;
      best_idx = c.best_idx;
      rep.arg_x = c.best_x;
    }
  }
  if (rep.accepted == 0)
    fail(ErrorCode::no_far_feasible_points,
         "weak_sharp_certify: no feasible points found with norm in the requested range");
  rep.c_emp = best;
  std::string accept_note;
  if (rep.accepted < cfg.samples) {
    std::ostringstream os;
    os << "accepted " << rep.accepted << " of " << cfg.samples << " requested samples";
    accept_note = os.str();
  }

  // Power-law fit of window minima against window geometric-mean radius.
  std::vector<std::pair<double, double>> pts;
  for (const auto& w : rep.windows)
    if (w.count > 0 && w.min_ratio > 0.0 && std::isfinite(w.min_ratio))
      pts.push_back({std::log(std::sqrt(w.lo * w.hi)), std::log(w.min_ratio)});
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [a, b] : pts) {
      sx += a;
      sy += b;
      sxx += a * a;
      sxy += a * b;
    }
    const double m = static_cast<double>(pts.size());
    const double denom = m * sxx - sx * sx;
    if (std::abs(denom) > 1e-12) {
      rep.fit_exponent = (m * sxy - sx * sy) / denom;
      rep.fit_scale = std::exp((sy - rep.fit_exponent * sx) / m);
    }
  }

  // Decay rule: monotone window-min decline losing at least (1 - decay_ratio)
  // across the range, or minima collapsing outright.
  std::vector<double> mins;
  for (const auto& w : rep.windows)
    if (w.count > 0) mins.push_back(w.min_ratio);
  bool monotone = mins.size() >= 2;
  for (std::size_t k = 0; k + 1 < mins.size(); ++k)
    if (mins[k + 1] > mins[k] * 1.02 + 1e-15) monotone = false;
  const bool decayed = monotone && mins.back() <= cfg.decay_ratio * mins.front();
  const bool vanished = !mins.empty() && mins.back() <= 1e-4;

  if (decayed || (monotone && vanished)) {
    rep.verdict = SharpVerdict::not_sharp;
    rep.note = "window minima decay toward zero as the norm doubles";
  } else if (rep.c_emp >= cfg.c_min) {
    rep.verdict = SharpVerdict::sharp;
  } else {
    rep.verdict = SharpVerdict::inconclusive;
    rep.note = "minimum ratio below c_min without a clean decay pattern";
  }
  if (!accept_note.empty()) rep.note = rep.note.empty() ? accept_note : rep.note + "; " + accept_note;
  return rep;
}

}  // namespace recede
