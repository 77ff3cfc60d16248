#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "recede/cones.hpp"
#include "recede/errors.hpp"
#include "recede/infinity_variational.hpp"
#include "recede/models.hpp"

using namespace recede;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool has_single_row(const InfNormalCone& nc, const Eigen::VectorXd& row, double tol = 1e-9) {
  for (const auto& piece : nc.pieces)
    if (piece.rows() == 1 && (piece.row(0).transpose() - row).norm() <= tol) return true;
  return false;
}

int zero_row_pieces(const InfNormalCone& nc) {
  int count = 0;
  for (const auto& piece : nc.pieces)
    if (piece.rows() == 0) ++count;
  return count;
}

// Segment Hausdorff helper: {0} x [lo, hi] against a point cloud.
double segment_hausdorff(const std::vector<Eigen::VectorXd>& pts, double lo, double hi) {
  double worst = 0.0;
  for (const auto& g : pts) {
    const double t = std::clamp(g[1], lo, hi);
    worst = std::max(worst, (g - vec({0.0, t})).norm());
  }
  for (int i = 0; i <= 400; ++i) {
    const double t = lo + (hi - lo) * i / 400.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : pts) best = std::min(best, (g - vec({0.0, t})).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("normal cone at infinity: piece catalog on structured sets") {
  const InfNormalCone strip = normal_cone_at_infinity(testers::strip_problem().set);
  CHECK(strip.pieces.size() == 3);
  CHECK(zero_row_pieces(strip) == 1);
  CHECK(has_single_row(strip, vec({1.0, 0.0})));
  CHECK(has_single_row(strip, vec({-1.0, 0.0})));
  for (const auto& piece : strip.pieces) CHECK(piece.rows() <= 1);  // no corner pieces survive

  const InfNormalCone hl = normal_cone_at_infinity(testers::halfline_problem(make_pnorm(1, 2.0)).set);
  CHECK(hl.pieces.size() == 1);
  CHECK(zero_row_pieces(hl) == 1);

  const InfNormalCone whole = normal_cone_at_infinity(make_whole_space(2));
  CHECK(whole.pieces.size() == 1);
  CHECK(zero_row_pieces(whole) == 1);

  CHECK(normal_cone_at_infinity(make_ball(Eigen::VectorXd::Zero(2), 1.0)).pieces.empty());
  CHECK(normal_cone_at_infinity(make_box(vec({0.0, 0.0}), vec({1.0, 1.0}))).pieces.empty());

  Eigen::MatrixXd a(2, 2);
  a << -1, 0, 0, -1;
  const InfNormalCone quad = normal_cone_at_infinity(make_polyhedron(a, Eigen::VectorXd::Zero(2)));
  CHECK(quad.pieces.size() == 3);
  CHECK(zero_row_pieces(quad) == 1);
  CHECK(has_single_row(quad, vec({-1.0, 0.0})));
  CHECK(has_single_row(quad, vec({0.0, -1.0})));

  std::vector<SetModel> members;
  members.push_back(make_ball(Eigen::VectorXd::Zero(1), 1.0));
  members.push_back(make_whole_space(1));
  CHECK_THROWS_AS(normal_cone_at_infinity(make_union(std::move(members))), Error);
}

TEST_CASE("subdifferential at infinity: exact, diverging, and vanishing gradients") {
  SubdiffCfg cfg;

  const InfSubdiff aff = subdiff_at_infinity(make_affine(vec({2.0, -1.0}), 3.0), cfg);
  CHECK(aff.exact);
  REQUIRE(aff.points.size() == 1);
  CHECK((aff.points[0] - vec({2.0, -1.0})).norm() == 0.0);
  CHECK(aff.unbounded_rays.empty());

  // Pure curvature: every far gradient diverges along +/- the position.
  Eigen::MatrixXd q1(1, 1);
  q1 << 1;
  const InfSubdiff curved = subdiff_at_infinity(make_quadratic(q1, Eigen::VectorXd::Zero(1), 0.0), cfg);
  CHECK(curved.points.empty());
  REQUIRE(curved.unbounded_rays.size() == 2);
  std::vector<double> signs;
  for (const auto& r : curved.unbounded_rays) signs.push_back(r[0]);
  std::sort(signs.begin(), signs.end());
  CHECK(signs[0] == doctest::Approx(-1.0));
  CHECK(signs[1] == doctest::Approx(1.0));

  const InfSubdiff flat = subdiff_at_infinity(make_rational_squash(2), cfg);
  REQUIRE(flat.points.size() == 1);
  CHECK(flat.points[0].norm() <= 1e-3);
  CHECK(flat.unbounded_rays.empty());

  CHECK_THROWS_AS(subdiff_at_infinity(make_sqrt_abs(2), cfg), Error);
  CHECK_THROWS_AS(subdiff_at_infinity(make_cap_abs(2), cfg), Error);
  SubdiffCfg bad = cfg;
  bad.shells = {1e3, 1e2};
  CHECK_THROWS_AS(subdiff_at_infinity(make_rational_squash(2), bad), Error);
}

TEST_CASE("subdifferential at infinity: strip objective fills a gradient slab") {
  SubdiffCfg cfg;
  cfg.samples = 10000;
  cfg.cap_g = 2.0;
  cfg.cluster_radius = 0.02;
  const InfSubdiff sd = subdiff_at_infinity(testers::strip_problem().f, cfg);

  REQUIRE(!sd.points.empty());
  for (const auto& g : sd.points) CHECK(std::abs(g[0]) <= 1e-12);  // gradients live on the x2 axis
  CHECK(segment_hausdorff(sd.points, -2.0, 2.0) <= 0.05);

  REQUIRE(sd.unbounded_rays.size() == 2);
  std::vector<double> signs;
  for (const auto& r : sd.unbounded_rays) {
    CHECK(std::abs(r[0]) <= 1e-12);
    signs.push_back(r[1]);
  }
  std::sort(signs.begin(), signs.end());
  CHECK(signs[0] == doctest::Approx(-1.0));
  CHECK(signs[1] == doctest::Approx(1.0));

  // Deterministic replay.
  const InfSubdiff sd2 = subdiff_at_infinity(testers::strip_problem().f, cfg);
  REQUIRE(sd2.points.size() == sd.points.size());
  for (std::size_t i = 0; i < sd.points.size(); ++i)
    CHECK((sd.points[i] - sd2.points[i]).norm() == 0.0);
}

TEST_CASE("criticality check at infinity: exact verdicts and the sampled route") {
  SonCqCfg cfg;

  // Strip: the zero-row piece meets the gradient slab at the origin.
  const SonCqReport strip = son_cq_check(testers::strip_problem(), cfg);
  CHECK(strip.verdict == Verdict::violated);
  CHECK(strip.exact_mode);
  CHECK(strip.delta <= 1e-6);
  CHECK((strip.arg_g + strip.arg_nu).norm() <= 1e-9);

  // f(x) = x on the half-line: gradient 1 never cancels against {0}.
  const SonCqReport hl = son_cq_check(testers::halfline_problem(make_affine(vec({1.0}), 0.0)), cfg);
  CHECK(hl.verdict == Verdict::holds);
  CHECK(hl.exact_mode);
  CHECK(hl.delta == doctest::Approx(1.0).epsilon(1e-9));

  // Affine over a half-plane whose boundary normal cancels the gradient.
  ProblemSpec hp;
  hp.dimension = 2;
  hp.f = make_affine(vec({-1.0, 0.0}), 0.0);
  Eigen::MatrixXd a(1, 2);
  a << 1, 0;
  hp.set = make_polyhedron(a, Eigen::VectorXd::Zero(1));
  const SonCqReport hpr = son_cq_check(hp, cfg);
  CHECK(hpr.verdict == Verdict::violated);
  CHECK(hpr.delta <= 1e-12);

  // Bounded set: vacuous hold.
  ProblemSpec ball;
  ball.dimension = 2;
  ball.f = make_rational_squash(2);
  ball.set = make_ball(Eigen::VectorXd::Zero(2), 1.0);
  const SonCqReport br = son_cq_check(ball, cfg);
  CHECK(br.verdict == Verdict::holds);
  CHECK(std::isinf(br.delta));

  // Sampled route, tolerances scaled to the sampling resolution.
  SonCqCfg scfg;
  scfg.force_sampled = true;
  scfg.subdiff.samples = 10000;
  scfg.subdiff.cap_g = 2.0;
  scfg.subdiff.cluster_radius = 0.02;
  scfg.fail_tol = 0.05;
  scfg.hold_tol = 0.5;
  const SonCqReport sstrip = son_cq_check(testers::strip_problem(), scfg);
  CHECK_FALSE(sstrip.exact_mode);
  CHECK(sstrip.verdict == Verdict::violated);

  SonCqCfg s2;
  s2.force_sampled = true;
  const SonCqReport shl = son_cq_check(testers::halfline_problem(make_affine(vec({1.0}), 0.0)), s2);
  CHECK(shl.verdict == Verdict::holds);
  CHECK(shl.delta == doctest::Approx(1.0).epsilon(1e-9));
  const SonCqReport shp = son_cq_check(hp, s2);
  CHECK(shp.verdict == Verdict::violated);
  CHECK(shp.delta <= 1e-9);
}

TEST_CASE("criticality check: exact support enumeration matches cone projection") {
  const CounterRng rng(23);
  for (int k = 0; k < 15; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    const int n = 2 + k % 2;
    const int m = 2 + k % 3;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      a.row(i) = rng.sphere(60, kk * 8 + static_cast<std::uint64_t>(i), n).transpose();
      b[i] = rng.uniform(61, kk * 8 + static_cast<std::uint64_t>(i), 0.2, 1.5);
    }
    ProblemSpec p;
    p.dimension = n;
    p.f = make_affine(rng.normal_vector(62, kk, n), 0.0);
    p.set = make_polyhedron(a, b);

    SonCqCfg cfg;
    const SonCqReport r = son_cq_check(p, cfg);
    if (r.ncone.pieces.empty()) continue;  // bounded feasible set: nothing to compare
    REQUIRE(r.exact_mode);

    double oracle = std::numeric_limits<double>::infinity();
    for (const auto& piece : r.ncone.pieces) {
      const Eigen::VectorXd target = -p.f.c;
      const Eigen::VectorXd proj = project_onto_generated_cone(piece.transpose(), target);
      oracle = std::min(oracle, (target - proj).norm());
    }
    CHECK(std::abs(r.delta - oracle) <= 1e-9 * (1.0 + oracle));
  }
}
