#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "recede/asymptotics.hpp"
#include "recede/conditions.hpp"
#include "recede/errors.hpp"
#include "recede/models.hpp"
#include "recede/solver.hpp"

using namespace recede;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool cloud_has(const SolCloud& sol, const Eigen::VectorXd& x, double tol) {
  for (const auto& p : sol.points)
    if ((p - x).norm() <= tol) return true;
  return false;
}

void check_optimal_invariants(const ProblemSpec& p, const SolverResult& r, double tol = 1e-6) {
  REQUIRE(r.status == SolveStatus::optimal);
  REQUIRE(!r.sol.points.empty());
  for (const auto& x : r.sol.points) {
    CHECK(member(p.set, x, tol));
    CHECK(std::abs(eval(p.f, x).raw() - r.f_star.finite()) <= tol * (1.0 + std::abs(r.f_star.finite())));
  }
}

}  // namespace

TEST_CASE("exact solve on the strip: optimal face with its vertices") {
  const auto p = testers::strip_problem();
  const SolverResult r = solve(p);
  CHECK(r.exact_mode);
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.f_star.finite() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.sol.hull_flag);
  CHECK(r.sol.points.size() == 2);
  CHECK(cloud_has(r.sol, vec({0.0, 0.0}), 1e-9));
  CHECK(cloud_has(r.sol, vec({1.0, 0.0}), 1e-9));
  CHECK_FALSE(r.sol.unbounded_dir.has_value());
  check_optimal_invariants(p, r);
}

TEST_CASE("exact solve under a tilt: unique minimizer moves to the corner") {
  auto p = testers::strip_problem();
  p.f = make_tilt(p.f, vec({0.1, 0.4}));
  const SolverResult r = solve(p);
  CHECK(r.exact_mode);
  CHECK(r.status == SolveStatus::optimal);
  // min of x2^2 - 0.1 x1 - 0.4 x2 on [0,1] x [0,inf): x1 = 1, x2 = 0.2.
  CHECK(r.f_star.finite() == doctest::Approx(-0.14).epsilon(1e-10));
  REQUIRE(r.sol.points.size() == 1);
  CHECK((r.sol.points[0] - vec({1.0, 0.2})).norm() <= 1e-8);
  check_optimal_invariants(p, r);
}

TEST_CASE("multistart solve lands on nonsmooth minimizers") {
  ProblemSpec p;
  p.dimension = 2;
  p.f = make_sqrt_abs(2);
  p.set = make_whole_space(2);
  const SolverResult r = solve(p);
  CHECK_FALSE(r.exact_mode);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(std::abs(r.f_star.finite()) <= 1e-3);
  REQUIRE(!r.sol.points.empty());
  for (const auto& x : r.sol.points) CHECK(x.norm() <= 1e-3);
}

TEST_CASE("unbounded problems return verified descent certificates") {
  // Slight positive tilt pushes f = -0.1 x to -inf along the half-line.
  auto hl = testers::halfline_problem(make_tilt(make_affine(Eigen::VectorXd::Zero(1), 0.0), vec({0.1})));
  const SolverResult r1 = solve(hl);
  CHECK(r1.status == SolveStatus::unbounded_below);
  CHECK(r1.f_star.is_minus_inf());
  REQUIRE(r1.certificate.has_value());
  {
    const Eigen::VectorXd d = *r1.certificate;
    const Eigen::VectorXd x0 = feasible_point(hl.set);
    double prev = eval(hl.f, x0).raw();
    for (double t : {1e2, 1e3, 1e4}) {
      const Eigen::VectorXd x = x0 + t * d;
      CHECK(member(hl.set, x, 1e-6));
      const double v = eval(hl.f, x).raw();
      CHECK(v < prev);
      prev = v;
    }
  }

  auto lin = testers::halfline_problem(make_affine(vec({-1.0}), 0.0));
  const SolverResult r2 = solve(lin);
  CHECK(r2.status == SolveStatus::unbounded_below);
  CHECK(r2.exact_mode);
  REQUIRE(r2.certificate.has_value());
  CHECK((*r2.certificate)[0] > 0.0);
}

TEST_CASE("infeasible sets are reported, not solved") {
  ProblemSpec p;
  p.dimension = 1;
  p.f = make_pnorm(1, 2.0);
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;  // x <= -1 and x >= 1
  Eigen::VectorXd b(2);
  b << -1, -1;
  p.set = make_polyhedron(a, b);
  const SolverResult r = solve(p);
  CHECK(r.status == SolveStatus::infeasible);
  CHECK(r.f_star.is_plus_inf());
  CHECK(r.sol.points.empty());
}

TEST_CASE("exact and multistart routes agree across the seeded family") {
  SolveCfg ms;
  ms.force_multistart = true;
  ms.starts = 48;
  for (int seed = 0; seed < 30; ++seed) {
    CAPTURE(seed);
    const auto inst = testers::make_seeded_qp(seed);
    const SolverResult ex = solve(inst.p);
    const SolverResult sm = solve(inst.p, ms);
    CHECK(ex.exact_mode);
    CHECK_FALSE(sm.exact_mode);
    if (inst.violated) {
      CHECK(ex.status == SolveStatus::unbounded_below);
      CHECK(sm.status == SolveStatus::unbounded_below);
      CHECK(ex.f_star.is_minus_inf());
      CHECK(sm.f_star.is_minus_inf());
    } else {
      REQUIRE(ex.status == SolveStatus::optimal);
      REQUIRE(sm.status == SolveStatus::optimal);
      CHECK(std::abs(ex.f_star.finite() - sm.f_star.finite()) <= 1e-5);
      check_optimal_invariants(inst.p, ex, 1e-7);
    }
  }
}

TEST_CASE("distance to the solution set: points, hulls, and the grid oracle") {
  const auto strip = solve(testers::strip_problem());
  REQUIRE(strip.sol.hull_flag);
  CHECK(dist_to_solset(vec({0.5, 2.0}), strip.sol) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(dist_to_solset(vec({3.0, 0.0}), strip.sol) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(dist_to_solset(vec({0.7, 0.0}), strip.sol) <= 1e-9);
  CHECK(dist_to_solset(vec({-1.0, -1.0}), strip.sol) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  // Random triangle clouds against the barycentric grid oracle.
  const CounterRng rng(29);
  for (int k = 0; k < 12; ++k) {
    SolCloud cloud;
    cloud.hull_flag = true;
    for (int j = 0; j < 3; ++j)
      cloud.points.push_back(rng.box_point(70, static_cast<std::uint64_t>(3 * k + j),
                                           vec({-2.0, -2.0}), vec({2.0, 2.0})));
    for (int j = 0; j < 8; ++j) {
      const Eigen::VectorXd x =
          rng.box_point(71, static_cast<std::uint64_t>(8 * k + j), vec({-3.0, -3.0}), vec({3.0, 3.0}));
      const double got = dist_to_solset(x, cloud);
      const double want = testers::hull_dist_grid(x, cloud.points, 400);
      // The grid only overestimates; its resolution bounds how far above.
      CHECK(got <= want + 1e-9);
      CHECK(want <= got + 0.05);
    }
    // Without the hull flag the distance is to the nearest point only.
    SolCloud bare = cloud;
    bare.hull_flag = false;
    const Eigen::VectorXd mid = (cloud.points[0] + cloud.points[1]) / 2.0;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : cloud.points) nearest = std::min(nearest, (mid - c).norm());
    CHECK(dist_to_solset(mid, bare) == doctest::Approx(nearest).epsilon(1e-12));
  }

  SolCloud empty;
  CHECK_THROWS_AS(dist_to_solset(vec({0.0}), empty), Error);
}

TEST_CASE("union feasible sets: branch-wise solve with merged clouds") {
  ProblemSpec p;
  p.dimension = 1;
  Eigen::MatrixXd q(1, 1);
  q << 2;
  p.f = make_quadratic(q, Eigen::VectorXd::Zero(1), 0.0);  // x^2
  std::vector<SetModel> members;
  members.push_back(make_box(vec({-3.0}), vec({-2.0})));
  members.push_back(make_box(vec({2.0}), vec({4.0})));
  p.set = make_union(std::move(members));
  const SolverResult r = solve(p);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.f_star.finite() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.sol.points.size() == 2);
  CHECK(cloud_has(r.sol, vec({-2.0}), 1e-6));
  CHECK(cloud_has(r.sol, vec({2.0}), 1e-6));
  CHECK_FALSE(r.sol.hull_flag);  // two branches: the segment between is infeasible
}

TEST_CASE("flat objective on an unbounded line keeps a recession direction") {
  const auto p = testers::halfline_problem(make_affine(Eigen::VectorXd::Zero(1), 0.0));
  const SolverResult r = solve(p);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.f_star.finite() == doctest::Approx(0.0));
  REQUIRE(r.sol.unbounded_dir.has_value());
  CHECK((*r.sol.unbounded_dir)[0] == doctest::Approx(1.0));
}

TEST_CASE("compact solution sets travel with the q-condition, unbounded ones with its failure") {
  RecessionCfg rc;

  // q condition holds for the squash objective; its solution set is compact.
  ProblemSpec squash;
  squash.dimension = 2;
  squash.f = make_rational_squash(2);
  squash.set = make_whole_space(2);
  CHECK(recession_check(squash, CheckKind::q, 0.0, rc).verdict == Verdict::holds);
  const SolverResult rs = solve(squash);
  REQUIRE(rs.status == SolveStatus::optimal);
  CHECK_FALSE(rs.sol.unbounded_dir.has_value());
  for (const auto& x : rs.sol.points) CHECK(x.norm() <= 1.0);

  // Flat objective on the half-line: q condition fails and Sol is a ray.
  const auto flat = testers::halfline_problem(make_affine(Eigen::VectorXd::Zero(1), 0.0));
  CHECK(recession_check(flat, CheckKind::q, 0.0, rc).verdict == Verdict::violated);
  const SolverResult rf = solve(flat);
  REQUIRE(rf.status == SolveStatus::optimal);
  CHECK(rf.sol.unbounded_dir.has_value());
}
