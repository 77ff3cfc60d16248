#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "helpers.hpp"
#include "recede/cones.hpp"
#include "recede/errors.hpp"
#include "recede/models.hpp"
#include "recede/rng.hpp"

using namespace recede;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("asymptotic cones of the structured sets") {
  const auto strip = testers::strip_problem().set;
  const ConeRep c = asymptotic_cone(strip);
  CHECK(cone_contains(c, vec({0.0, 1.0})));
  CHECK(cone_contains(c, vec({0.0, 0.0})));
  CHECK_FALSE(cone_contains(c, vec({1.0, 0.0})));
  CHECK_FALSE(cone_contains(c, vec({0.0, -1.0})));
  CHECK_FALSE(cone_contains(c, vec({0.3, 1.0})));

  CHECK(asymptotic_cone(make_ball(vec({1.0, 2.0}), 3.0)).kind == ConeKind::zero);
  CHECK(asymptotic_cone(make_whole_space(2)).kind == ConeKind::whole);

  Eigen::MatrixXd a(2, 2);
  a << -1, 0, 0, -1;
  const ConeRep quad = asymptotic_cone(make_polyhedron(a, vec({0.0, 0.0})));
  CHECK(cone_contains(quad, vec({1.0, 2.0})));
  CHECK_FALSE(cone_contains(quad, vec({-1.0, 0.5})));

  std::vector<SetModel> members;
  members.push_back(make_ball(vec({0.0}), 1.0));
  Eigen::MatrixXd hl(1, 1);
  hl << -1;
  members.push_back(make_polyhedron(hl, vec({0.0})));
  const ConeRep uc = asymptotic_cone(make_union(std::move(members)));
  CHECK(uc.kind == ConeKind::ray_union);
  CHECK(cone_contains(uc, vec({2.0})));
  CHECK_FALSE(cone_contains(uc, vec({-2.0})));
}

TEST_CASE("probe_cone rays stay within the exact asymptotic cone") {
  for (int seed = 0; seed < 20; ++seed) {
    const CounterRng rng(static_cast<std::uint64_t>(seed) + 77);
    const int n = 2 + seed % 2;
    const int m = 2 + seed % 5;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      a.row(i) = rng.sphere(21, static_cast<std::uint64_t>(10 * seed + i), n).transpose();
      b[i] = rng.uniform(22, static_cast<std::uint64_t>(10 * seed + i), 0.1, 2.0);
    }
    const auto set = make_polyhedron(a, b);
    const ConeRep exact = asymptotic_cone(set);
    const Eigen::VectorXd anchor = feasible_point(set);
    const ConeRep probed = probe_cone([&](const Eigen::VectorXd& x) { return member(set, x, 1e-9); },
                                      anchor, 128, static_cast<std::uint64_t>(seed));
    for (const auto& d : probed.dirs) {
      const Eigen::VectorXd w = project_onto_halfspace_cone(a, d);
      CHECK((d - w).norm() <= 0.05);  // probe resolution, small angular slack
    }
    // When the exact cone has a nonzero ray, probing from inside finds some.
    if (cone_has_nonzero(Eigen::MatrixXd(0, n), a)) {
      CHECK(!probed.dirs.empty());
    }
  }
}

TEST_CASE("cone_has_nonzero certifies rays and their absence") {
  Eigen::MatrixXd quad(2, 2);
  quad << -1, 0, 0, -1;
  const auto u = cone_has_nonzero(Eigen::MatrixXd(0, 2), quad);
  REQUIRE(u.has_value());
  CHECK(u->norm() > 1e-6);
  CHECK((quad * *u).maxCoeff() <= 1e-9);

  // {u >= 0} meets {u_1 + u_2 = 0} only at the origin.
  Eigen::MatrixXd eq(1, 2);
  eq << 1, 1;
  CHECK_FALSE(cone_has_nonzero(eq, quad).has_value());

  Eigen::MatrixXd pin(2, 1);
  pin << 1, -1;  // u <= 0 and u >= 0
  CHECK_FALSE(cone_has_nonzero(Eigen::MatrixXd(0, 1), pin).has_value());
}

TEST_CASE("projection onto a halfspace cone is feasible, idempotent, minimal") {
  const CounterRng rng(5);
  Eigen::MatrixXd a(2, 3);
  a << -1, 0, 0.2, 0, -1, 0.1;
  for (int k = 0; k < 15; ++k) {
    const Eigen::VectorXd u =
        rng.box_point(23, static_cast<std::uint64_t>(k), vec({-2, -2, -2}), vec({2, 2, 2}));
    const Eigen::VectorXd w = project_onto_halfspace_cone(a, u);
    CHECK((a * w).maxCoeff() <= 1e-8);
    CHECK((project_onto_halfspace_cone(a, w) - w).norm() <= 1e-8);
    ConeRep cone = make_polyhedral_cone(a, 3);
    for (const auto& d : sample_cone_unit(cone, 64, 99)) {
      for (double s : {0.25, 0.5, 1.0, 2.0}) {
        CHECK((u - w).norm() <= (u - s * d).norm() + 1e-8);
      }
    }
  }
}

TEST_CASE("projection onto a generated cone matches the support-enumeration oracle") {
  const CounterRng rng(9);
  for (int k = 0; k < 20; ++k) {
    const int n = 3;
    const int g = 2 + k % 3;  // 2..4 generators
    Eigen::MatrixXd gens(n, g);
    for (int j = 0; j < g; ++j)
      gens.col(j) = rng.sphere(24, static_cast<std::uint64_t>(10 * k + j), n);
    const Eigen::VectorXd u = 2.0 * rng.sphere(25, static_cast<std::uint64_t>(k), n);
    const Eigen::VectorXd w = project_onto_generated_cone(gens, u);

    // Oracle: enumerate supports, solve least squares, keep nonnegative ones.
    double best = u.norm();  // empty support: the origin
    for (int mask = 1; mask < (1 << g); ++mask) {
      std::vector<int> idx;
      for (int j = 0; j < g; ++j)
        if ((mask >> j) & 1) idx.push_back(j);
      Eigen::MatrixXd sub(n, static_cast<int>(idx.size()));
      for (std::size_t j = 0; j < idx.size(); ++j) sub.col(static_cast<int>(j)) = gens.col(idx[j]);
      const Eigen::VectorXd lam = sub.completeOrthogonalDecomposition().solve(u);
      if ((lam.array() < -1e-12).any()) continue;
      best = std::min(best, (u - sub * lam).norm());
    }
    CHECK(std::abs((u - w).norm() - best) <= 1e-8);
  }
}

TEST_CASE("sample_cone_unit yields deterministic unit members") {
  const auto strip = testers::strip_problem().set;
  const ConeRep c = asymptotic_cone(strip);
  const auto d1 = sample_cone_unit(c, 32, 42);
  const auto d2 = sample_cone_unit(c, 32, 42);
  REQUIRE(d1.size() == d2.size());
  CHECK(!d1.empty());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    CHECK((d1[i] - d2[i]).norm() == 0.0);
    CHECK(std::abs(d1[i].norm() - 1.0) <= 1e-9);
    CHECK(cone_contains(c, d1[i], 1e-6));
  }
}
