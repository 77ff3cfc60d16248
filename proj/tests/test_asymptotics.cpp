#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "recede/asymptotics.hpp"
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

bool code_is(const Error& e, ErrorCode c) { return e.code() == c; }

}  // namespace

TEST_CASE("closed asymptotic values on the catalog") {
  AsymCfg cfg;

  CHECK(asym_fn(make_affine(vec({2.0, -1.0}), 7.0), vec({3.0, 1.0}), cfg).value.finite() ==
        doctest::Approx(5.0));

  // Quadratic case analysis: curvature sign, then kernel membership.
  Eigen::MatrixXd q(2, 2);
  q << 2, 0, 0, 0;
  const auto fq = make_quadratic(q, vec({0.5, -3.0}), 0.0);
  CHECK(asym_fn(fq, vec({1.0, 0.0}), cfg).value.is_plus_inf());
  CHECK(asym_fn(fq, vec({0.0, 2.0}), cfg).value.finite() == doctest::Approx(-6.0));

  Eigen::MatrixXd qn(1, 1);
  qn << -2;
  CHECK(asym_fn(make_quadratic(qn, vec({0.0}), 0.0), vec({1.0}), cfg).value.is_minus_inf());

  // Indefinite, d'Qd = 0 but Qd != 0: nearby directions fall off to -inf.
  Eigen::MatrixXd qi(2, 2);
  qi << 1, 0, 0, -1;
  CHECK(asym_fn(make_quadratic(qi, vec({0.0, 0.0}), 0.0), vec({1.0, 1.0}), cfg).value.is_minus_inf());

  CHECK(asym_fn(make_pnorm(2, 2.0), vec({3.0, -4.0}), cfg).value.finite() == doctest::Approx(5.0));
  CHECK(asym_fn(make_pnorm(2, 1.0), vec({3.0, -4.0}), cfg).value.finite() == doctest::Approx(7.0));
  CHECK(asym_fn(make_sqrt_abs(2), vec({3.0, -4.0}), cfg).value.finite() == 0.0);
  CHECK(asym_fn(make_rational_squash(2), vec({3.0, -4.0}), cfg).value.finite() == 0.0);
  CHECK(asym_fn(make_cap_abs(2), vec({3.0, -4.0}), cfg).value.finite() == 0.0);
  CHECK(asym_fn(make_plus_sqrt(2), vec({3.0, -4.0}), cfg).value.finite() == doctest::Approx(7.0));

  const auto tilted = make_tilt(make_pnorm(2, 2.0), vec({0.5, 0.5}));
  CHECK(asym_fn(tilted, vec({3.0, -4.0}), cfg).value.finite() == doctest::Approx(5.0 - (1.5 - 2.0)));
}

TEST_CASE("closed q-asymptotic values and positive homogeneity") {
  AsymCfg cfg;

  // Quadratic: finite only along the kernel of Q, where it is linear.
  Eigen::MatrixXd q(2, 2);
  q << 2, 0, 0, 0;
  const auto fq = make_quadratic(q, vec({0.5, -3.0}), 0.0);
  CHECK(q_asym_fn(fq, vec({1.0, 0.0}), cfg).value.is_plus_inf());
  CHECK(q_asym_fn(fq, vec({0.0, 2.0}), cfg).value.finite() == doctest::Approx(-6.0));
  Eigen::MatrixXd qi(2, 2);
  qi << 1, 0, 0, -1;
  CHECK(q_asym_fn(make_quadratic(qi, vec({1.0, 1.0}), 0.0), vec({1.0, 1.0}), cfg).value.is_plus_inf());

  CHECK(q_asym_fn(make_sqrt_abs(1), vec({1.0}), cfg).value.is_plus_inf());
  CHECK(q_asym_fn(make_sqrt_abs(1), vec({0.0}), cfg).value.finite() == 0.0);
  CHECK(q_asym_fn(make_plus_sqrt(2), vec({0.0, 0.1}), cfg).value.is_plus_inf());
  CHECK(q_asym_fn(make_rational_squash(2), vec({3.0, 4.0}), cfg).value.finite() ==
        doctest::Approx(0.375 * std::sqrt(3.0) * 5.0));
  CHECK(q_asym_fn(make_cap_abs(2), vec({3.0, -4.0}), cfg).value.finite() == doctest::Approx(7.0));

  // Convex kinds: the sup-of-quotients form coincides with the plain one.
  for (const auto& f : {make_pnorm(2, 2.0), make_pnorm(2, 1.0), make_affine(vec({1.0, -2.0}), 3.0)}) {
    const Eigen::VectorXd u = vec({0.7, -0.2});
    CHECK(q_asym_fn(f, u, cfg).value.raw() == doctest::Approx(asym_fn(f, u, cfg).value.raw()));
  }

  const CounterRng rng(3);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd u = rng.sphere(30, static_cast<std::uint64_t>(k), 2);
    for (const auto& f : {make_rational_squash(2), make_cap_abs(2), make_pnorm(2, 2.0),
                          make_affine(vec({1.0, 2.0}), 0.0)}) {
      const double one = q_asym_fn(f, u, cfg).value.finite();
      const double two = q_asym_fn(f, 2.0 * u, cfg).value.finite();
      CHECK(std::abs(two - 2.0 * one) <= 1e-12 * (1.0 + std::abs(two)));
    }
  }
}

TEST_CASE("sup-of-quotients oracle pins the rational_squash slope constant") {
  // Dense chord search over g(y) = y^2/(1+y^2): sup of (g(x+t) - g(x))/t.
  double oracle = 0.0;
  const auto t_grid = log_grid(1e-3, 1e3, 200);
  for (double x = -3.0; x <= 3.0; x += 1e-3) {
    const double gx = x * x / (1.0 + x * x);
    for (double t : t_grid) {
      const double y = x + t;
      const double gy = y * y / (1.0 + y * y);
      oracle = std::max(oracle, (gy - gx) / t);
    }
  }
  const double closed = 0.375 * std::sqrt(3.0);
  CHECK(std::abs(oracle - closed) <= 2e-3);

  AsymCfg cfg;
  cfg.force_sampled = true;
  const Estimate est = q_asym_fn(make_rational_squash(1), vec({1.0}), cfg);
  CHECK(est.method == EstimateMethod::sampled);
  CHECK(est.bound == BoundKind::lower);
  CHECK(est.value.finite() <= closed + 1e-9);  // lower bound never overshoots
  CHECK(std::abs(est.value.finite() - oracle) <= 2e-3);
}

TEST_CASE("sampled liminf estimator: level structure and divergence markers") {
  AsymCfg cfg;
  cfg.force_sampled = true;

  Eigen::MatrixXd q(1, 1);
  q << 2;
  const Estimate up = asym_fn(make_quadratic(q, vec({0.0}), 0.0), vec({1.0}), cfg);
  CHECK(up.value.is_plus_inf());
  CHECK(up.divergence_flag);
  CHECK(up.monotone);
  REQUIRE(!up.levels.empty());
  CHECK(std::isfinite(up.levels.back()));  // truncation level recorded
  for (std::size_t j = 0; j + 1 < up.levels.size(); ++j)
    CHECK(up.levels[j] <= up.levels[j + 1] + 1e-12 * (1.0 + std::abs(up.levels[j])));

  q << -2;
  const Estimate down = asym_fn(make_quadratic(q, vec({0.0}), 0.0), vec({1.0}), cfg);
  CHECK(down.value.is_minus_inf());
  CHECK_FALSE(down.divergence_flag);  // the flag marks cap overshoot, not collapse
  CHECK(down.bound == BoundKind::upper);

  const Estimate flat = asym_fn(make_rational_squash(1), vec({1.0}), cfg);
  CHECK(flat.value.is_finite());
  CHECK(flat.bound == BoundKind::interval);
  CHECK(std::abs(flat.value.finite()) <= 1e-3);
}

TEST_CASE("sampled estimates stay consistent with the closed forms") {
  AsymCfg cfg;
  AsymCfg scfg = cfg;
  scfg.force_sampled = true;
  const CounterRng rng(11);

  int checked = 0, contained = 0;
  auto run_case = [&](const FunctionModel& f, const Eigen::VectorXd& d) {
    const Estimate closed = asym_fn(f, d, cfg);
    const Estimate sampled = asym_fn(f, d, scfg);
    REQUIRE(closed.method == EstimateMethod::closed);
    REQUIRE(sampled.method == EstimateMethod::sampled);
    ++checked;
    if (closed.value.is_plus_inf()) {
      if (sampled.value.is_plus_inf()) ++contained;
      return;
    }
    if (closed.value.is_minus_inf()) {
      if (sampled.value.is_minus_inf()) ++contained;
      return;
    }
    const double v = closed.value.finite();
    const double slack = 0.02 * (1.0 + std::abs(v)) + 2.0 / std::sqrt(scfg.t_max) + 1e-9;
    if (sampled.lo - slack <= v && v <= sampled.hi + slack) ++contained;
  };

  for (int k = 0; k < 200; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    const int n = 1 + k % 3;
    const double scale = rng.uniform(31, kk, 0.8, 2.0);
    const Eigen::VectorXd d = scale * rng.sphere(32, kk, n);
    const int pick = k % 10;
    if (pick < 2) {
      run_case(make_affine(rng.box_point(33, kk, Eigen::VectorXd::Constant(n, -2),
                                         Eigen::VectorXd::Constant(n, 2)),
                           rng.uniform(34, kk, -1, 1)),
               d);
    } else if (pick < 4) {
      // Definite curvature with eigenvalues of magnitude >= 2, so the top
      // probe level already clears the divergence cap.
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        m.row(i) = rng.normal_vector(35, kk * 8 + static_cast<std::uint64_t>(i), n).transpose();
      Eigen::MatrixXd qq = m.transpose() * m + 2.0 * Eigen::MatrixXd::Identity(n, n);
      if (pick == 3) qq = -qq;
      run_case(make_quadratic(qq, rng.normal_vector(36, kk, n), 0.0), d);
    } else if (pick == 4) {
      // Kernel direction of a singular PSD quadratic: finite linear value.
      Eigen::MatrixXd qq = Eigen::MatrixXd::Zero(2, 2);
      qq(0, 0) = 2.0 + rng.uniform(37, kk);
      run_case(make_quadratic(qq, rng.normal_vector(38, kk, 2), 0.0),
               vec({0.0, rng.uniform(39, kk, 0.5, 2.0)}));
    } else if (pick == 5) {
      run_case(make_pnorm(n, 1.0 + (k % 3)), d);
    } else if (pick == 6) {
      run_case(make_sqrt_abs(n), d);
    } else if (pick == 7) {
      run_case(make_rational_squash(n), d);
    } else if (pick == 8) {
      run_case((k % 2) ? make_cap_abs(n) : make_plus_sqrt(n), d);
    } else {
      run_case(make_tilt(make_pnorm(n, 2.0), 0.5 * rng.sphere(40, kk, n)), d);
    }
  }
  CHECK(checked == 200);
  CHECK(contained >= 190);  // 95% containment across the pool
  MESSAGE("containment: ", contained, " of ", checked);
}

TEST_CASE("chain ordering holds structurally on shared sample pools") {
  AsymCfg cfg;
  cfg.x_samples = 512;
  cfg.t_count = 16;
  const CounterRng rng(13);
  std::vector<std::pair<FunctionModel, double>> cases;
  cases.push_back({make_pnorm(2, 2.0), 1.0});
  cases.push_back({make_pnorm(2, 1.0), 2.0});
  cases.push_back({make_sqrt_abs(2), 1.0});
  cases.push_back({make_rational_squash(2), 0.5});
  cases.push_back({make_cap_abs(2), 0.75});
  cases.push_back({make_plus_sqrt(2), 2.0});
  Eigen::MatrixXd q(2, 2);
  q << 2, 0, 0, 1;
  cases.push_back({make_quadratic(q, vec({0.3, -0.4}), 0.2), 1.2});
  cases.push_back({make_affine(vec({1.0, -1.0}), 0.0), 0.0});

  for (const auto& [f, lambda] : cases) {
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd u = rng.sphere(41, static_cast<std::uint64_t>(100 + k), 2);
      const ChainEstimates ch = chain_estimates(f, lambda, u, cfg);
      // plain proxy <= sublevel <= q, with a purely numerical 1e-12 slack.
      if (ch.plain_proxy.value.is_finite() && ch.sublevel.value.is_finite()) {
        CHECK(ch.plain_proxy.value.finite() <=
              ch.sublevel.value.finite() + 1e-12 * (1.0 + std::abs(ch.sublevel.value.finite())));
      } else {
        CHECK(ch.plain_proxy.value <= ch.sublevel.value);
      }
      if (ch.sublevel.value.is_finite() && ch.q.value.is_finite()) {
        CHECK(ch.sublevel.value.finite() <=
              ch.q.value.finite() + 1e-12 * (1.0 + std::abs(ch.q.value.finite())));
      } else {
        CHECK(ch.sublevel.value <= ch.q.value);
      }
    }
  }
}

TEST_CASE("tilt identity: closed routes agree to 1e-9, sampled within widths") {
  AsymCfg cfg;
  const CounterRng rng(17);
  int closed_cases = 0;
  for (int k = 0; k < 30; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    const int n = 1 + k % 3;
    const Eigen::VectorXd u = rng.sphere(42, kk, n) * rng.uniform(43, kk, 0.2, 1.5);
    const Eigen::VectorXd d = rng.sphere(44, kk, n) * rng.uniform(45, kk, 0.5, 2.0);
    FunctionModel f;
    switch (k % 6) {
      case 0: f = make_affine(rng.normal_vector(46, kk, n), 0.5); break;
      case 1: {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
          m.row(i) = rng.normal_vector(47, kk * 8 + static_cast<std::uint64_t>(i), n).transpose();
        f = make_quadratic(m.transpose() * m, rng.normal_vector(48, kk, n), 0.0);
        break;
      }
      case 2: f = make_pnorm(n, 2.0); break;
      case 3: f = make_pnorm(n, 1.0); break;
      case 4: f = make_rational_squash(n); break;
      default: f = make_plus_sqrt(n); break;
    }
    const TiltIdentityReport r = tilt_identity_check(f, u, d, cfg);
    CHECK(r.pass);
    CHECK(r.plain.gap <= 1e-9);
    CHECK(r.q.gap <= 1e-9);
    ++closed_cases;
  }
  CHECK(closed_cases == 30);

  AsymCfg scfg;
  scfg.force_sampled = true;
  scfg.x_samples = 256;
  scfg.t_count = 16;
  scfg.levels = 4;
  scfg.dir_samples = 64;
  for (int k = 0; k < 10; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    const int n = 1 + k % 2;
    const Eigen::VectorXd u = rng.sphere(49, kk, n) * 0.5;
    const Eigen::VectorXd d = rng.sphere(50, kk, n);
    FunctionModel f;
    switch (k % 5) {
      case 0: f = make_affine(rng.normal_vector(51, kk, n), 0.0); break;
      case 1: f = make_rational_squash(n); break;
      case 2: f = make_cap_abs(n); break;
      case 3: f = make_pnorm(n, 2.0); break;
      default: f = make_pnorm(n, 1.0); break;
    }
    const TiltIdentityReport r = tilt_identity_check(f, u, d, scfg);
    CHECK(r.plain.lhs.method == EstimateMethod::sampled);
    CHECK(r.pass);
  }
}

TEST_CASE("sublevel estimates: emptiness, convex collapse, slow-kind growth") {
  AsymCfg cfg;
  CHECK_THROWS_WITH_AS(sublevel_asym_fn(make_pnorm(2, 2.0), -0.5, vec({1.0, 0.0}), cfg),
                       doctest::Contains("sublevel"), Error);
  try {
    sublevel_asym_fn(make_pnorm(2, 2.0), -0.5, vec({1.0, 0.0}), cfg);
  } catch (const Error& e) {
    CHECK(code_is(e, ErrorCode::empty_sublevel_set));
  }

  // Convex kinds: any nonempty sublevel set leaves the asymptote unchanged.
  const Eigen::VectorXd u = vec({0.6, -0.8});
  CHECK(sublevel_asym_fn(make_pnorm(2, 2.0), 1.0, u, cfg).value.raw() ==
        q_asym_fn(make_pnorm(2, 2.0), u, cfg).value.raw());

  // sqrt growth from inside the unit sublevel set: the quotient reaches
  // t_min^{-1/2} at the anchor, far above any O(1) bound.
  const Estimate slow = sublevel_asym_fn(make_sqrt_abs(1), 1.0, vec({1.0}), cfg);
  CHECK(slow.method == EstimateMethod::sampled);
  CHECK(slow.value.is_finite());
  CHECK(slow.value.finite() >= 100.0);
}

TEST_CASE("config validation and sampled determinism") {
  AsymCfg bad;
  bad.t_min = -1.0;
  CHECK_THROWS_AS(asym_fn(make_pnorm(1, 2.0), vec({1.0}), bad), Error);
  bad = AsymCfg{};
  bad.t_max = bad.t_min;
  CHECK_THROWS_AS(asym_fn(make_pnorm(1, 2.0), vec({1.0}), bad), Error);
  bad = AsymCfg{};
  bad.levels = 1;
  CHECK_THROWS_AS(asym_fn(make_pnorm(1, 2.0), vec({1.0}), bad), Error);
  bad = AsymCfg{};
  bad.cap = 0.0;
  CHECK_THROWS_AS(asym_fn(make_pnorm(1, 2.0), vec({1.0}), bad), Error);
  try {
    bad = AsymCfg{};
    bad.x_samples = 0;
    q_asym_fn(make_pnorm(1, 2.0), vec({1.0}), bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(code_is(e, ErrorCode::config_error));
  }

  AsymCfg scfg;
  scfg.force_sampled = true;
  const auto f = make_rational_squash(2);
  const Eigen::VectorXd d = vec({0.3, 0.7});
  const Estimate a = asym_fn(f, d, scfg);
  const Estimate b = asym_fn(f, d, scfg);
  CHECK(a.value.raw() == b.value.raw());
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t j = 0; j < a.levels.size(); ++j) CHECK(a.levels[j] == b.levels[j]);
  const Estimate qa = q_asym_fn(f, d, scfg);
  const Estimate qb = q_asym_fn(f, d, scfg);
  CHECK(qa.value.raw() == qb.value.raw());
}
