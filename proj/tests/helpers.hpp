#pragma once
// Shared test fixtures and independent oracles. The oracles here deliberately
// avoid the library's own code paths: gradients come from central
// differences, hull distances from a barycentric grid, and the seeded
// quadratic family carries its classification by construction.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "recede/models.hpp"
#include "recede/rng.hpp"

namespace testers {

inline Eigen::VectorXd fd_grad(const recede::FunctionModel& f, const Eigen::VectorXd& x,
                               double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(x.size(), i);
    g[i] = (recede::eval(f, x + h * e).raw() - recede::eval(f, x - h * e).raw()) / (2.0 * h);
  }
  return g;
}

inline recede::ProblemSpec strip_problem() {
  recede::ProblemSpec p;
  p.dimension = 2;
  Eigen::MatrixXd q(2, 2);
  q << 0, 0, 0, 2;
  p.f = recede::make_quadratic(q, Eigen::VectorXd::Zero(2), 0.0);
  Eigen::VectorXd lo(2), hi(2);
  lo << 0, 0;
  hi << 1, std::numeric_limits<double>::infinity();
  p.set = recede::make_box(lo, hi);
  return p;
}

inline recede::ProblemSpec halfline_problem(recede::FunctionModel f) {
  recede::ProblemSpec p;
  p.dimension = 1;
  p.f = std::move(f);
  Eigen::MatrixXd a(1, 1);
  a << -1;
  p.set = recede::make_polyhedron(a, Eigen::VectorXd::Zero(1));
  return p;
}

// Seeded quadratic-over-polyhedron family (n <= 3, m <= 6). Even seeds give a
// positive definite objective (bounded below everywhere, recession condition
// holds); odd seeds plant a kernel direction inside the recession cone with a
// strictly negative linear slope (condition violated, problem unbounded).
struct SeededQp {
  recede::ProblemSpec p;
  bool violated = false;  // recession condition violated / problem unbounded
};

inline SeededQp make_seeded_qp(int seed) {
  const recede::CounterRng rng(static_cast<std::uint64_t>(seed) + 1000);
  const std::uint64_t s = recede::streams::instance_gen;
  const int n = 2 + seed % 2;  // 2 or 3
  const int m = 3 + seed % 4;  // 3..6 rows

  // Rows with strictly negative entries keep the nonnegative orthant inside
  // the recession cone {Au <= 0}; b >= 0 keeps the origin feasible.
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      a(i, j) = -0.2 - rng.uniform(s, static_cast<std::uint64_t>(100 * seed + 10 * i + j));
    b[i] = rng.uniform(s, static_cast<std::uint64_t>(100 * seed + 90 + i), 0.0, 2.0);
  }

  Eigen::MatrixXd base(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      base(i, j) = rng.uniform(s, static_cast<std::uint64_t>(1000 * seed + 10 * i + j), -1.0, 1.0);

  SeededQp out;
  out.p.dimension = n;
  out.violated = seed % 2 == 1;
  if (!out.violated) {
    // Eigenvalues >= 2 so sampled asymptotic estimates clear the divergence
    // cap along every unit direction (decisive holds, never inconclusive).
    const Eigen::MatrixXd q = base * base.transpose() + 2.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i)
      c[i] = rng.uniform(s, static_cast<std::uint64_t>(5000 * seed + i), -1.0, 1.0);
    out.p.f = recede::make_quadratic(q, c, 0.25);
  } else {
    // Kernel along k = (1,...,1)/sqrt(n), which lies in the recession cone,
    // with c k < 0: flat curvature and negative slope along a feasible ray.
    const Eigen::VectorXd k = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - k * k.transpose();
    const Eigen::MatrixXd q =
        proj * (base * base.transpose() + 2.0 * Eigen::MatrixXd::Identity(n, n)) * proj;
    Eigen::VectorXd c = -0.5 * k;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd noise =
          rng.uniform(s, static_cast<std::uint64_t>(7000 * seed + i), -0.3, 0.3) *
          proj.col(i);
      c += noise;
    }
    out.p.f = recede::make_quadratic(q, c, 0.0);
  }
  out.p.set = recede::make_polyhedron(a, b);
  return out;
}

// Hull-distance oracle for clouds of up to 3 points: barycentric grid search.
inline double hull_dist_grid(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& pts,
                             int steps = 200) {
  double best = std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return (x - pts[0]).norm();
  if (pts.size() == 2) {
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      best = std::min(best, (x - (t * pts[0] + (1 - t) * pts[1])).norm());
    }
    return best;
  }
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; i + j <= steps; ++j) {
      const double l0 = static_cast<double>(i) / steps;
      const double l1 = static_cast<double>(j) / steps;
      const double l2 = 1.0 - l0 - l1;
      best = std::min(best, (x - (l0 * pts[0] + l1 * pts[1] + l2 * pts[2])).norm());
    }
  return best;
}

}  // namespace testers
