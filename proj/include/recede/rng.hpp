#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace recede {

// Counter-based generator: every draw is a pure hash of (seed, stream, index),
// so results do not depend on evaluation order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const {
    return mix(seed_ ^ mix(stream ^ 0x9e3779b97f4a7c15ull) ^ mix(index + 0x2545f4914f6cdd1dull));
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform(std::uint64_t stream, std::uint64_t index) const {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t stream, std::uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(stream, index);
  }

  // Standard normal via Box-Muller on two decorrelated counters.
  double normal(std::uint64_t stream, std::uint64_t index) const {
    double u1 = uniform(stream, 2 * index);
    double u2 = uniform(stream, 2 * index + 1);
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(std::uint64_t stream, std::uint64_t index, int n) const {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(stream, index * static_cast<std::uint64_t>(n) + i);
    return v;
  }

  // Unit sphere sample; retries on (astronomically unlikely) near-zero draws.
  Eigen::VectorXd sphere(std::uint64_t stream, std::uint64_t index, int n) const {
    for (std::uint64_t k = 0;; ++k) {
      Eigen::VectorXd v = normal_vector(stream, index + (k << 48), n);
      double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

  Eigen::VectorXd box_point(std::uint64_t stream, std::uint64_t index, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) const {
    Eigen::VectorXd x(lo.size());
    for (int i = 0; i < lo.size(); ++i)
      x[i] = uniform(stream, index * static_cast<std::uint64_t>(lo.size()) + i, lo[i], hi[i]);
    return x;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

// Stream ids; keep distinct so different samplers never share counters.
namespace streams {
inline constexpr std::uint64_t cone_unit = 1;
inline constexpr std::uint64_t lhs_perm = 2;
inline constexpr std::uint64_t lhs_jitter = 3;
inline constexpr std::uint64_t asym_dir = 4;
inline constexpr std::uint64_t asym_radius = 5;
inline constexpr std::uint64_t asym_t = 6;
inline constexpr std::uint64_t multistart = 7;
inline constexpr std::uint64_t quasiconvex_pairs = 8;
inline constexpr std::uint64_t alpha_tilt = 9;
inline constexpr std::uint64_t subdiff_sphere = 10;
inline constexpr std::uint64_t subdiff_slab = 11;
inline constexpr std::uint64_t perturb_rays = 12;
inline constexpr std::uint64_t sharp_box = 13;
inline constexpr std::uint64_t sharp_ray = 14;
inline constexpr std::uint64_t coercivity = 15;
inline constexpr std::uint64_t instance_gen = 16;
}  // namespace streams

// Latin hypercube over a box: one stratum per sample and axis, deterministic
// permutations via counter-driven Fisher-Yates.
inline std::vector<Eigen::VectorXd> latin_hypercube(const CounterRng& rng, std::uint64_t stream,
                                                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                                    int count) {
  const int n = static_cast<int>(lo.size());
  std::vector<std::vector<int>> perm(n, std::vector<int>(count));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < count; ++i) perm[j][i] = i;
    for (int i = count - 1; i > 0; --i) {
      std::uint64_t idx = static_cast<std::uint64_t>(j) * count + i;
      int k = static_cast<int>(rng.bits(stream ^ streams::lhs_perm, idx) % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[j][i], perm[j][k]);
    }
  }
  std::vector<Eigen::VectorXd> out(count, Eigen::VectorXd(n));
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < n; ++j) {
      double u = rng.uniform(stream ^ streams::lhs_jitter, static_cast<std::uint64_t>(j) * count + i);
      out[i][j] = lo[j] + (hi[j] - lo[j]) * ((perm[j][i] + u) / count);
    }
  return out;
}

}  // namespace recede
