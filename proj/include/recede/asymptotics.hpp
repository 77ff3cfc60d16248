#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "recede/ext_real.hpp"
#include "recede/models.hpp"

namespace recede {

enum class EstimateMethod { closed, sampled };
enum class BoundKind { exact, lower, upper, interval };

// Value of an asymptotic function at one direction, with enough provenance to
// audit it: closed/sampled route, bound direction, per-level diagnostics.
struct Estimate {
  ExtReal value = 0.0;
  EstimateMethod method = EstimateMethod::closed;
  BoundKind bound = BoundKind::exact;
  double lo = 0.0, hi = 0.0;    // interval endpoints (raw, +/-inf allowed)
  std::vector<double> levels;   // m_j per shrink level (sampled), cap if truncated
  bool monotone = true;
  bool divergence_flag = false;

  double width() const { return bound == BoundKind::interval ? hi - lo : 0.0; }
};

struct AsymCfg {
  double t_min = 1e-6;
  double t_max = 1e8;
  int t_count = 64;       // t grid points per level
  int levels = 8;         // shrink levels J
  double rho0 = 0.5;      // initial direction-ball radius, halved per level
  int dir_samples = 256;  // direction jitters per level
  double cap = 1e6;       // divergence cap
  std::uint64_t seed = 42;
  int x_samples = 4096;         // x points for the sup-of-quotients paths
  double box_halfwidth = 10.0;  // x sampling window [-w, w]^n
  bool force_sampled = false;   // bypass closed forms (oracle-equivalence tests)
};

AsymCfg cfg_from_options(const Options& o);
void validate_cfg(const AsymCfg& cfg);

std::vector<double> log_grid(double lo, double hi, int count);

// f-infinity at d: closed form for the catalog, else the nested liminf
// estimator (interval bound).
Estimate asym_fn(const FunctionModel& f, const Eigen::VectorXd& d, const AsymCfg& cfg);

// sup over x and t > 0 of (f(x+tu)-f(x))/t: closed form for the catalog, else
// Latin-hypercube x-sampling (lower bound).
Estimate q_asym_fn(const FunctionModel& f, const Eigen::VectorXd& u, const AsymCfg& cfg);

// Same supremum with x restricted to the lambda-sublevel set of f.
Estimate sublevel_asym_fn(const FunctionModel& f, double lambda, const Eigen::VectorXd& u,
                          const AsymCfg& cfg);

// Shared sup-of-quotients core over explicit samples; +inf evaluations of the
// shifted point force divergence. Exposed so tests can build nested-sample
// comparisons with identical grids.
Estimate quotient_sup_estimate(const FunctionModel& f, const Eigen::VectorXd& u,
                               const std::vector<Eigen::VectorXd>& x_list,
                               const std::vector<double>& t_grid, double cap);

// Master x sample for the sup paths: origin anchor + Latin hypercube.
std::vector<Eigen::VectorXd> asym_x_samples(const AsymCfg& cfg, int dim);

// Quotient supremum for f + indicator(X): x-samples filtered to X, and steps
// leaving X count as +inf. Realizes the indicator identity numerically.
Estimate q_asym_constrained(const FunctionModel& f, const SetModel& x_set, const Eigen::VectorXd& u,
                            const AsymCfg& cfg);

// Exact infimum of a catalog function over the whole space, when available.
std::optional<ExtReal> inf_value_closed(const FunctionModel& f);

// The three sampled estimates built on nested x-sets sharing one t-grid:
// {anchor} for the plain proxy, the lambda-filtered samples for sublevel, the
// full sample for q. Nesting makes plain <= sublevel <= q structural.
struct ChainEstimates {
  Estimate plain_proxy;
  Estimate sublevel;
  Estimate q;
};
ChainEstimates chain_estimates(const FunctionModel& f, double lambda, const Eigen::VectorXd& u,
                               const AsymCfg& cfg);

struct TiltIdentitySide {
  Estimate lhs;  // asymptotic value of the tilted function
  Estimate rhs;  // asymptotic value of the base, shifted by -<u,d>
  double gap = 0.0;
  bool pass = false;
};

struct TiltIdentityReport {
  TiltIdentitySide plain;
  TiltIdentitySide q;
  bool pass = false;
};

TiltIdentityReport tilt_identity_check(const FunctionModel& f, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& d, const AsymCfg& cfg);

}  // namespace recede
