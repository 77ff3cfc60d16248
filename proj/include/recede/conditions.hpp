#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "recede/asymptotics.hpp"
#include "recede/cones.hpp"
#include "recede/models.hpp"

namespace recede {

enum class Verdict { holds, violated, inconclusive };
const char* verdict_name(Verdict v);

struct CheckResult {
  Verdict verdict = Verdict::inconclusive;
  bool exact_mode = false;
  std::optional<Eigen::VectorXd> witness_dir;  // unit direction
  std::optional<ExtReal> witness_value;
  std::optional<double> margin;  // min sampled value when the condition holds
  std::string note;
};

enum class CheckKind { plain, q, sublevel };
const char* check_kind_name(CheckKind k);

struct RecessionCfg {
  AsymCfg asym;
  int dir_samples = 256;       // cone directions in sampled mode
  double violation_tol = 1e-3;  // value at or below: violated
  double hold_margin = 1e-2;    // min value at or above: holds
};

// Does the asymptotic cone of X meet {d : (asymptotic value of f at d) <= 0}
// only at the origin? Exact LP route for affine / PSD-quadratic f over
// polyhedral cones; sampled directions otherwise.
CheckResult recession_check(const ProblemSpec& p, CheckKind kind, double lambda,
                            const RecessionCfg& cfg);

enum class CoercivityVerdict { coercive_on_X, not_coercive, inconclusive };
const char* coercivity_verdict_name(CoercivityVerdict v);

struct CoercivityRay {
  Eigen::VectorXd anchor;
  Eigen::VectorXd dir;
  std::vector<double> values;  // f(anchor + t dir) over the probe decades
};

struct CoercivityReport {
  CoercivityVerdict verdict = CoercivityVerdict::inconclusive;
  bool vacuous = false;         // X bounded: nothing escapes
  double reference_level = 0.0;  // max f over the feasible reference ball
  std::vector<CoercivityRay> rays;
  std::string note;
};

CoercivityReport coercivity_probe(const ProblemSpec& p, const RecessionCfg& cfg);

struct QcWitness {
  Eigen::VectorXd x, y;
  double lambda = 0.0;
  double mid_value = 0.0;
  double end_max = 0.0;
};

struct QcResult {
  Verdict verdict = Verdict::holds;
  std::optional<QcWitness> witness;
};

struct QcCfg {
  int pairs = 2000;
  std::uint64_t seed = 42;
  double violation_tol = 1e-9;
};

// Segment test on sampled pairs: fails when some interior point beats both
// endpoints by more than the tolerance. One-sided (pass is not a proof).
QcResult quasiconvexity_test(const FunctionModel& f, const SetModel& box, const QcCfg& cfg);

struct AlphaWitness {
  Eigen::VectorXd u;
  QcWitness qc;
};

struct AlphaResult {
  Verdict verdict = Verdict::holds;
  std::optional<AlphaWitness> witness;
};

struct AlphaCfg {
  int tilts = 32;
  QcCfg qc;
};

// Quasiconvexity of f + <u, x> over sampled |u| < alpha (deterministic axis
// tilts first, then ball samples).
AlphaResult alpha_robust_test(const FunctionModel& f, double alpha, const SetModel& box,
                              const AlphaCfg& cfg);

}  // namespace recede
