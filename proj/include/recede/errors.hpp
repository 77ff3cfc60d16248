#pragma once

#include <stdexcept>
#include <string>

namespace recede {

enum class ErrorCode {
  dimension_mismatch,
  parse_error,
  validation_error,
  config_error,
  empty_set,
  infeasible_set,
  not_convex_set,
  non_smooth_point,
  max_iterations,
  degenerate_cone,
  sampling_stalled,
  empty_sublevel_set,
  empty_sol_set,
  too_many_constraints,
  nonsmooth_unsupported,
  no_far_feasible_points,
  invalid_inf_sum,
  usage_error,
};

// Single exception type; tests dispatch on `code`, humans read `what()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::empty_set: return "empty_set";
    case ErrorCode::infeasible_set: return "infeasible_set";
    case ErrorCode::not_convex_set: return "not_convex_set";
    case ErrorCode::non_smooth_point: return "non_smooth_point";
    case ErrorCode::max_iterations: return "max_iterations";
    case ErrorCode::degenerate_cone: return "degenerate_cone";
    case ErrorCode::sampling_stalled: return "sampling_stalled";
    case ErrorCode::empty_sublevel_set: return "empty_sublevel_set";
    case ErrorCode::empty_sol_set: return "empty_sol_set";
    case ErrorCode::too_many_constraints: return "too_many_constraints";
    case ErrorCode::nonsmooth_unsupported: return "nonsmooth_unsupported";
    case ErrorCode::no_far_feasible_points: return "no_far_feasible_points";
    case ErrorCode::invalid_inf_sum: return "invalid_inf_sum";
    case ErrorCode::usage_error: return "usage_error";
  }
  return "unknown";
}

}  // namespace recede
