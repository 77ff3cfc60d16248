#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "recede/errors.hpp"

namespace recede {

// Extended real line R u {-inf, +inf}. Backed by an IEEE double whose
// infinities act as the markers; NaN is rejected everywhere. Addition of
// opposite infinities is an error rather than NaN.
class ExtReal {
 public:
  ExtReal() : v_(0.0) {}
  ExtReal(double v) : v_(v) {  // NOLINT: implicit by design, mirrors double
    if (std::isnan(v)) fail(ErrorCode::validation_error, "ExtReal: NaN is not a value");
  }

  static ExtReal plus_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal minus_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_plus_inf() const { return std::isinf(v_) && v_ > 0; }
  bool is_minus_inf() const { return std::isinf(v_) && v_ < 0; }

  // Finite payload; calling this on a marker is a logic error in the caller.
  double finite() const {
    if (!is_finite()) fail(ErrorCode::validation_error, "ExtReal: marker has no finite value");
    return v_;
  }
  // Raw double including +/-inf, for ordering and clamped arithmetic.
  double raw() const { return v_; }

  friend bool operator==(const ExtReal& a, const ExtReal& b) { return a.v_ == b.v_; }
  friend bool operator!=(const ExtReal& a, const ExtReal& b) { return a.v_ != b.v_; }
  friend bool operator<(const ExtReal& a, const ExtReal& b) { return a.v_ < b.v_; }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return a.v_ <= b.v_; }
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return a.v_ > b.v_; }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return a.v_ >= b.v_; }

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    if ((a.is_plus_inf() && b.is_minus_inf()) || (a.is_minus_inf() && b.is_plus_inf()))
      fail(ErrorCode::invalid_inf_sum, "ExtReal: (+inf) + (-inf) is undefined");
    return ExtReal(a.v_ + b.v_);
  }
  friend ExtReal operator-(const ExtReal& a) { return ExtReal(-a.v_); }
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + (-b); }

  std::string str() const {
    if (is_plus_inf()) return "inf";
    if (is_minus_inf()) return "-inf";
    return std::to_string(v_);
  }

 private:
  double v_;
};

}  // namespace recede
