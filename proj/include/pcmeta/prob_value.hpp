#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace pcmeta {

/// A probability kept in both linear and natural-log form.
///
/// The log form is authoritative for ordering and arithmetic: values such as
/// 1e-400 are representable (log_value = -921.0) even though the linear
/// field underflows to zero. The linear field is exp(log_value) rounded to
/// double, except when constructed from a linear value, in which case it is
/// kept verbatim.
class ProbValue {
 public:
  constexpr ProbValue() = default;

  static ProbValue from_linear(double p);
  static ProbValue from_log(double log_p);

  static constexpr ProbValue zero() { return ProbValue(0.0, -std::numeric_limits<double>::infinity()); }
  static constexpr ProbValue one() { return ProbValue(1.0, 0.0); }

  [[nodiscard]] constexpr double linear() const { return linear_; }
  [[nodiscard]] constexpr double log() const { return log_; }

  [[nodiscard]] bool is_zero() const { return log_ == -std::numeric_limits<double>::infinity(); }
  [[nodiscard]] bool is_one() const { return log_ == 0.0; }

  /// Ordering and equality use the log representation.
  friend bool operator==(const ProbValue& a, const ProbValue& b) { return a.log_ == b.log_; }
  friend std::partial_ordering operator<=>(const ProbValue& a, const ProbValue& b) {
    return a.log_ <=> b.log_;
  }

  /// min(1, factor * p); factor must be positive.
  [[nodiscard]] ProbValue scaled(double factor) const;

 private:
  constexpr ProbValue(double linear, double log_value) : linear_(linear), log_(log_value) {}

  double linear_ = 1.0;
  double log_ = 0.0;
};

}  // namespace pcmeta
