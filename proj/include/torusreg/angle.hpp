#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "torusreg/errors.hpp"

namespace torusreg {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reduce a finite value into [0, 2pi). fmod can return exactly 2pi after the
// non-negativity correction when the argument is a tiny negative number, so
// that case is folded back to 0.
inline double wrap_radians(double raw) {
  double w = std::fmod(raw, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

// An angle in radians, normalized to [0, 2pi) on construction.
class Angle {
 public:
  constexpr Angle() = default;

  explicit Angle(double raw) {
    if (!std::isfinite(raw)) {
      throw InvalidInputError("angle must be finite");
    }
    value_ = wrap_radians(raw);
  }

  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

inline Angle wrap_angle(double raw) { return Angle(raw); }

// Directed residual (observed - predicted) mod 2pi.
inline Angle angular_residual(Angle observed, Angle predicted) {
  return Angle(observed.value() - predicted.value());
}

using AngleSample = std::vector<Angle>;

inline AngleSample to_angles(const std::vector<double>& raw) {
  AngleSample out;
  out.reserve(raw.size());
  for (double v : raw) out.emplace_back(v);
  return out;
}

inline std::vector<double> to_values(const AngleSample& sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (Angle a : sample) out.push_back(a.value());
  return out;
}

}  // namespace torusreg
