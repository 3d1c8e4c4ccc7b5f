#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "torusreg/angle.hpp"

namespace torusreg {

// Circular-regression parameters: rotation b0 plus the complex pole
// beta1 = b1 + i*b2. b2 must be nonzero, otherwise the map collapses to the
// constant exp(i*b0).
struct ModelParams {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 1.0;

  void validate() const {
    if (!(std::isfinite(b0) && std::isfinite(b1) && std::isfinite(b2))) {
      throw InvalidInputError("model parameters must be finite");
    }
    if (b2 == 0.0) {
      throw DegenerateParameterError("b2 must be nonzero (constant-map collapse)");
    }
  }
};

// exp(i*b0) * (x - beta1) / (x - conj(beta1)); always on the unit circle for
// finite x because numerator and denominator are complex conjugates in
// modulus.
inline std::complex<double> mobius_map(double x, const ModelParams& params) {
  params.validate();
  if (!std::isfinite(x)) {
    throw InvalidInputError("mobius map input must be finite");
  }
  const std::complex<double> beta1(params.b1, params.b2);
  const std::complex<double> rotation = std::polar(1.0, params.b0);
  return rotation * (x - beta1) / (x - std::conj(beta1));
}

// Argument of the Mobius image, in [0, 2pi). atan2's sign symmetry collapses
// arg(x - beta1) - arg(x - conj(beta1)) to -2*atan2(b2, x - b1), which is the
// form used on hot paths.
inline double link_raw(double x, const ModelParams& params) {
  return wrap_radians(params.b0 - 2.0 * std::atan2(params.b2, x - params.b1));
}

inline Angle link(double x, const ModelParams& params) {
  params.validate();
  if (!std::isfinite(x)) {
    throw InvalidInputError("link input must be finite");
  }
  return Angle(link_raw(x, params));
}

// Elementwise link over a predictor list; order and length preserved.
inline AngleSample predict_curve(const std::vector<double>& xs, const ModelParams& params) {
  params.validate();
  AngleSample out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      throw InvalidInputError("non-finite predictor at index " + std::to_string(i));
    }
    out.emplace_back(link_raw(xs[i], params));
  }
  return out;
}

}  // namespace torusreg
