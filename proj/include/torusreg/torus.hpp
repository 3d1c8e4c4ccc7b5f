#pragma once

#include <cmath>

#include "torusreg/angle.hpp"

namespace torusreg {

// Ring torus with major radius R and minor radius r; R > r > 0 keeps the
// area density positive everywhere.
struct TorusGeometry {
  double R = 2.0;
  double r = 1.0;

  void validate() const {
    if (!(std::isfinite(R) && std::isfinite(r) && R > r && r > 0.0)) {
      throw InvalidInputError("torus geometry requires R > r > 0");
    }
  }
};

// Surface density r*(R + r*cos(theta)) per unit dphi dtheta.
inline double area_element(Angle theta, const TorusGeometry& geom) {
  return geom.r * (geom.R + geom.r * std::cos(theta.value()));
}

namespace detail {

// Area of the coordinate square [0,t] x [0,t] under the surface density:
// integrating r*(R + r*cos(u)) du over [0,t] and then over phi in [0,t]
// gives r*R*t^2 + r^2 * t * sin(t).
inline double square_area(double t, const TorusGeometry& geom) {
  return geom.r * geom.R * t * t + geom.r * geom.r * t * std::sin(t);
}

}  // namespace detail

// Squared-angle penalty: the smaller of the two square areas anchored at the
// diagonal points (0,0) and (psi,psi), one in each rotational direction.
inline double square_of_angle(Angle psi, const TorusGeometry& geom) {
  const double t = psi.value();
  return std::min(detail::square_area(t, geom), detail::square_area(two_pi - t, geom));
}

// Same penalty on a raw in-range value; hot-path helper for loss loops.
inline double square_of_angle_raw(double psi, const TorusGeometry& geom) {
  return std::min(detail::square_area(psi, geom), detail::square_area(two_pi - psi, geom));
}

// Mean squared-angle error over a residual sample.
inline double msae(const AngleSample& residuals, const TorusGeometry& geom) {
  if (residuals.empty()) {
    throw EmptySampleError("mean squared-angle error of an empty sample");
  }
  double acc = 0.0;
  for (Angle a : residuals) acc += square_of_angle(a, geom);
  return acc / static_cast<double>(residuals.size());
}

}  // namespace torusreg
