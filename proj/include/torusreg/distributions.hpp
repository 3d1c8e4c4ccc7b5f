#pragma once

#include <cstddef>
#include <vector>

#include "torusreg/angle.hpp"
#include "torusreg/rng.hpp"

namespace torusreg {

enum class AngularErrorFamily { VonMises, WrappedCauchy };

// Angular noise law: von Mises (concentration kappa > 0) or wrapped Cauchy
// (concentration rho in (0,1), which equals its mean resultant length).
struct AngularErrorSpec {
  AngularErrorFamily family = AngularErrorFamily::VonMises;
  Angle mu;
  double concentration = 1.0;

  void validate() const;
};

enum class PredictorFamily { StandardNormal, StandardCauchy };

struct PredictorSpec {
  PredictorFamily family = PredictorFamily::StandardNormal;
};

// n von Mises draws via the wrapped-Cauchy-envelope rejection scheme.
AngleSample sample_von_mises(const AngularErrorSpec& spec, std::size_t n, SeededRng& rng);

// n wrapped Cauchy draws via the inverse-CDF form
// theta = mu + 2*atan(((1-rho)/(1+rho)) * tan(pi*(U - 1/2))).
AngleSample sample_wrapped_cauchy(const AngularErrorSpec& spec, std::size_t n, SeededRng& rng);

// Dispatch on the family; used by simulation harnesses.
AngleSample sample_angular_error(const AngularErrorSpec& spec, std::size_t n, SeededRng& rng);

// n i.i.d. predictor draws; Cauchy via tan(pi*(U - 1/2)), Normal via
// Box-Muller.
std::vector<double> sample_predictor(const PredictorSpec& spec, std::size_t n, SeededRng& rng);

// F(theta) = integral over [0, theta] of the vM(mu, kappa) density, by
// adaptive quadrature of exp(kappa*(cos(u - mu) - 1)) normalized so that
// F(2pi) = 1. Absolute error <= 1e-9.
double von_mises_cdf(Angle theta, Angle mu, double kappa);

// Concentration from a mean resultant length via the standard three-branch
// rational approximation (branches at 0.53 and 0.85). The result is capped at
// 1e4: beyond that the density is numerically a point mass and the
// approximation error is irrelevant.
double kappa_from_resultant(double rbar);

}  // namespace torusreg
