#pragma once

#include <utility>
#include <vector>

#include "torusreg/angle.hpp"

namespace torusreg {

struct WatsonResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double significance_level = 0.0;
  bool reject = false;
  Angle estimated_mu;
  double estimated_kappa = 0.0;
};

// Watson's U-squared goodness-of-fit test of the residuals against the von
// Mises family with both parameters estimated from the sample (circular mean
// and resultant-length inversion). Only the 5% level is supported; the
// critical value is fixed at 0.079.
WatsonResult watson_u2_vonmises(const AngleSample& residuals, double level);

// Quantile-quantile pairs of two angle samples at probabilities
// p = (i - 0.5)/m, i = 1..m, m = min of the sample sizes; plot-ready data.
std::vector<std::pair<Angle, Angle>> qq_points(const AngleSample& observed,
                                               const AngleSample& predicted);

// Linear-circular association in [0, 1] from the pairwise Pearson
// correlations of x with cos(theta), sin(theta), and of the two components
// with each other.
double circular_linear_correlation(const std::vector<double>& xs, const AngleSample& thetas);

}  // namespace torusreg
