#pragma once

#include <cstddef>

#include "torusreg/fit.hpp"
#include "torusreg/rng.hpp"

namespace torusreg {

// Equal-tail circular interval from bootstrap replicates. lower/upper are the
// endpoints of the counterclockwise arc from lower to upper; an interval
// straddling 0 therefore has lower > upper numerically, and containment is
// always an arc test, never a linear comparison.
struct IntervalResult {
  Angle lower;
  Angle upper;
  Angle center;
  double level = 0.0;
  std::size_t B = 0;
  AngleSample bootstrap_angles;  // retained for audit
};

// True when `a` lies on the counterclockwise arc from lower to upper
// (inclusive, with a one-ulp-scale tolerance at the endpoints).
bool arc_contains(Angle lower, Angle upper, Angle a);
inline bool arc_contains(const IntervalResult& interval, Angle a) {
  return arc_contains(interval.lower, interval.upper, a);
}

// Residual-bootstrap confidence interval for the conditional mean direction
// at x_j: fit, resample residuals with replacement onto fitted responses,
// refit, and take equal-tail circular quantiles of the replicate predictions.
// Replicate b resamples from substream b of config.seed; refits use the
// original solution as a warm start plus (n_starts - 1) random starts.
IntervalResult bootstrap_ci(const Dataset& data, double x_j, std::size_t B, double level,
                            const FitConfig& config);

// Prediction interval for a new response at x_j: identical scheme, except
// each replicate prediction has one extra resampled residual (drawn from
// `rng`) added before wrapping.
IntervalResult bootstrap_pi(const Dataset& data, double x_j, std::size_t B, double level,
                            const FitConfig& config, SeededRng& rng);

}  // namespace torusreg
