#include "torusreg/circular_stats.hpp"

#include <algorithm>
#include <cmath>

namespace torusreg {

namespace {

struct VectorSum {
  double s = 0.0;
  double c = 0.0;
};

VectorSum vector_sum(const AngleSample& sample) {
  VectorSum vs;
  for (Angle a : sample) {
    vs.s += std::sin(a.value());
    vs.c += std::cos(a.value());
  }
  return vs;
}

}  // namespace

MeanResultant circular_mean_and_resultant(const AngleSample& sample) {
  if (sample.empty()) {
    throw EmptySampleError("circular mean of an empty sample");
  }
  const VectorSum vs = vector_sum(sample);
  const double rbar = std::hypot(vs.s, vs.c) / static_cast<double>(sample.size());
  if (rbar < epsilon_resultant) {
    throw UndefinedMeanError("circular mean undefined: resultant length ~ 0");
  }
  return MeanResultant{Angle(std::atan2(vs.s, vs.c)), rbar};
}

double resultant_length(const AngleSample& sample) {
  if (sample.empty()) {
    throw EmptySampleError("resultant length of an empty sample");
  }
  const VectorSum vs = vector_sum(sample);
  return std::hypot(vs.s, vs.c) / static_cast<double>(sample.size());
}

Angle circular_quantile(const AngleSample& sample, double p) {
  if (sample.empty()) {
    throw EmptySampleError("circular quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInputError("quantile probability must lie in [0, 1]");
  }
  const Angle mean = circular_mean_and_resultant(sample).mean;
  // Rotate so the mean lands at pi, the midpoint of [0, 2pi); the sample then
  // sits away from the cut at 0, and an ordinary linear quantile applies.
  const double shift = std::numbers::pi - mean.value();
  std::vector<double> rotated;
  rotated.reserve(sample.size());
  for (Angle a : sample) rotated.push_back(wrap_radians(a.value() + shift));
  std::sort(rotated.begin(), rotated.end());

  const auto n = rotated.size();
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  const auto hi = std::min(lo + 1, n - 1);
  const double q = rotated[lo] + (h - static_cast<double>(lo)) * (rotated[hi] - rotated[lo]);
  return Angle(q - shift);
}

}  // namespace torusreg
