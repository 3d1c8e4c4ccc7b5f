#pragma once

#include <utility>
#include <vector>

#include "torusreg/angle.hpp"

namespace torusreg {

// Below this resultant length the circular mean is treated as undefined
// (atan2(0, 0) is platform-dependent).
inline constexpr double epsilon_resultant = 1e-12;

struct MeanResultant {
  Angle mean;
  double resultant_length = 0.0;
};

// Direction of the sample's vector sum and its mean resultant length.
// Throws EmptySampleError on n = 0 and UndefinedMeanError when the vector
// sum cancels (resultant below epsilon_resultant).
MeanResultant circular_mean_and_resultant(const AngleSample& sample);

// Resultant length alone; defined for every nonempty sample.
double resultant_length(const AngleSample& sample);

// Quantile on the circle: rotate the sample so its circular mean sits at pi,
// take the type-7 linear quantile of the rotated values, rotate back.
Angle circular_quantile(const AngleSample& sample, double p);

}  // namespace torusreg
