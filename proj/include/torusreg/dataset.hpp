#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "torusreg/angle.hpp"

namespace torusreg {

// Paired (predictor, angular response) observations, stored column-wise.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<double> xs, AngleSample thetas)
      : xs_(std::move(xs)), thetas_(std::move(thetas)) {
    if (xs_.size() != thetas_.size()) {
      throw InvalidInputError("predictor and response lengths differ");
    }
    for (double x : xs_) {
      if (!std::isfinite(x)) {
        throw InvalidInputError("predictors must be finite");
      }
    }
  }

  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const AngleSample& thetas() const { return thetas_; }

 private:
  std::vector<double> xs_;
  AngleSample thetas_;
};

}  // namespace torusreg
