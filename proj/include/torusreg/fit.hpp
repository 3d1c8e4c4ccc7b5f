#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "torusreg/dataset.hpp"
#include "torusreg/mobius.hpp"
#include "torusreg/torus.hpp"

namespace torusreg {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Multistart protocol and optimizer settings. n_starts counts the uniform
// random starts; when informed_starts is set, a deterministic data-driven
// candidate grid is ranked by loss and its best three entries are polished as
// additional starts (needed to reach negative-b2 optima, which the uniform
// b2 start range cannot). warm_starts are tried first and win loss ties.
struct FitConfig {
  TorusGeometry geometry{};
  std::size_t n_starts = 50;
  ParamRange b0_bounds{0.0, two_pi};
  ParamRange b1_bounds{-50.0, 50.0};
  ParamRange b2_bounds{-50.0, 50.0};
  ParamRange b0_start{0.0, two_pi};
  ParamRange b1_start{-10.0, 10.0};
  ParamRange b2_start{0.0, 10.0};
  double fd_step = 1e-6;
  double grad_tol = 1e-8;
  std::size_t max_iters = 500;
  std::uint64_t seed = 42;
  bool informed_starts = true;
  std::vector<ModelParams> warm_starts;
  // Worker count for replicate-level loops (bootstrap, simulations); a fit
  // itself runs its starts sequentially.
  std::size_t jobs = 1;

  void validate() const;
};

struct FitResult {
  ModelParams params;
  double loss = 0.0;
  // Final loss of every polished start, in start order
  // (warm..., informed..., random...).
  std::vector<double> per_start_losses;
  bool converged = false;
  std::size_t iterations = 0;
  AngleSample residuals;
  std::uint64_t seed = 0;
};

// Mean squared-angle error of the data against the model's link curve.
double loss_at(const ModelParams& params, const Dataset& data, const TorusGeometry& geom);

// Central-difference gradient of loss_at, one coordinate at a time. The b0
// perturbation is fed to the link unwrapped (wrapping happens inside).
// Requires h > 0 and |b2| > h so the perturbation cannot cross b2 = 0.
std::array<double, 3> fd_gradient(const ModelParams& params, const Dataset& data,
                                  const TorusGeometry& geom, double h);

// Data-driven start candidates: b1 on predictor percentiles, b2 on a fixed
// two-sided grid, b0 by closed-form circular-mean alignment; the best top_k
// by loss are returned. Exposed for tests.
std::vector<ModelParams> informed_start_candidates(const Dataset& data,
                                                   const TorusGeometry& geom,
                                                   std::size_t top_k);

// Multistart bounded quasi-Newton minimization of loss_at.
FitResult fit(const Dataset& data, const FitConfig& config);

}  // namespace torusreg
