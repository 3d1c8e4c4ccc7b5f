#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace torusreg {

// Three-parameter box-constrained minimization by limited-memory BFGS with
// projection onto the box. Dimension is fixed at 3 (the model's parameter
// count); history pairs use the standard two-loop recursion.
struct BoxedMinimizeOptions {
  std::array<double, 3> lower{};
  std::array<double, 3> upper{};
  double grad_tol = 1e-8;
  std::size_t max_iters = 500;
  std::size_t history = 8;
  // Applied after every projection; lets callers keep iterates out of
  // forbidden interior regions (e.g. a band around b2 = 0).
  std::function<void(std::array<double, 3>&)> fixup;
};

struct BoxedMinimizeResult {
  std::array<double, 3> x{};
  double f = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::array<double, 3>&)>;
using Gradient = std::function<std::array<double, 3>(const std::array<double, 3>&)>;

BoxedMinimizeResult minimize_boxed(const Objective& f, const Gradient& grad,
                                   std::array<double, 3> x0,
                                   const BoxedMinimizeOptions& options);

}  // namespace torusreg
