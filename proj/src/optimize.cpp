#include "torusreg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "torusreg/errors.hpp"

namespace torusreg {

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

struct Pair {
  Vec3 s;
  Vec3 y;
  double rho;
};

}  // namespace

BoxedMinimizeResult minimize_boxed(const Objective& f, const Gradient& grad,
                                   Vec3 x0, const BoxedMinimizeOptions& options) {
  const auto project = [&options](Vec3& v) {
    for (int k = 0; k < 3; ++k) {
      v[k] = std::clamp(v[k], options.lower[k], options.upper[k]);
    }
    if (options.fixup) options.fixup(v);
  };

  Vec3 x = x0;
  project(x);
  double fx = f(x);
  Vec3 g = grad(x);
  std::deque<Pair> pairs;

  BoxedMinimizeResult result;
  result.x = x;
  result.f = fx;

  // The projected gradient is zero along coordinates pinned at an active
  // bound, so convergence at a box face is recognized.
  const auto projected_gradient = [&](const Vec3& xi, const Vec3& gi) {
    Vec3 pg = gi;
    for (int k = 0; k < 3; ++k) {
      const bool at_lower = xi[k] <= options.lower[k] && gi[k] > 0.0;
      const bool at_upper = xi[k] >= options.upper[k] && gi[k] < 0.0;
      if (at_lower || at_upper) pg[k] = 0.0;
    }
    return pg;
  };

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    const Vec3 pg = projected_gradient(x, g);
    if (norm(pg) <= options.grad_tol) {
      result.converged = true;
      break;
    }

    // Two-loop recursion over stored curvature pairs.
    Vec3 d = {-g[0], -g[1], -g[2]};
    if (!pairs.empty()) {
      std::vector<double> alpha(pairs.size());
      for (std::size_t i = pairs.size(); i-- > 0;) {
        alpha[i] = pairs[i].rho * dot(pairs[i].s, d);
        for (int k = 0; k < 3; ++k) d[k] -= alpha[i] * pairs[i].y[k];
      }
      const Pair& last = pairs.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (int k = 0; k < 3; ++k) d[k] *= gamma;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double beta = pairs[i].rho * dot(pairs[i].y, d);
        for (int k = 0; k < 3; ++k) d[k] += (alpha[i] - beta) * pairs[i].s[k];
      }
    }
    if (dot(d, g) >= 0.0) {
      // Not a descent direction (stale curvature); fall back to steepest
      // descent for this iteration.
      d = {-g[0], -g[1], -g[2]};
    }

    // Backtracking line search on the projected path.
    const double c1 = 1e-4;
    double step = 1.0;
    Vec3 x_new = x;
    double f_new = fx;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Vec3 cand = {x[0] + step * d[0], x[1] + step * d[1], x[2] + step * d[2]};
      project(cand);
      const Vec3 delta = sub(cand, x);
      if (norm(delta) < 1e-16) break;  // projection absorbed the whole step
      const double f_cand = f(cand);
      // The projection can bend the step, so never accept an ascent even if
      // the Armijo inequality is vacuously satisfied.
      if (f_cand <= fx + c1 * std::min(0.0, dot(g, delta)) && f_cand <= fx) {
        x_new = cand;
        f_new = f_cand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No progress possible along this direction at any tried step.
      break;
    }

    const Vec3 g_new = grad(x_new);
    const Vec3 s = sub(x_new, x);
    const Vec3 y = sub(g_new, g);
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm(s) * norm(y)) {
      pairs.push_back(Pair{s, y, 1.0 / sy});
      if (pairs.size() > options.history) pairs.pop_front();
    }

    x = x_new;
    fx = f_new;
    g = g_new;
    result.iterations = iter + 1;
  }

  // Final convergence check when the loop ran to exhaustion.
  if (!result.converged) {
    const Vec3 pg = projected_gradient(x, g);
    result.converged = norm(pg) <= options.grad_tol;
  }
  result.x = x;
  result.f = fx;
  return result;
}

}  // namespace torusreg
