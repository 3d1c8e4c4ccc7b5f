#include "torusreg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torusreg/circular_stats.hpp"
#include "torusreg/optimize.hpp"
#include "torusreg/rng.hpp"

namespace torusreg {

namespace {

// Iterates are kept at least this far from the b2 = 0 ridge, where the link
// degenerates to a constant and the loss surface plateaus.
constexpr double b2_guard = 1e-4;

constexpr std::uint64_t fit_start_stream = 0x5f17;

// Loss without parameter validation or Angle boxing; callers guarantee
// b2 != 0 and wrapped responses.
double loss_raw(const std::array<double, 3>& p, const Dataset& data,
                const TorusGeometry& geom) {
  const auto& xs = data.xs();
  const auto& thetas = data.thetas();
  const std::size_t n = xs.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = wrap_radians(p[0] - 2.0 * std::atan2(p[2], xs[i] - p[1]));
    const double resid = wrap_radians(thetas[i].value() - pred);
    acc += square_of_angle_raw(resid, geom);
  }
  return acc / static_cast<double>(n);
}

std::array<double, 3> gradient_raw(const std::array<double, 3>& p, const Dataset& data,
                                   const TorusGeometry& geom, double h) {
  std::array<double, 3> g{};
  for (int k = 0; k < 3; ++k) {
    std::array<double, 3> hi = p;
    std::array<double, 3> lo = p;
    hi[k] += h;
    lo[k] -= h;
    g[k] = (loss_raw(hi, data, geom) - loss_raw(lo, data, geom)) / (2.0 * h);
  }
  return g;
}

double percentile(std::vector<double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

void FitConfig::validate() const {
  geometry.validate();
  if (n_starts < 1 && warm_starts.empty()) {
    throw InvalidInputError("n_starts must be at least 1 unless warm starts are given");
  }
  if (!(fd_step > 0.0)) throw InvalidInputError("fd_step must be positive");
  if (!(grad_tol > 0.0)) throw InvalidInputError("grad_tol must be positive");
  if (max_iters < 1) throw InvalidInputError("max_iters must be at least 1");
  const auto contains = [](const ParamRange& outer, const ParamRange& inner) {
    return outer.lo <= inner.lo && inner.hi <= outer.hi && inner.lo <= inner.hi;
  };
  if (n_starts > 0 && (!contains(b0_bounds, b0_start) || !contains(b1_bounds, b1_start) ||
                       !contains(b2_bounds, b2_start))) {
    throw InvalidInputError("start ranges must lie inside the bounds");
  }
}

double loss_at(const ModelParams& params, const Dataset& data, const TorusGeometry& geom) {
  params.validate();
  geom.validate();
  if (data.size() == 0) throw EmptySampleError("loss of an empty dataset");
  return loss_raw({params.b0, params.b1, params.b2}, data, geom);
}

std::array<double, 3> fd_gradient(const ModelParams& params, const Dataset& data,
                                  const TorusGeometry& geom, double h) {
  params.validate();
  if (!(h > 0.0)) throw InvalidInputError("finite-difference step must be positive");
  if (std::abs(params.b2) <= h) {
    throw InvalidInputError(
        "finite-difference perturbation would cross b2 = 0; use a smaller step");
  }
  return gradient_raw({params.b0, params.b1, params.b2}, data, geom, h);
}

std::vector<ModelParams> informed_start_candidates(const Dataset& data,
                                                   const TorusGeometry& geom,
                                                   std::size_t top_k) {
  static constexpr double b2_grid[] = {0.1, 0.5, 2.0, 8.0, -0.1, -0.5, -2.0, -8.0};
  static constexpr double percentiles[] = {0.10, 0.25, 0.50, 0.75, 0.90};

  std::vector<double> xs_sorted = data.xs();
  std::sort(xs_sorted.begin(), xs_sorted.end());

  std::vector<double> b1_candidates;
  for (double pq : percentiles) b1_candidates.push_back(percentile(xs_sorted, pq));

  // When |b2| is small the curve is a near-step whose pole sits where
  // x-adjacent responses jump the farthest; percentile candidates alone can
  // miss that narrow basin entirely. Add the two largest-jump midpoints.
  {
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data.xs()[a] < data.xs()[b]; });
    std::vector<std::pair<double, double>> jumps;  // (distance, midpoint)
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const double d =
          angular_residual(data.thetas()[order[i + 1]], data.thetas()[order[i]]).value();
      const double dist = std::min(d, two_pi - d);
      jumps.emplace_back(dist, 0.5 * (data.xs()[order[i]] + data.xs()[order[i + 1]]));
    }
    std::stable_sort(jumps.begin(), jumps.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < jumps.size() && i < 2; ++i) {
      b1_candidates.push_back(jumps[i].second);
    }
  }

  struct Scored {
    double loss;
    ModelParams params;
  };
  std::vector<Scored> scored;
  for (double b1 : b1_candidates) {
    for (double b2 : b2_grid) {
      // With (b1, b2) fixed the loss is minimized near the rotation that
      // aligns the de-linked responses, i.e. the circular mean of
      // theta_i + 2*atan2(b2, x_i - b1).
      double s = 0.0;
      double c = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double a = data.thetas()[i].value() + 2.0 * std::atan2(b2, data.xs()[i] - b1);
        s += std::sin(a);
        c += std::cos(a);
      }
      if (std::hypot(s, c) < epsilon_resultant * static_cast<double>(data.size())) {
        continue;
      }
      const double b0 = wrap_radians(std::atan2(s, c));
      const ModelParams candidate{b0, b1, b2};
      scored.push_back({loss_raw({b0, b1, b2}, data, geom), candidate});
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.loss < b.loss; });
  std::vector<ModelParams> out;
  for (std::size_t i = 0; i < scored.size() && i < top_k; ++i) {
    out.push_back(scored[i].params);
  }
  return out;
}

FitResult fit(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (data.size() < 3) {
    throw InvalidInputError("fitting requires at least 3 observations");
  }

  // Assemble the start list: warm starts first (they win ties), then the
  // informed candidates, then the uniform random protocol.
  std::vector<std::array<double, 3>> starts;
  for (const ModelParams& w : config.warm_starts) {
    w.validate();
    starts.push_back({w.b0, w.b1, w.b2});
  }
  if (config.informed_starts) {
    for (const ModelParams& c : informed_start_candidates(data, config.geometry, 3)) {
      starts.push_back({c.b0, c.b1, c.b2});
    }
  }
  SeededRng rng(config.seed, fit_start_stream);
  for (std::size_t k = 0; k < config.n_starts; ++k) {
    starts.push_back({rng.uniform(config.b0_start.lo, config.b0_start.hi),
                      rng.uniform(config.b1_start.lo, config.b1_start.hi),
                      rng.uniform(config.b2_start.lo, config.b2_start.hi)});
  }

  BoxedMinimizeOptions options;
  options.lower = {config.b0_bounds.lo, config.b1_bounds.lo, config.b2_bounds.lo};
  options.upper = {config.b0_bounds.hi, config.b1_bounds.hi, config.b2_bounds.hi};
  options.grad_tol = config.grad_tol;
  options.max_iters = config.max_iters;
  options.fixup = [](std::array<double, 3>& v) {
    if (std::abs(v[2]) < b2_guard) v[2] = std::copysign(b2_guard, v[2]);
  };

  const Objective objective = [&](const std::array<double, 3>& p) {
    return loss_raw(p, data, config.geometry);
  };
  const Gradient gradient = [&](const std::array<double, 3>& p) {
    return gradient_raw(p, data, config.geometry, config.fd_step);
  };

  FitResult result;
  result.seed = config.seed;
  result.per_start_losses.reserve(starts.size());
  std::size_t best_index = starts.size();
  double best_loss = std::numeric_limits<double>::infinity();
  BoxedMinimizeResult best_run;
  std::size_t guard_terminations = 0;

  for (std::size_t s = 0; s < starts.size(); ++s) {
    const BoxedMinimizeResult run = minimize_boxed(objective, gradient, starts[s], options);
    result.per_start_losses.push_back(run.f);
    if (std::abs(run.x[2]) <= b2_guard) ++guard_terminations;
    if (std::isfinite(run.f) && run.f < best_loss) {
      best_loss = run.f;
      best_index = s;
      best_run = run;
    }
  }

  if (best_index == starts.size()) {
    throw FitFailureError("no start produced a finite loss");
  }
  if (guard_terminations == starts.size()) {
    std::ostringstream msg;
    msg << "all " << starts.size()
        << " starts terminated at the b2 degeneracy guard; per-start losses:";
    for (double l : result.per_start_losses) msg << ' ' << l;
    throw FitFailureError(msg.str());
  }

  result.params = ModelParams{wrap_radians(best_run.x[0]), best_run.x[1], best_run.x[2]};
  result.converged = best_run.converged;
  result.iterations = best_run.iterations;
  result.residuals.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    result.residuals.push_back(
        angular_residual(data.thetas()[i], link(data.xs()[i], result.params)));
  }
  result.loss = msae(result.residuals, config.geometry);
  return result;
}

}  // namespace torusreg
