#include "torusreg/bootstrap.hpp"

#include <cmath>
#include <string>

#include "torusreg/circular_stats.hpp"
#include "torusreg/parallel.hpp"

namespace torusreg {

namespace {

constexpr std::uint64_t bootstrap_stream = 0xb007;

std::size_t resample_index(SeededRng& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
  return std::min(i, n - 1);
}

struct ReplicateOutcome {
  double angle = 0.0;
  bool failed = false;
  std::string message;
};

// Shared machinery for CI and PI. In PI mode extra_indices holds one
// pre-drawn residual index per replicate whose residual is added to the
// replicate prediction before wrapping; in CI mode it is empty.
IntervalResult bootstrap_impl(const Dataset& data, double x_j, std::size_t B, double level,
                              const FitConfig& config,
                              const std::vector<std::size_t>& extra_indices) {
  if (B < 100) {
    throw InvalidInputError("bootstrap requires B >= 100 (quantiles unstable below)");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInputError("interval level must lie in (0, 1)");
  }
  if (!std::isfinite(x_j)) {
    throw InvalidInputError("prediction point must be finite");
  }

  const FitResult base = fit(data, config);
  const std::size_t n = data.size();

  // Fitted responses are the anchor for every resampled replicate.
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitted[i] = link_raw(data.xs()[i], base.params);
  }
  const std::vector<double> residuals = to_values(base.residuals);

  FitConfig refit_config = config;
  refit_config.warm_starts = {base.params};
  refit_config.n_starts = config.n_starts > 1 ? config.n_starts - 1 : 1;

  std::vector<ReplicateOutcome> outcomes(B);
  parallel_for(B, config.jobs, [&](std::size_t b) {
    SeededRng rep_rng(config.seed, mix64(bootstrap_stream ^ mix64(b)));
    std::vector<double> xs = data.xs();
    AngleSample ystar;
    ystar.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = residuals[resample_index(rep_rng, n)];
      ystar.emplace_back(fitted[i] + e);
    }
    try {
      const FitResult refit = fit(Dataset(std::move(xs), std::move(ystar)), refit_config);
      double value = link_raw(x_j, refit.params);
      if (!extra_indices.empty()) {
        value = wrap_radians(value + residuals[extra_indices[b]]);
      }
      outcomes[b].angle = value;
    } catch (const Error& e) {
      outcomes[b].failed = true;
      outcomes[b].message = e.what();
    }
  });

  AngleSample replicate_angles;
  replicate_angles.reserve(B);
  for (std::size_t b = 0; b < B; ++b) {
    if (outcomes[b].failed) {
      throw FitFailureError("bootstrap replicate " + std::to_string(b) +
                            " failed to refit: " + outcomes[b].message);
    }
    replicate_angles.emplace_back(outcomes[b].angle);
  }

  const double tail = (1.0 - level) / 2.0;
  IntervalResult interval;
  interval.lower = circular_quantile(replicate_angles, tail);
  interval.upper = circular_quantile(replicate_angles, 1.0 - tail);
  interval.center = link(x_j, base.params);
  interval.level = level;
  interval.B = B;
  interval.bootstrap_angles = std::move(replicate_angles);
  return interval;
}

}  // namespace

bool arc_contains(Angle lower, Angle upper, Angle a) {
  const double width = wrap_radians(upper.value() - lower.value());
  const double offset = wrap_radians(a.value() - lower.value());
  return offset <= width + 1e-12;
}

IntervalResult bootstrap_ci(const Dataset& data, double x_j, std::size_t B, double level,
                            const FitConfig& config) {
  return bootstrap_impl(data, x_j, B, level, config, {});
}

IntervalResult bootstrap_pi(const Dataset& data, double x_j, std::size_t B, double level,
                            const FitConfig& config, SeededRng& rng) {
  if (B < 100) {
    throw InvalidInputError("bootstrap requires B >= 100 (quantiles unstable below)");
  }
  if (data.size() == 0) throw EmptySampleError("bootstrap of an empty dataset");
  // One extra residual index per replicate, drawn sequentially from the
  // caller's rng so the parallel section stays deterministic.
  std::vector<std::size_t> extra_indices(B);
  for (std::size_t b = 0; b < B; ++b) extra_indices[b] = resample_index(rng, data.size());
  return bootstrap_impl(data, x_j, B, level, config, extra_indices);
}

}  // namespace torusreg
