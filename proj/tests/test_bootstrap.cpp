#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "torusreg/bootstrap.hpp"
#include "torusreg/distributions.hpp"
#include "torusreg/errors.hpp"

using namespace torusreg;

namespace {

Dataset noisy_dataset(const ModelParams& truth, std::size_t n, double kappa, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(rng.uniform(-2.5, 2.5));
  const AngularErrorSpec err{AngularErrorFamily::VonMises, Angle(0.0), kappa};
  const AngleSample eps = sample_von_mises(err, n, rng);
  AngleSample thetas;
  thetas.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    thetas.emplace_back(link_raw(xs[i], truth) + eps[i].value());
  }
  return Dataset(std::move(xs), std::move(thetas));
}

double arc_width(const IntervalResult& iv) {
  return wrap_radians(iv.upper.value() - iv.lower.value());
}

FitConfig small_config() {
  FitConfig config;
  config.n_starts = 3;
  return config;
}

}  // namespace

TEST_CASE("arc containment") {
  // Plain interval.
  CHECK(arc_contains(Angle(1.0), Angle(2.0), Angle(1.5)));
  CHECK(arc_contains(Angle(1.0), Angle(2.0), Angle(1.0)));
  CHECK(arc_contains(Angle(1.0), Angle(2.0), Angle(2.0)));
  CHECK_FALSE(arc_contains(Angle(1.0), Angle(2.0), Angle(2.5)));
  CHECK_FALSE(arc_contains(Angle(1.0), Angle(2.0), Angle(0.5)));

  // Interval straddling the cut at 0: the arc runs counterclockwise.
  CHECK(arc_contains(Angle(6.0), Angle(0.5), Angle(6.2)));
  CHECK(arc_contains(Angle(6.0), Angle(0.5), Angle(0.3)));
  CHECK(arc_contains(Angle(6.0), Angle(0.5), Angle(0.0)));
  CHECK_FALSE(arc_contains(Angle(6.0), Angle(0.5), Angle(3.0)));
  CHECK_FALSE(arc_contains(Angle(6.0), Angle(0.5), Angle(5.9)));

  // Degenerate point interval.
  CHECK(arc_contains(Angle(1.0), Angle(1.0), Angle(1.0)));
  CHECK_FALSE(arc_contains(Angle(1.0), Angle(1.0), Angle(1.1)));
}

TEST_CASE("bootstrap input validation") {
  const ModelParams truth{1.0, 0.5, 1.2};
  const Dataset data = testutil::noiseless_dataset(truth, 20);
  SeededRng rng(1);
  CHECK_THROWS_AS(bootstrap_ci(data, 0.0, 99, 0.95, small_config()), InvalidInputError);
  CHECK_THROWS_AS(bootstrap_ci(data, 0.0, 100, 0.0, small_config()), InvalidInputError);
  CHECK_THROWS_AS(bootstrap_ci(data, 0.0, 100, 1.0, small_config()), InvalidInputError);
  CHECK_THROWS_AS(
      bootstrap_ci(data, std::numeric_limits<double>::infinity(), 100, 0.95, small_config()),
      InvalidInputError);
  CHECK_THROWS_AS(bootstrap_pi(Dataset{}, 0.0, 100, 0.95, small_config(), rng), Error);
}

TEST_CASE("confidence interval on a noisy sample") {
  const ModelParams truth{1.0, 0.5, 1.2};
  const Dataset data = noisy_dataset(truth, 40, 8.0, 2024);
  FitConfig config = small_config();
  const double x_j = 0.8;

  const IntervalResult iv = bootstrap_ci(data, x_j, 100, 0.9, config);
  CHECK(iv.B == 100);
  CHECK(iv.level == 0.9);
  CHECK(iv.bootstrap_angles.size() == 100);

  // The center is the fitted conditional mean at x_j.
  const FitResult base = fit(data, config);
  CHECK(testutil::circ_dist(iv.center, link(x_j, base.params)) < 1e-12);

  // Sanity on the geometry of the arc.
  CHECK(arc_width(iv) > 0.0);
  CHECK(arc_width(iv) < std::numbers::pi);
  CHECK(arc_contains(iv, iv.center));

  // Deterministic: the same inputs give the same interval.
  const IntervalResult again = bootstrap_ci(data, x_j, 100, 0.9, config);
  CHECK(again.lower.value() == iv.lower.value());
  CHECK(again.upper.value() == iv.upper.value());
}

TEST_CASE("interval levels nest") {
  const ModelParams truth{1.0, 0.5, 1.2};
  const Dataset data = noisy_dataset(truth, 40, 8.0, 7);
  FitConfig config = small_config();
  const double x_j = -0.5;

  const IntervalResult narrow = bootstrap_ci(data, x_j, 150, 0.5, config);
  const IntervalResult mid = bootstrap_ci(data, x_j, 150, 0.9, config);
  const IntervalResult wide = bootstrap_ci(data, x_j, 150, 0.99, config);

  CHECK(arc_width(narrow) <= arc_width(mid) + 1e-12);
  CHECK(arc_width(mid) <= arc_width(wide) + 1e-12);
  CHECK(arc_contains(mid, narrow.lower));
  CHECK(arc_contains(mid, narrow.upper));
  CHECK(arc_contains(wide, mid.lower));
  CHECK(arc_contains(wide, mid.upper));
}

TEST_CASE("prediction intervals are at least as wide as confidence intervals") {
  const ModelParams truth{1.0, 0.5, 1.2};
  const Dataset data = noisy_dataset(truth, 40, 8.0, 99);
  FitConfig config = small_config();
  const double x_j = 0.3;

  const IntervalResult ci = bootstrap_ci(data, x_j, 150, 0.9, config);
  SeededRng rng(config.seed, 0x9e);
  const IntervalResult pi = bootstrap_pi(data, x_j, 150, 0.9, config, rng);
  CHECK(arc_width(pi) >= arc_width(ci));
  CHECK(pi.bootstrap_angles.size() == 150);

  // Prediction intervals are deterministic given the same extra-noise stream.
  SeededRng rng2(config.seed, 0x9e);
  const IntervalResult pi2 = bootstrap_pi(data, x_j, 150, 0.9, config, rng2);
  CHECK(pi2.lower.value() == pi.lower.value());
  CHECK(pi2.upper.value() == pi.upper.value());
}

TEST_CASE("noiseless data gives degenerate point intervals at the truth") {
  const ModelParams truth{1.0, 0.5, 1.2};
  const Dataset data = testutil::noiseless_dataset(truth, 40);
  FitConfig config = small_config();
  const double x_j = 1.7;

  const IntervalResult ci = bootstrap_ci(data, x_j, 100, 0.95, config);
  CHECK(arc_width(ci) < 1e-6);
  CHECK(testutil::circ_dist(ci.center, link(x_j, truth)) < 1e-6);
  CHECK(testutil::circ_dist(ci.lower, link(x_j, truth)) < 1e-6);

  SeededRng rng(config.seed, 0x9e);
  const IntervalResult pi = bootstrap_pi(data, x_j, 100, 0.95, config, rng);
  CHECK(arc_width(pi) < 1e-6);
  CHECK(testutil::circ_dist(pi.center, link(x_j, truth)) < 1e-6);
}
