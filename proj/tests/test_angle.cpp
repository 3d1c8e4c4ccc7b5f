#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "torusreg/angle.hpp"
#include "torusreg/errors.hpp"
#include "torusreg/rng.hpp"

using namespace torusreg;

TEST_CASE("wrap maps reals onto [0, 2pi)") {
  CHECK(wrap_radians(7.5) == doctest::Approx(1.2168146928204138).epsilon(1e-15));
  CHECK(wrap_radians(-0.5) == doctest::Approx(5.783185307179586).epsilon(1e-15));
  CHECK(wrap_radians(0.0) == 0.0);
  CHECK(wrap_radians(two_pi) == 0.0);
  CHECK(wrap_radians(-two_pi) == 0.0);
  CHECK(wrap_radians(std::numbers::pi) == std::numbers::pi);
  // A tiny negative value must not round up to the excluded endpoint.
  CHECK(wrap_radians(-1e-18) < two_pi);
}

TEST_CASE("wrap stays in range for arbitrary magnitudes") {
  SeededRng rng(123);
  for (int i = 0; i < 2000; ++i) {
    const double raw = rng.uniform(-1e6, 1e6);
    const double w = wrap_radians(raw);
    CHECK(w >= 0.0);
    CHECK(w < two_pi);
    // Same direction as the input: difference is a multiple of 2pi.
    const double k = std::round((raw - w) / two_pi);
    CHECK(std::abs(raw - w - k * two_pi) < 1e-7);
  }
}

TEST_CASE("Angle rejects non-finite input") {
  CHECK_THROWS_AS(Angle(std::numeric_limits<double>::infinity()), InvalidInputError);
  CHECK_THROWS_AS(Angle(-std::numeric_limits<double>::infinity()), InvalidInputError);
  CHECK_THROWS_AS(Angle(std::numeric_limits<double>::quiet_NaN()), InvalidInputError);
}

TEST_CASE("Angle normalizes equivalent representations") {
  SeededRng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double theta = rng.uniform(0.0, two_pi);
    const int k = static_cast<int>(rng.uniform(-5.0, 5.0));
    CHECK(testutil::circ_dist(Angle(theta + k * two_pi), Angle(theta)) < 1e-9);
  }
}

TEST_CASE("angular residual inverts the prediction") {
  CHECK(angular_residual(Angle(1.0), Angle(6.0)).value() ==
        doctest::Approx(1.2831853071795862).epsilon(1e-15));

  SeededRng rng(99);
  for (int i = 0; i < 500; ++i) {
    const Angle observed(rng.uniform(0.0, two_pi));
    const Angle predicted(rng.uniform(0.0, two_pi));
    const Angle resid = angular_residual(observed, predicted);
    CHECK(testutil::circ_dist(Angle(predicted.value() + resid.value()), observed) < 1e-12);
  }
}

TEST_CASE("angle/value conversions round-trip") {
  const std::vector<double> raw{0.25, 3.0, 6.28, 9.0, -2.0};
  const AngleSample angles = to_angles(raw);
  REQUIRE(angles.size() == raw.size());
  const std::vector<double> values = to_values(angles);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(values[i] == wrap_radians(raw[i]));
  }
}
