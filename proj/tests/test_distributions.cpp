#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"
#include "torusreg/circular_stats.hpp"
#include "torusreg/distributions.hpp"
#include "torusreg/errors.hpp"

using namespace torusreg;

TEST_CASE("error-spec validation") {
  AngularErrorSpec vm{AngularErrorFamily::VonMises, Angle(0.0), 0.0};
  CHECK_THROWS_AS(vm.validate(), InvalidInputError);
  vm.concentration = -1.0;
  CHECK_THROWS_AS(vm.validate(), InvalidInputError);
  vm.concentration = 2.0;
  CHECK_NOTHROW(vm.validate());

  AngularErrorSpec wc{AngularErrorFamily::WrappedCauchy, Angle(0.0), 1.0};
  CHECK_THROWS_AS(wc.validate(), InvalidInputError);
  wc.concentration = 0.0;
  CHECK_THROWS_AS(wc.validate(), InvalidInputError);
  wc.concentration = 0.5;
  CHECK_NOTHROW(wc.validate());

  SeededRng rng(1);
  CHECK_THROWS_AS(sample_von_mises(wc, 10, rng), InvalidInputError);
  CHECK_THROWS_AS(sample_wrapped_cauchy(vm, 10, rng), InvalidInputError);
  CHECK_THROWS_AS(sample_von_mises(vm, 0, rng), InvalidInputError);
}

TEST_CASE("von Mises sample moments match the theoretical values") {
  // E[resultant length] = I1(kappa)/I0(kappa); reference value for kappa = 2.
  const AngularErrorSpec spec{AngularErrorFamily::VonMises, Angle(0.7), 2.0};
  SeededRng rng(42);
  const AngleSample s = sample_von_mises(spec, 100000, rng);
  const MeanResultant mr = circular_mean_and_resultant(s);
  CHECK(testutil::circ_dist(mr.mean.value(), 0.7) < 0.01);
  CHECK(mr.resultant_length == doctest::Approx(0.6977746579640082).epsilon(0.015));
}

TEST_CASE("high-concentration von Mises draws hug the mean") {
  const AngularErrorSpec spec{AngularErrorFamily::VonMises, Angle(3.0), 500.0};
  SeededRng rng(42);
  const AngleSample s = sample_von_mises(spec, 5000, rng);
  for (Angle a : s) CHECK(testutil::circ_dist(a.value(), 3.0) < 0.3);
  CHECK(resultant_length(s) > 0.995);
}

TEST_CASE("wrapped Cauchy resultant equals the concentration parameter") {
  const AngularErrorSpec spec{AngularErrorFamily::WrappedCauchy, Angle(2.0), 0.6};
  SeededRng rng(42);
  const AngleSample s = sample_wrapped_cauchy(spec, 100000, rng);
  const MeanResultant mr = circular_mean_and_resultant(s);
  CHECK(testutil::circ_dist(mr.mean.value(), 2.0) < 0.01);
  CHECK(mr.resultant_length == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("family dispatch matches the direct samplers") {
  const AngularErrorSpec vm{AngularErrorFamily::VonMises, Angle(0.3), 4.0};
  SeededRng a(9), b(9);
  const AngleSample via_dispatch = sample_angular_error(vm, 50, a);
  const AngleSample direct = sample_von_mises(vm, 50, b);
  REQUIRE(via_dispatch.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(via_dispatch[i].value() == direct[i].value());
  }

  const AngularErrorSpec wc{AngularErrorFamily::WrappedCauchy, Angle(0.3), 0.4};
  SeededRng c(9), d(9);
  const AngleSample via_dispatch_wc = sample_angular_error(wc, 50, c);
  const AngleSample direct_wc = sample_wrapped_cauchy(wc, 50, d);
  for (std::size_t i = 0; i < direct_wc.size(); ++i) {
    CHECK(via_dispatch_wc[i].value() == direct_wc[i].value());
  }
}

TEST_CASE("samplers are seed-deterministic") {
  const AngularErrorSpec spec{AngularErrorFamily::VonMises, Angle(1.0), 3.0};
  SeededRng a(777), b(777), c(778);
  const AngleSample s1 = sample_von_mises(spec, 64, a);
  const AngleSample s2 = sample_von_mises(spec, 64, b);
  const AngleSample s3 = sample_von_mises(spec, 64, c);
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < 64; ++i) {
    all_equal &= (s1[i].value() == s2[i].value());
    any_diff |= (s1[i].value() != s3[i].value());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("predictor samplers") {
  SeededRng rng(42);
  const std::vector<double> normal =
      sample_predictor(PredictorSpec{PredictorFamily::StandardNormal}, 100000, rng);
  double mean = 0.0, var = 0.0;
  for (double v : normal) mean += v;
  mean /= static_cast<double>(normal.size());
  for (double v : normal) var += (v - mean) * (v - mean);
  var /= static_cast<double>(normal.size() - 1);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(0.02));

  SeededRng rng2(42);
  std::vector<double> cauchy =
      sample_predictor(PredictorSpec{PredictorFamily::StandardCauchy}, 100001, rng2);
  std::sort(cauchy.begin(), cauchy.end());
  const std::size_t n = cauchy.size();
  CHECK(std::abs(cauchy[n / 2]) < 0.03);
  // Standard Cauchy quartiles sit at -1 and +1.
  CHECK(cauchy[n / 4] == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(cauchy[3 * n / 4] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("von Mises CDF reference values") {
  // Independent numeric-quadrature references.
  CHECK(von_mises_cdf(Angle(std::numbers::pi), Angle(std::numbers::pi), 2.0) ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(von_mises_cdf(Angle(1.0), Angle(0.5), 3.0) ==
        doctest::Approx(0.5823149291443609).epsilon(1e-9));
  CHECK(von_mises_cdf(Angle(2.0), Angle(5.8), 0.7) ==
        doctest::Approx(0.3175273046962487).epsilon(1e-9));
  CHECK(von_mises_cdf(Angle(0.0), Angle(1.0), 2.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("von Mises CDF is a proper monotone distribution function") {
  const Angle mu(1.0);
  const double kappa = 4.0;
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double theta = two_pi * i / 100.0 * (i == 100 ? 0.999999999 : 1.0);
    const double f = von_mises_cdf(Angle(theta), mu, kappa);
    CHECK(f >= prev - 1e-12);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    prev = f;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero concentration reduces the CDF to the uniform one") {
  for (double theta : {0.5, 1.5, 3.0, 5.5}) {
    CHECK(von_mises_cdf(Angle(theta), Angle(2.0), 0.0) ==
          doctest::Approx(theta / two_pi).epsilon(1e-12));
  }
  CHECK_THROWS_AS(von_mises_cdf(Angle(1.0), Angle(0.0), -0.5), InvalidInputError);
}

TEST_CASE("concentration recovery from the resultant length") {
  CHECK(kappa_from_resultant(0.0) == 0.0);
  CHECK(kappa_from_resultant(1.0 - 1e-15) <= 1e4);
  CHECK(kappa_from_resultant(0.999999999) == doctest::Approx(1e4).epsilon(1e-6));
  CHECK_THROWS_AS(kappa_from_resultant(-0.1), InvalidInputError);
  CHECK_THROWS_AS(kappa_from_resultant(1.1), InvalidInputError);

  // Round trip through the theoretical resultant I1/I0 at representative
  // concentrations; the three-branch approximation is good to a few percent.
  const std::pair<double, double> cases[] = {
      {0.5, 0.24249961258080202}, {1.0, 0.4463899658965346},
      {2.0, 0.6977746579640082},  {10.0, 0.9485998259548459}};
  for (const auto& [kappa, rbar] : cases) {
    CHECK(kappa_from_resultant(rbar) == doctest::Approx(kappa).epsilon(0.03));
  }
}
