#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "test_util.hpp"
#include "torusreg/experiments.hpp"

using namespace torusreg;

namespace {

SimConfig base_config() {
  SimConfig config;
  config.truth = ModelParams{0.0, 1.5, 0.5};
  config.predictor = PredictorSpec{PredictorFamily::StandardNormal};
  config.error = AngularErrorSpec{AngularErrorFamily::VonMises, Angle(0.0), 1.0};
  config.n = 100;
  config.replications = 100;
  config.seed = 42;
  config.fit.n_starts = 8;
  return config;
}

}  // namespace

TEST_CASE("simulation config validation") {
  SimConfig config = base_config();
  CHECK_NOTHROW(config.validate());
  config.n = 2;
  CHECK_THROWS_AS(config.validate(), InvalidInputError);
  config = base_config();
  config.replications = 0;
  CHECK_THROWS_AS(config.validate(), InvalidInputError);
  config = base_config();
  config.error.concentration = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidInputError);
  config = base_config();
  config.truth.b2 = 0.0;
  CHECK_THROWS_AS(config.validate(), DegenerateParameterError);
}

TEST_CASE("near-deterministic noise recovers the generating parameters") {
  SimConfig config = base_config();
  config.error.concentration = 1e4;
  config.n = 200;
  config.replications = 20;
  const SimSummary summary = run_simulation(config);
  CHECK(summary.replications_completed == 20);
  CHECK(testutil::circ_dist(summary.b0_circular_mean.value(), config.truth.b0) < 5e-3);
  CHECK(std::abs(summary.b1_mean - config.truth.b1) < 5e-3);
  CHECK(std::abs(summary.b2_mean - config.truth.b2) < 5e-3);
  CHECK(summary.b0_circular_variance >= 0.0);
  CHECK(summary.b0_circular_variance < 1e-4);
  CHECK(summary.b1_se >= 0.0);
  CHECK(summary.b1_se_of_mean == doctest::Approx(summary.b1_se / std::sqrt(20.0)).epsilon(1e-12));
}

TEST_CASE("replicate aggregation is circular in the intercept") {
  // With the truth just past 0, wrapped estimates land on both sides of the
  // cut; a linear average would sit near pi, the circular one near 0.
  SimConfig config = base_config();
  config.truth.b0 = 0.02;
  config.error.concentration = 20.0;
  config.replications = 60;
  const SimSummary summary = run_simulation(config);
  CHECK(testutil::circ_dist(summary.b0_circular_mean.value(), 0.02) < 0.1);
  CHECK(summary.b0_circular_variance < 0.05);
}

TEST_CASE("simulation summaries are deterministic and thread-count invariant") {
  SimConfig config = base_config();
  config.replications = 30;
  const SimSummary a = run_simulation(config);
  const SimSummary b = run_simulation(config);
  CHECK(a.b1_mean == b.b1_mean);
  CHECK(a.b2_mean == b.b2_mean);
  CHECK(a.b0_circular_mean.value() == b.b0_circular_mean.value());

  SimConfig threaded = config;
  threaded.fit.jobs = 2;
  const SimSummary c = run_simulation(threaded);
  CHECK(c.b1_mean == a.b1_mean);
  CHECK(c.b2_mean == a.b2_mean);
  CHECK(c.b0_circular_mean.value() == a.b0_circular_mean.value());

  SimConfig reseeded = config;
  reseeded.seed = 43;
  CHECK(run_simulation(reseeded).b1_mean != a.b1_mean);
}

TEST_CASE("estimates tighten as the sample grows") {
  const double truth_b1 = 1.5;
  double prev_dev = 0.0, prev_se = 0.0;
  bool first = true;
  for (std::size_t n : {50u, 100u, 500u}) {
    SimConfig config = base_config();
    config.n = n;
    config.replications = 150;
    const SimSummary summary = run_simulation(config);
    const double dev = std::abs(summary.b1_mean - truth_b1);
    if (!first) {
      // Tolerate Monte Carlo noise: allow three combined standard errors.
      CHECK(dev <= prev_dev + 3.0 * (prev_se + summary.b1_se_of_mean));
    }
    prev_dev = dev;
    prev_se = summary.b1_se_of_mean;
    first = false;
  }
}

TEST_CASE("the full multistart protocol is available per replicate") {
  SimConfig config = base_config();
  config.error.concentration = 1e4;
  config.n = 100;
  config.replications = 5;
  config.start_at_truth = false;
  config.fit.n_starts = 12;
  const SimSummary summary = run_simulation(config);
  CHECK(summary.replications_completed == 5);
  CHECK(std::abs(summary.b1_mean - config.truth.b1) < 5e-3);
  CHECK(std::abs(summary.b2_mean - config.truth.b2) < 5e-3);
}

TEST_CASE("coverage study preconditions") {
  SimConfig config = base_config();
  CHECK_THROWS_AS(run_coverage(config, 1.0, 200, 0.95, 10, CoverageMode::ci), InvalidInputError);
  CHECK_THROWS_AS(run_coverage(config, 1.0, 99, 0.95, 50, CoverageMode::ci), InvalidInputError);
  CHECK_THROWS_AS(run_coverage(config, 1.0, 200, 1.5, 50, CoverageMode::ci), InvalidInputError);
}

TEST_CASE("coverage smoke run stays in a sane band and reproduces") {
  SimConfig config = base_config();
  config.error.concentration = 5.0;
  config.n = 50;
  config.fit.n_starts = 2;
  const double cov = run_coverage(config, 1.0, 100, 0.95, 50, CoverageMode::ci);
  CHECK(cov >= 0.5);
  CHECK(cov <= 1.0);
  CHECK(run_coverage(config, 1.0, 100, 0.95, 50, CoverageMode::ci) == cov);
}

TEST_CASE("table identifiers") {
  CHECK(parse_table_id("T1") == TableId::T1);
  CHECK(parse_table_id("T4") == TableId::T4);
  CHECK(table_id_name(TableId::T2) == "T2");
  CHECK(table_id_name(parse_table_id("T3")) == "T3");
  CHECK_THROWS_AS(parse_table_id("T5"), InvalidInputError);
  CHECK_THROWS_AS(parse_table_id(""), InvalidInputError);
}

TEST_CASE("table reproduction scale is validated") {
  CHECK_THROWS_AS(reproduce_table(TableId::T1, 0.0, 42), InvalidInputError);
  CHECK_THROWS_AS(reproduce_table(TableId::T1, 1.5, 42), InvalidInputError);
}

TEST_CASE("a miniature table run has the reference layout") {
  FitConfig fit_config;
  fit_config.n_starts = 4;
  const auto rows = reproduce_table(TableId::T1, 0.0005, 42, fit_config);
  REQUIRE(rows.size() == 9);  // 3 sizes x 3 concentrations
  std::size_t idx = 0;
  for (std::size_t n : {50u, 100u, 500u}) {
    for (double kappa : {0.5, 1.0, 10.0}) {
      CHECK(rows[idx].n == n);
      CHECK(rows[idx].concentration == kappa);
      CHECK(rows[idx].summary.replications_completed == 5);  // ceil(10000 * 0.0005)
      ++idx;
    }
  }

  const std::string csv = table_rows_csv(rows);
  CHECK(csv.find("n,concentration,b0_circular_mean,b0_circular_variance,b1_mean,"
                 "b1_sd_across_replicates,b2_mean,b2_sd_across_replicates,"
                 "b1_se_of_mean,b2_se_of_mean,replications_completed") == 0);
  // Header plus one line per row.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("prose scenario configurations carry the quoted designs") {
  const SimConfig vm = prose_scenario_von_mises(42);
  CHECK(vm.truth.b0 == 0.0);
  CHECK(vm.truth.b1 == -1.1);
  CHECK(vm.truth.b2 == -1.8);
  CHECK(vm.error.family == AngularErrorFamily::VonMises);
  CHECK(vm.error.concentration == 5.0);
  CHECK(vm.n == 500);

  const SimConfig wc = prose_scenario_wrapped_cauchy(42);
  CHECK(wc.truth.b0 == doctest::Approx(2.0 * std::numbers::pi / 3.0).epsilon(1e-15));
  CHECK(wc.truth.b1 == -0.6);
  CHECK(wc.truth.b2 == -0.8);
  CHECK(wc.error.family == AngularErrorFamily::WrappedCauchy);
  CHECK(wc.error.concentration == 0.5);
  CHECK(wc.predictor.family == PredictorFamily::StandardCauchy);
}
