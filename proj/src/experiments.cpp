#include "torusreg/experiments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "torusreg/bootstrap.hpp"
#include "torusreg/circular_stats.hpp"
#include "torusreg/parallel.hpp"

namespace torusreg {

namespace {

constexpr std::uint64_t sim_data_stream = 0x51AD;
constexpr std::uint64_t coverage_data_stream = 0xC0FE;

struct ReplicateEstimate {
  ModelParams params;
  bool failed = false;
};

// Draw one replicate's dataset from the generating model.
Dataset draw_dataset(const SimConfig& config, SeededRng& rng) {
  const std::vector<double> xs = sample_predictor(config.predictor, config.n, rng);
  const AngleSample eps = sample_angular_error(config.error, config.n, rng);
  AngleSample thetas;
  thetas.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    thetas.emplace_back(link_raw(xs[i], config.truth) + eps[i].value());
  }
  return Dataset(xs, std::move(thetas));
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

void SimConfig::validate() const {
  truth.validate();
  error.validate();
  fit.validate();
  if (n < 3) throw InvalidInputError("simulation sample size must be at least 3");
  if (replications < 1) throw InvalidInputError("simulation needs at least 1 replication");
}

SimSummary run_simulation(const SimConfig& config) {
  config.validate();

  std::vector<ReplicateEstimate> estimates(config.replications);
  parallel_for(config.replications, config.fit.jobs, [&](std::size_t r) {
    SeededRng rng(config.seed, mix64(sim_data_stream ^ mix64(r)));
    const Dataset data = draw_dataset(config, rng);
    FitConfig fit_config = config.fit;
    fit_config.seed = derive_seed(config.seed, sim_data_stream, r);
    if (config.start_at_truth) {
      fit_config.warm_starts = {config.truth};
      fit_config.n_starts = 0;
      fit_config.informed_starts = false;
      // Recenter the b0 box so the start is interior; the reported b0 is
      // wrapped back to [0, 2pi) by the fit.
      fit_config.b0_bounds = {config.truth.b0 - std::numbers::pi,
                              config.truth.b0 + std::numbers::pi};
    }
    try {
      estimates[r].params = fit(data, fit_config).params;
    } catch (const Error&) {
      estimates[r].failed = true;
    }
  });

  AngleSample b0s;
  std::vector<double> b1s;
  std::vector<double> b2s;
  for (const ReplicateEstimate& est : estimates) {
    if (est.failed) continue;
    b0s.emplace_back(est.params.b0);
    b1s.push_back(est.params.b1);
    b2s.push_back(est.params.b2);
  }
  const std::size_t completed = b1s.size();
  const std::size_t failed = config.replications - completed;
  if (static_cast<double>(failed) > 0.05 * static_cast<double>(config.replications)) {
    throw FitFailureError("more than 5% of simulation replicates failed to fit (" +
                          std::to_string(failed) + " of " +
                          std::to_string(config.replications) + ")");
  }

  const MeanResultant mr = circular_mean_and_resultant(b0s);
  SimSummary summary;
  summary.b0_circular_mean = mr.mean;
  summary.b0_circular_variance = 1.0 - mr.resultant_length;
  summary.b1_mean = mean_of(b1s);
  summary.b1_se = sd_of(b1s, summary.b1_mean);
  summary.b2_mean = mean_of(b2s);
  summary.b2_se = sd_of(b2s, summary.b2_mean);
  const double root_m = std::sqrt(static_cast<double>(completed));
  summary.b1_se_of_mean = summary.b1_se / root_m;
  summary.b2_se_of_mean = summary.b2_se / root_m;
  summary.replications_completed = completed;
  return summary;
}

double run_coverage(const SimConfig& config, double x_j, std::size_t B, double level,
                    std::size_t iterations, CoverageMode mode) {
  config.validate();
  if (iterations < 50) {
    throw InvalidInputError("coverage study needs at least 50 iterations");
  }
  // Reject bad interval arguments up front rather than letting every
  // iteration fail with the same error inside the loop.
  if (B < 100) {
    throw InvalidInputError("bootstrap requires B >= 100 (quantiles unstable below)");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInputError("interval level must lie in (0, 1)");
  }

  std::vector<int> hits(iterations, -1);  // -1 marks a failed iteration
  parallel_for(iterations, config.fit.jobs, [&](std::size_t it) {
    SeededRng rng(config.seed, mix64(coverage_data_stream ^ mix64(it)));
    const Dataset data = draw_dataset(config, rng);

    FitConfig fit_config = config.fit;
    fit_config.seed = derive_seed(config.seed, coverage_data_stream, it);
    fit_config.jobs = 1;  // parallelism stays at the iteration level

    try {
      if (mode == CoverageMode::ci) {
        const IntervalResult interval = bootstrap_ci(data, x_j, B, level, fit_config);
        const Angle target = link(x_j, config.truth);
        hits[it] = arc_contains(interval, target) ? 1 : 0;
      } else {
        SeededRng extra_rng = rng.substream(0x9e);
        const IntervalResult interval =
            bootstrap_pi(data, x_j, B, level, fit_config, extra_rng);
        const AngleSample eps = sample_angular_error(config.error, 1, rng);
        const Angle target = Angle(link_raw(x_j, config.truth) + eps[0].value());
        hits[it] = arc_contains(interval, target) ? 1 : 0;
      }
    } catch (const Error&) {
      hits[it] = -1;
    }
  });

  std::size_t completed = 0;
  std::size_t contained = 0;
  for (int h : hits) {
    if (h < 0) continue;
    ++completed;
    contained += static_cast<std::size_t>(h);
  }
  const std::size_t failed = iterations - completed;
  if (static_cast<double>(failed) > 0.05 * static_cast<double>(iterations)) {
    throw FitFailureError("more than 5% of coverage iterations failed (" +
                          std::to_string(failed) + " of " + std::to_string(iterations) + ")");
  }
  return static_cast<double>(contained) / static_cast<double>(completed);
}

TableId parse_table_id(const std::string& name) {
  if (name == "T1") return TableId::T1;
  if (name == "T2") return TableId::T2;
  if (name == "T3") return TableId::T3;
  if (name == "T4") return TableId::T4;
  throw InvalidInputError("unknown table id (expected T1..T4): " + name);
}

std::string table_id_name(TableId id) {
  switch (id) {
    case TableId::T1: return "T1";
    case TableId::T2: return "T2";
    case TableId::T3: return "T3";
    case TableId::T4: return "T4";
  }
  return "?";
}

std::vector<TableRow> reproduce_table(TableId id, double scale, std::uint64_t seed,
                                      const FitConfig& fit_config) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw InvalidInputError("table scale must lie in (0, 1]");
  }
  const auto replications = static_cast<std::size_t>(std::ceil(10000.0 * scale));

  const bool von_mises = (id == TableId::T1 || id == TableId::T2);
  const bool first_truth = (id == TableId::T1 || id == TableId::T3);
  const ModelParams truth = first_truth
                                ? ModelParams{0.0, 1.5, 0.5}
                                : ModelParams{std::numbers::pi / 6.0, -0.7, 2.4};
  const std::vector<double> concentrations =
      von_mises ? std::vector<double>{0.5, 1.0, 10.0} : std::vector<double>{0.3, 0.6, 0.8};
  const std::vector<std::size_t> sizes = {50, 100, 500};

  std::vector<TableRow> rows;
  std::uint64_t condition = 0;
  for (std::size_t n : sizes) {
    for (double conc : concentrations) {
      SimConfig config;
      config.truth = truth;
      config.predictor.family =
          von_mises ? PredictorFamily::StandardNormal : PredictorFamily::StandardCauchy;
      config.error.family =
          von_mises ? AngularErrorFamily::VonMises : AngularErrorFamily::WrappedCauchy;
      config.error.mu = Angle(0.0);
      config.error.concentration = conc;
      config.n = n;
      config.replications = replications;
      config.fit = fit_config;
      config.seed = derive_seed(seed, 0x7AB1E, condition++);

      TableRow row;
      row.n = n;
      row.concentration = conc;
      row.summary = run_simulation(config);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

SimConfig prose_scenario(ModelParams truth, AngularErrorFamily family, double concentration,
                         PredictorFamily predictor, std::uint64_t seed,
                         const FitConfig& fit_config) {
  SimConfig config;
  config.truth = truth;
  config.predictor.family = predictor;
  config.error.family = family;
  config.error.mu = Angle(0.0);
  config.error.concentration = concentration;
  config.n = 500;
  config.replications = 500;
  config.fit = fit_config;
  config.seed = seed;
  return config;
}

}  // namespace

SimConfig prose_scenario_von_mises(std::uint64_t seed, const FitConfig& fit_config) {
  return prose_scenario(ModelParams{0.0, -1.1, -1.8}, AngularErrorFamily::VonMises, 5.0,
                        PredictorFamily::StandardNormal, seed, fit_config);
}

SimConfig prose_scenario_wrapped_cauchy(std::uint64_t seed, const FitConfig& fit_config) {
  return prose_scenario(ModelParams{2.0 * std::numbers::pi / 3.0, -0.6, -0.8},
                        AngularErrorFamily::WrappedCauchy, 0.5,
                        PredictorFamily::StandardCauchy, seed, fit_config);
}

std::string table_rows_csv(const std::vector<TableRow>& rows) {
  std::ostringstream out;
  out << "n,concentration,b0_circular_mean,b0_circular_variance,"
         "b1_mean,b1_sd_across_replicates,b2_mean,b2_sd_across_replicates,"
         "b1_se_of_mean,b2_se_of_mean,replications_completed\n";
  out.precision(10);
  for (const TableRow& row : rows) {
    out << row.n << ',' << row.concentration << ',' << row.summary.b0_circular_mean.value()
        << ',' << row.summary.b0_circular_variance << ',' << row.summary.b1_mean << ','
        << row.summary.b1_se << ',' << row.summary.b2_mean << ',' << row.summary.b2_se << ','
        << row.summary.b1_se_of_mean << ',' << row.summary.b2_se_of_mean << ','
        << row.summary.replications_completed << '\n';
  }
  return out.str();
}

}  // namespace torusreg
