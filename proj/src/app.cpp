#include "torusreg/app.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torusreg/bootstrap.hpp"
#include "torusreg/diagnostics.hpp"
#include "torusreg/errors.hpp"
#include "torusreg/experiments.hpp"
#include "torusreg/fit.hpp"
#include "torusreg/ingest.hpp"
#include "torusreg/mobius.hpp"

namespace torusreg::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Flag misuse distinct from data problems: exit 1 instead of 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_strict(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw UsageError("not a number: '" + text + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) parts.push_back(token);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

TorusGeometry parse_geometry(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--geometry expects R,r");
  TorusGeometry geom{parse_double_strict(parts[0]), parse_double_strict(parts[1])};
  try {
    geom.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return geom;
}

ModelParams parse_params(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 3) throw UsageError("--params/--truth expects b0,b1,b2");
  ModelParams p{parse_double_strict(parts[0]), parse_double_strict(parts[1]),
                parse_double_strict(parts[2])};
  try {
    p.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::uint64_t fnv1a64(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read input file: " + path.string());
  std::uint64_t hash = 1469598103934665603ull;
  char chunk[1 << 14];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 1099511628211ull;
    }
    if (!in) break;
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path.string());
  out << content;
  out.flush();
  if (!out) throw DataError("failed writing output file: " + path.string());
}

struct GlobalOpts {
  std::uint64_t seed = 42;
  std::string geometry_text = "2,1";
  std::string out_dir = ".";
  std::size_t jobs = 1;

  TorusGeometry geometry() const { return parse_geometry(geometry_text); }
};

// Everything a command run produced, gathered for the manifest.
struct CommandIO {
  ordered_json config = ordered_json::object();
  std::vector<std::pair<std::string, std::uint64_t>> inputs;
  std::vector<std::string> outputs;
};

fs::path prepare_out_dir(const GlobalOpts& globals) {
  fs::path dir(globals.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory: " + dir.string());
  return dir;
}

void note_input(CommandIO& io, const fs::path& path) {
  io.inputs.emplace_back(path.string(), fnv1a64(path));
}

void emit(CommandIO& io, const fs::path& dir, const std::string& name,
          const std::string& content) {
  write_file(dir / name, content);
  io.outputs.push_back(name);
}

void write_manifest(const std::string& command, const std::vector<std::string>& argv,
                    const GlobalOpts& globals, const CommandIO& io, const fs::path& dir,
                    double wall_ms) {
  ordered_json manifest;
  manifest["command"] = command;
  manifest["argv"] = argv;
  manifest["seed"] = globals.seed;
  TorusGeometry geom = globals.geometry();
  manifest["geometry"] = {{"R", geom.R}, {"r", geom.r}};
  manifest["jobs"] = globals.jobs;
  manifest["out_dir"] = globals.out_dir;
  manifest["config"] = io.config;
  auto inputs = ordered_json::array();
  for (const auto& [path, digest] : io.inputs) {
    inputs.push_back({{"path", path}, {"fnv1a64", hex64(digest)}});
  }
  manifest["inputs"] = inputs;
  manifest["outputs"] = io.outputs;
  manifest["wall_ms"] = wall_ms;
  write_file(dir / (command + "_manifest.json"), manifest.dump(2) + "\n");
}

Response parse_response(const std::string& name) {
  if (name == "theta_high") return Response::theta_high;
  if (name == "theta_low") return Response::theta_low;
  throw UsageError("--response must be theta_high or theta_low");
}

// Model commands accept either the ingest output (daily aggregate CSV,
// recognized by its header) or a plain two-column x,theta CSV.
Dataset load_dataset(const fs::path& path, Response response) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read input file: " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw DataError("empty input file: " + path.string());
  if (header.find("theta_high") != std::string::npos) {
    in.seekg(0);
    auto records = read_daily_csv(in);
    return dataset_from_daily(records, response);
  }
  std::vector<double> xs;
  AngleSample thetas;
  std::string line;
  std::size_t line_no = 1;
  auto columns = split(header, ',');
  if (columns.size() < 2) {
    throw DataError("expected a CSV with at least two columns (x,theta): " + path.string());
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() < 2) {
      throw DataError("line " + std::to_string(line_no) + ": expected x,theta");
    }
    double x = 0.0;
    double theta = 0.0;
    try {
      x = parse_double_strict(fields[0]);
      theta = parse_double_strict(fields[1]);
    } catch (const UsageError&) {
      throw DataError("line " + std::to_string(line_no) + ": unparseable number");
    }
    xs.push_back(x);
    thetas.push_back(Angle(theta));
  }
  return Dataset(std::move(xs), std::move(thetas));
}

std::string dataset_csv(const Dataset& data) {
  std::string out = "x,theta\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += g17(data.xs()[i]) + "," + g17(data.thetas()[i].value()) + "\n";
  }
  return out;
}

ordered_json params_json(const ModelParams& p) {
  return {{"b0", p.b0}, {"b1", p.b1}, {"b2", p.b2}};
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOpts {
  std::string input;
  std::string schema_text;
  std::string start_text;
  std::string end_text;
};

SchemaMap parse_schema_flag(const std::string& text) {
  static const std::array<const char*, 9> known = {
      "unix", "date", "symbol", "open", "high", "low", "close", "volume_asset", "volume_base"};
  SchemaMap schema;
  if (text.empty()) return schema;
  for (const auto& pair : split(text, ',')) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= pair.size()) {
      throw UsageError("--schema entries must look like key=column: '" + pair + "'");
    }
    std::string key = pair.substr(0, eq);
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("unknown --schema key '" + key + "'");
    }
    schema[key] = pair.substr(eq + 1);
  }
  return schema;
}

void cmd_ingest(const IngestOpts& opts, const GlobalOpts& globals, CommandIO& io,
                const fs::path& dir) {
  SchemaMap schema = parse_schema_flag(opts.schema_text);
  std::ifstream in(opts.input, std::ios::binary);
  if (!in) throw DataError("cannot read input file: " + opts.input);
  note_input(io, opts.input);

  ParseResult parsed = parse_minute_csv(in, schema);
  auto records = daily_aggregate(parsed.bars);
  if (!opts.start_text.empty() || !opts.end_text.empty()) {
    if (records.empty()) throw DataError("no complete rows to select a date range from");
    std::chrono::year_month_day start = records.front().date;
    std::chrono::year_month_day end = records.back().date;
    try {
      if (!opts.start_text.empty()) start = parse_date(opts.start_text);
      if (!opts.end_text.empty()) end = parse_date(opts.end_text);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    records = select_range(records, start, end);
  }

  std::ostringstream daily;
  write_daily_csv(records, daily);
  emit(io, dir, "daily.csv", daily.str());

  std::string rejects = "row_number,reason\n";
  for (const auto& reject : parsed.rejects) {
    rejects += std::to_string(reject.row_number) + "," + reject.reason + "\n";
  }
  emit(io, dir, "rejects.csv", rejects);

  std::size_t excluded = 0;
  for (const auto& record : records) {
    if (!record.excluded_reason.empty()) ++excluded;
  }
  io.config = {{"input", opts.input},
               {"schema", opts.schema_text},
               {"start", opts.start_text},
               {"end", opts.end_text},
               {"bars", parsed.bars.size()},
               {"rejected_rows", parsed.rejects.size()},
               {"days", records.size()},
               {"excluded_days", excluded}};
  (void)globals;
  std::printf("ingest: %zu bars (%zu rejected), %zu days (%zu excluded) -> %s\n",
              parsed.bars.size(), parsed.rejects.size(), records.size(), excluded,
              (dir / "daily.csv").string().c_str());
}

// ---------------------------------------------------------------------------
// fit

struct FitOpts {
  std::string input;
  std::string response = "theta_high";
  std::size_t starts = 50;
};

std::string curve_csv(const Dataset& data, const ModelParams& params) {
  auto [lo_it, hi_it] = std::minmax_element(data.xs().begin(), data.xs().end());
  double lo = *lo_it;
  double hi = *hi_it;
  constexpr std::size_t grid = 512;
  std::string out = "x,predicted_theta\n";
  for (std::size_t i = 0; i < grid; ++i) {
    double x = grid == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (grid - 1);
    out += g17(x) + "," + g17(link_raw(x, params)) + "\n";
  }
  return out;
}

std::string predictions_csv(const Dataset& data, const FitResult& result) {
  std::string out = "x,theta,predicted_theta,residual\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    double pred = link_raw(data.xs()[i], result.params);
    out += g17(data.xs()[i]) + "," + g17(data.thetas()[i].value()) + "," + g17(pred) + "," +
           g17(result.residuals[i].value()) + "\n";
  }
  return out;
}

void cmd_fit(const FitOpts& opts, const GlobalOpts& globals, CommandIO& io,
             const fs::path& dir) {
  Response response = parse_response(opts.response);
  TorusGeometry geom = globals.geometry();
  note_input(io, opts.input);
  Dataset data = load_dataset(opts.input, response);

  FitConfig config;
  config.geometry = geom;
  config.n_starts = opts.starts;
  config.seed = globals.seed;
  config.jobs = globals.jobs;
  FitResult result = fit(data, config);

  ordered_json fit_json;
  fit_json["params"] = params_json(result.params);
  fit_json["loss"] = result.loss;
  fit_json["converged"] = result.converged;
  fit_json["iterations"] = result.iterations;
  fit_json["seed"] = result.seed;
  fit_json["n_starts"] = opts.starts;
  fit_json["per_start_losses"] = result.per_start_losses;
  emit(io, dir, "fit.json", fit_json.dump(2) + "\n");
  // Prefixed so the echo can never overwrite an input file named data.csv.
  emit(io, dir, "fit_data.csv", dataset_csv(data));
  emit(io, dir, "predictions.csv", predictions_csv(data, result));
  emit(io, dir, "curve.csv", curve_csv(data, result.params));

  io.config = {{"input", opts.input},
               {"response", opts.response},
               {"starts", opts.starts},
               {"n", data.size()}};
  std::printf("fit: n=%zu loss=%s params=(%s, %s, %s)\n", data.size(), g17(result.loss).c_str(),
              g17(result.params.b0).c_str(), g17(result.params.b1).c_str(),
              g17(result.params.b2).c_str());
}

// ---------------------------------------------------------------------------
// predict

struct PredictOpts {
  std::string params_text;
  std::string x_text;
  std::string grid_text;
  std::string input;
  std::string response = "theta_high";
};

void cmd_predict(const PredictOpts& opts, const GlobalOpts& globals, CommandIO& io,
                 const fs::path& dir) {
  ModelParams params = parse_params(opts.params_text);
  int sources = (!opts.x_text.empty()) + (!opts.grid_text.empty()) + (!opts.input.empty());
  if (sources != 1) {
    throw UsageError("predict needs exactly one of --x, --grid, --input");
  }
  std::vector<double> xs;
  if (!opts.x_text.empty()) {
    xs.push_back(parse_double_strict(opts.x_text));
  } else if (!opts.grid_text.empty()) {
    auto parts = split(opts.grid_text, ',');
    if (parts.size() != 3) throw UsageError("--grid expects lo,hi,count");
    double lo = parse_double_strict(parts[0]);
    double hi = parse_double_strict(parts[1]);
    double count_raw = parse_double_strict(parts[2]);
    auto count = static_cast<std::size_t>(count_raw);
    if (count_raw <= 0 || static_cast<double>(count) != count_raw) {
      throw UsageError("--grid count must be a positive integer");
    }
    for (std::size_t i = 0; i < count; ++i) {
      xs.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    }
  } else {
    note_input(io, opts.input);
    Dataset data = load_dataset(opts.input, parse_response(opts.response));
    xs = data.xs();
  }

  AngleSample predicted = predict_curve(xs, params);
  std::string out = "x,predicted_theta\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += g17(xs[i]) + "," + g17(predicted[i].value()) + "\n";
  }
  emit(io, dir, "predictions.csv", out);

  io.config = {{"params", params_json(params)},
               {"x", opts.x_text},
               {"grid", opts.grid_text},
               {"input", opts.input},
               {"points", xs.size()}};
  (void)globals;
  std::printf("predict: %zu points -> %s\n", xs.size(),
              (dir / "predictions.csv").string().c_str());
}

// ---------------------------------------------------------------------------
// ci / pi

struct IntervalOpts {
  std::string input;
  std::string response = "theta_high";
  double x = 0.0;
  std::size_t B = 200;
  double level = 0.95;
  std::size_t starts = 8;
};

void cmd_interval(bool prediction, const IntervalOpts& opts, const GlobalOpts& globals,
                  CommandIO& io, const fs::path& dir) {
  Response response = parse_response(opts.response);
  if (opts.B < 100) throw UsageError("--B must be at least 100");
  if (!(opts.level > 0.0 && opts.level < 1.0)) throw UsageError("--level must lie in (0,1)");
  note_input(io, opts.input);
  Dataset data = load_dataset(opts.input, response);

  FitConfig config;
  config.geometry = globals.geometry();
  config.n_starts = opts.starts;
  config.seed = globals.seed;
  config.jobs = globals.jobs;

  IntervalResult interval;
  if (prediction) {
    SeededRng rng(globals.seed, 0x9e);
    interval = bootstrap_pi(data, opts.x, opts.B, opts.level, config, rng);
  } else {
    interval = bootstrap_ci(data, opts.x, opts.B, opts.level, config);
  }

  const char* mode = prediction ? "pi" : "ci";
  ordered_json result;
  result["mode"] = mode;
  result["x"] = opts.x;
  result["level"] = interval.level;
  result["B"] = interval.B;
  result["lower"] = interval.lower.value();
  result["upper"] = interval.upper.value();
  result["center"] = interval.center.value();
  result["arc_width"] = wrap_radians(interval.upper.value() - interval.lower.value());
  emit(io, dir, "interval.json", result.dump(2) + "\n");

  std::string angles = "replicate,angle\n";
  for (std::size_t b = 0; b < interval.bootstrap_angles.size(); ++b) {
    angles += std::to_string(b) + "," + g17(interval.bootstrap_angles[b].value()) + "\n";
  }
  emit(io, dir, "bootstrap_angles.csv", angles);

  io.config = {{"input", opts.input}, {"response", opts.response}, {"x", opts.x},
               {"B", opts.B},         {"level", opts.level},       {"starts", opts.starts}};
  std::printf("%s: x=%s level=%s arc=[%s, %s] center=%s\n", mode, g17(opts.x).c_str(),
              g17(opts.level).c_str(), g17(interval.lower.value()).c_str(),
              g17(interval.upper.value()).c_str(), g17(interval.center.value()).c_str());
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseOpts {
  std::string input;
  std::string response = "theta_high";
  std::string params_text;
};

void cmd_diagnose(const DiagnoseOpts& opts, const GlobalOpts& globals, CommandIO& io,
                  const fs::path& dir) {
  ModelParams params = parse_params(opts.params_text);
  Response response = parse_response(opts.response);
  note_input(io, opts.input);
  Dataset data = load_dataset(opts.input, response);

  AngleSample predicted = predict_curve(data.xs(), params);
  AngleSample residuals;
  residuals.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    residuals.push_back(angular_residual(data.thetas()[i], predicted[i]));
  }

  std::string residuals_out = "x,theta,predicted_theta,residual\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    residuals_out += g17(data.xs()[i]) + "," + g17(data.thetas()[i].value()) + "," +
                     g17(predicted[i].value()) + "," + g17(residuals[i].value()) + "\n";
  }
  emit(io, dir, "residuals.csv", residuals_out);

  WatsonResult watson = watson_u2_vonmises(residuals, 0.05);
  double corr_theta = circular_linear_correlation(data.xs(), data.thetas());
  // Perfectly explained data has constant residuals, where the association
  // measure is 0/0; report null rather than aborting the whole diagnosis.
  ordered_json corr_residual;
  try {
    corr_residual = circular_linear_correlation(data.xs(), residuals);
  } catch (const InvalidInputError&) {
    corr_residual = nullptr;
  }

  ordered_json diag;
  diag["watson"] = {{"statistic", watson.statistic},
                    {"critical_value", watson.critical_value},
                    {"significance_level", watson.significance_level},
                    {"reject", watson.reject},
                    {"estimated_mu", watson.estimated_mu.value()},
                    {"estimated_kappa", watson.estimated_kappa}};
  diag["correlation_x_theta"] = corr_theta;
  diag["correlation_x_residual"] = corr_residual;
  diag["loss"] = loss_at(params, data, globals.geometry());
  diag["params"] = params_json(params);
  emit(io, dir, "diagnostics.json", diag.dump(2) + "\n");

  auto qq = qq_points(data.thetas(), predicted);
  std::string qq_out = "p,observed_quantile,predicted_quantile\n";
  for (std::size_t i = 0; i < qq.size(); ++i) {
    double p = (static_cast<double>(i) + 0.5) / static_cast<double>(qq.size());
    qq_out += g17(p) + "," + g17(qq[i].first.value()) + "," + g17(qq[i].second.value()) + "\n";
  }
  emit(io, dir, "qq.csv", qq_out);

  io.config = {{"input", opts.input},
               {"response", opts.response},
               {"params", params_json(params)},
               {"n", data.size()}};
  std::printf("diagnose: n=%zu watson_u2=%s reject=%s correlation=%s\n", data.size(),
              g17(watson.statistic).c_str(), watson.reject ? "true" : "false",
              g17(corr_theta).c_str());
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string table;
  double scale = 0.05;
  std::size_t starts = 12;
};

void cmd_simulate(const SimulateOpts& opts, const GlobalOpts& globals, CommandIO& io,
                  const fs::path& dir) {
  TableId table = parse_table_id(opts.table);
  FitConfig fit_config;
  fit_config.geometry = globals.geometry();
  fit_config.n_starts = opts.starts;
  fit_config.jobs = globals.jobs;

  auto started = std::chrono::steady_clock::now();
  auto rows = reproduce_table(table, opts.scale, globals.seed, fit_config);
  double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();

  std::string name = table_id_name(table);
  emit(io, dir, "table_" + name + ".csv", table_rows_csv(rows));

  ordered_json meta;
  meta["table"] = name;
  meta["scale"] = opts.scale;
  meta["seed"] = globals.seed;
  meta["starts"] = opts.starts;
  meta["rows"] = rows.size();
  auto replications = ordered_json::array();
  for (const auto& row : rows) replications.push_back(row.summary.replications_completed);
  meta["replications_completed"] = replications;
  meta["wall_ms"] = wall_ms;
  emit(io, dir, "table_" + name + ".meta.json", meta.dump(2) + "\n");

  io.config = {{"table", name}, {"scale", opts.scale}, {"starts", opts.starts}};
  std::printf("simulate: %s scale=%s rows=%zu -> %s\n", name.c_str(), g17(opts.scale).c_str(),
              rows.size(), (dir / ("table_" + name + ".csv")).string().c_str());
}

// ---------------------------------------------------------------------------
// coverage

struct CoverageOpts {
  std::string mode;
  std::string truth_text = "0,1.5,0.5";
  std::string error = "vm";
  double concentration = 3.0;
  std::string predictor = "normal";
  std::size_t n = 100;
  std::size_t B = 200;
  double level = 0.95;
  std::size_t iterations = 200;
  double x = 1.0;
  std::size_t starts = 6;
};

void cmd_coverage(const CoverageOpts& opts, const GlobalOpts& globals, CommandIO& io,
                  const fs::path& dir) {
  CoverageMode mode;
  if (opts.mode == "ci") {
    mode = CoverageMode::ci;
  } else if (opts.mode == "pi") {
    mode = CoverageMode::pi;
  } else {
    throw UsageError("--mode must be ci or pi");
  }
  if (opts.B < 100) throw UsageError("--B must be at least 100");
  if (!(opts.level > 0.0 && opts.level < 1.0)) throw UsageError("--level must lie in (0,1)");
  if (opts.iterations < 50) throw UsageError("--iterations must be at least 50");

  SimConfig config;
  config.truth = parse_params(opts.truth_text);
  if (opts.error == "vm") {
    config.error.family = AngularErrorFamily::VonMises;
  } else if (opts.error == "wc") {
    config.error.family = AngularErrorFamily::WrappedCauchy;
  } else {
    throw UsageError("--error must be vm or wc");
  }
  config.error.concentration = opts.concentration;
  if (opts.predictor == "normal") {
    config.predictor.family = PredictorFamily::StandardNormal;
  } else if (opts.predictor == "cauchy") {
    config.predictor.family = PredictorFamily::StandardCauchy;
  } else {
    throw UsageError("--predictor must be normal or cauchy");
  }
  config.n = opts.n;
  config.replications = opts.iterations;
  config.seed = globals.seed;
  config.fit.geometry = globals.geometry();
  config.fit.n_starts = opts.starts;
  config.fit.jobs = globals.jobs;
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  double coverage = run_coverage(config, opts.x, opts.B, opts.level, opts.iterations, mode);

  ordered_json result;
  result["mode"] = opts.mode;
  result["coverage"] = coverage;
  result["iterations"] = opts.iterations;
  result["B"] = opts.B;
  result["level"] = opts.level;
  result["x"] = opts.x;
  result["truth"] = params_json(config.truth);
  result["error"] = opts.error;
  result["concentration"] = opts.concentration;
  result["predictor"] = opts.predictor;
  result["n"] = opts.n;
  result["starts"] = opts.starts;
  emit(io, dir, "coverage.json", result.dump(2) + "\n");

  io.config = result;
  std::printf("coverage: mode=%s coverage=%s (level=%s, iterations=%zu)\n", opts.mode.c_str(),
              g17(coverage).c_str(), g17(opts.level).c_str(), opts.iterations);
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  CLI::App cli{"Circular-response regression on the torus: fitting, bootstrap intervals, "
               "diagnostics, simulation grids, and minute-bar ingestion"};
  cli.require_subcommand(1);

  GlobalOpts globals;
  cli.add_option("--seed", globals.seed, "Base seed for all randomized work")
      ->capture_default_str();
  cli.add_option("--geometry", globals.geometry_text, "Torus radii R,r")->capture_default_str();
  cli.add_option("--out", globals.out_dir, "Output directory")->capture_default_str();
  cli.add_option("--jobs", globals.jobs, "Worker threads for replicate loops")
      ->capture_default_str();

  IngestOpts ingest_opts;
  auto* ingest = cli.add_subcommand("ingest", "Aggregate minute OHLCV bars into daily records");
  ingest->fallthrough();
  ingest->add_option("--input", ingest_opts.input, "Minute-bar CSV")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--schema", ingest_opts.schema_text,
                     "Column overrides, e.g. unix=time,open=Open");
  ingest->add_option("--start", ingest_opts.start_text, "First day to keep (YYYY-MM-DD)");
  ingest->add_option("--end", ingest_opts.end_text, "Last day to keep (YYYY-MM-DD)");

  FitOpts fit_opts;
  auto* fit_cmd = cli.add_subcommand("fit", "Estimate link parameters by multistart descent");
  fit_cmd->fallthrough();
  fit_cmd->add_option("--input", fit_opts.input, "Daily CSV or x,theta CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--response", fit_opts.response, "theta_high or theta_low")
      ->capture_default_str();
  fit_cmd->add_option("--starts", fit_opts.starts, "Random multistart count")
      ->capture_default_str();

  PredictOpts predict_opts;
  auto* predict = cli.add_subcommand("predict", "Evaluate the link curve at given predictors");
  predict->fallthrough();
  predict->add_option("--params", predict_opts.params_text, "Link parameters b0,b1,b2")
      ->required();
  predict->add_option("--x", predict_opts.x_text, "Single predictor value");
  predict->add_option("--grid", predict_opts.grid_text, "Uniform grid lo,hi,count");
  predict->add_option("--input", predict_opts.input, "Take predictors from this CSV")
      ->check(CLI::ExistingFile);
  predict->add_option("--response", predict_opts.response, "theta_high or theta_low")
      ->capture_default_str();

  IntervalOpts ci_opts;
  auto* ci = cli.add_subcommand("ci", "Bootstrap confidence interval for the mean direction");
  IntervalOpts pi_opts;
  auto* pi = cli.add_subcommand("pi", "Bootstrap prediction interval for a new response");
  for (auto [sub, opts] : {std::pair{ci, &ci_opts}, std::pair{pi, &pi_opts}}) {
    sub->fallthrough();
    sub->add_option("--input", opts->input, "Daily CSV or x,theta CSV")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--response", opts->response, "theta_high or theta_low")
        ->capture_default_str();
    sub->add_option("--x", opts->x, "Predictor value the interval is for")->required();
    sub->add_option("--B", opts->B, "Bootstrap replicates (>= 100)")->capture_default_str();
    sub->add_option("--level", opts->level, "Coverage level in (0,1)")->capture_default_str();
    sub->add_option("--starts", opts->starts, "Random starts per fit")->capture_default_str();
  }

  DiagnoseOpts diagnose_opts;
  auto* diagnose = cli.add_subcommand("diagnose", "Residual diagnostics for fitted parameters");
  diagnose->fallthrough();
  diagnose->add_option("--input", diagnose_opts.input, "Daily CSV or x,theta CSV")
      ->required()
      ->check(CLI::ExistingFile);
  diagnose->add_option("--response", diagnose_opts.response, "theta_high or theta_low")
      ->capture_default_str();
  diagnose->add_option("--params", diagnose_opts.params_text, "Link parameters b0,b1,b2")
      ->required();

  SimulateOpts simulate_opts;
  auto* simulate = cli.add_subcommand("simulate", "Reproduce a Monte Carlo summary grid");
  simulate->fallthrough();
  simulate->add_option("--table", simulate_opts.table, "Grid id: T1, T2, T3, or T4")
      ->required()
      ->check(CLI::IsMember({"T1", "T2", "T3", "T4"}));
  simulate->add_option("--scale", simulate_opts.scale,
                       "Fraction of the full replication count, in (0,1]")
      ->capture_default_str();
  simulate->add_option("--starts", simulate_opts.starts, "Random starts per fit")
      ->capture_default_str();

  CoverageOpts coverage_opts;
  auto* coverage = cli.add_subcommand("coverage", "Monte Carlo interval coverage estimate");
  coverage->fallthrough();
  coverage->add_option("--mode", coverage_opts.mode, "ci or pi")
      ->required()
      ->check(CLI::IsMember({"ci", "pi"}));
  coverage->add_option("--truth", coverage_opts.truth_text, "True parameters b0,b1,b2")
      ->capture_default_str();
  coverage->add_option("--error", coverage_opts.error, "Angular error family: vm or wc")
      ->capture_default_str();
  coverage->add_option("--concentration", coverage_opts.concentration,
                       "kappa (vm) or rho (wc)")
      ->capture_default_str();
  coverage->add_option("--predictor", coverage_opts.predictor, "normal or cauchy")
      ->capture_default_str();
  coverage->add_option("--n", coverage_opts.n, "Sample size per iteration")
      ->capture_default_str();
  coverage->add_option("--B", coverage_opts.B, "Bootstrap replicates (>= 100)")
      ->capture_default_str();
  coverage->add_option("--level", coverage_opts.level, "Nominal level in (0,1)")
      ->capture_default_str();
  coverage->add_option("--iterations", coverage_opts.iterations, "Monte Carlo iterations (>= 50)")
      ->capture_default_str();
  coverage->add_option("--x", coverage_opts.x, "Predictor value under test")
      ->capture_default_str();
  coverage->add_option("--starts", coverage_opts.starts, "Random starts per fit")
      ->capture_default_str();

  std::vector<const char*> cargs;
  cargs.reserve(argv.size() + 1);
  cargs.push_back("torusreg");
  for (const auto& arg : argv) cargs.push_back(arg.c_str());

  try {
    auto started = std::chrono::steady_clock::now();
    cli.parse(static_cast<int>(cargs.size()), cargs.data());
    // Shared options are only consumed where needed; reject a bad --geometry
    // here so no command can run (and write outputs) under an invalid one.
    (void)globals.geometry();

    CommandIO io;
    fs::path dir = prepare_out_dir(globals);
    std::string command;
    if (ingest->parsed()) {
      command = "ingest";
      cmd_ingest(ingest_opts, globals, io, dir);
    } else if (fit_cmd->parsed()) {
      command = "fit";
      cmd_fit(fit_opts, globals, io, dir);
    } else if (predict->parsed()) {
      command = "predict";
      cmd_predict(predict_opts, globals, io, dir);
    } else if (ci->parsed()) {
      command = "ci";
      cmd_interval(false, ci_opts, globals, io, dir);
    } else if (pi->parsed()) {
      command = "pi";
      cmd_interval(true, pi_opts, globals, io, dir);
    } else if (diagnose->parsed()) {
      command = "diagnose";
      cmd_diagnose(diagnose_opts, globals, io, dir);
    } else if (simulate->parsed()) {
      command = "simulate";
      cmd_simulate(simulate_opts, globals, io, dir);
    } else if (coverage->parsed()) {
      command = "coverage";
      cmd_coverage(coverage_opts, globals, io, dir);
    }
    double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    write_manifest(command, argv, globals, io, dir, wall_ms);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace torusreg::app
