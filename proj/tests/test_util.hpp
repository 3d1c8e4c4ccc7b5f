#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torusreg/angle.hpp"
#include "torusreg/dataset.hpp"
#include "torusreg/mobius.hpp"

namespace testutil {

// Shortest arc distance between two angles (in radians, in [0, pi]).
inline double circ_dist(double a, double b) {
  const double d = torusreg::wrap_radians(a - b);
  return std::min(d, torusreg::two_pi - d);
}

inline double circ_dist(torusreg::Angle a, torusreg::Angle b) {
  return circ_dist(a.value(), b.value());
}

// Noiseless dataset: theta_i = link(x_i, truth) with x on an even grid.
inline torusreg::Dataset noiseless_dataset(const torusreg::ModelParams& truth, std::size_t n,
                                           double x_lo = -3.0, double x_hi = 3.0) {
  std::vector<double> xs(n);
  torusreg::AngleSample thetas;
  thetas.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    thetas.push_back(torusreg::link(xs[i], truth));
  }
  return torusreg::Dataset(std::move(xs), std::move(thetas));
}

// Fresh directory under the system temp root; caller owns cleanup (or not).
inline std::filesystem::path make_temp_dir(const std::string& prefix) {
  static std::mt19937_64 gen{std::random_device{}()};
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto candidate = base / (prefix + "-" + std::to_string(gen()));
    std::error_code ec;
    if (std::filesystem::create_directory(candidate, ec)) return candidate;
  }
  throw std::runtime_error("could not create a temp directory for tests");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace testutil
