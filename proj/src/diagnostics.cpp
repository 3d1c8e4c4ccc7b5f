#include "torusreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "torusreg/circular_stats.hpp"
#include "torusreg/distributions.hpp"

namespace torusreg {

namespace {

constexpr double watson_critical_value_5pct = 0.079;

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    throw InvalidInputError("correlation undefined: a component has zero variance");
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

WatsonResult watson_u2_vonmises(const AngleSample& residuals, double level) {
  if (residuals.size() < 10) {
    throw InvalidInputError("Watson's test requires at least 10 residuals");
  }
  if (level != 0.05) {
    throw InvalidInputError("only the 0.05 significance level is supported");
  }

  // Maximum-likelihood parameters of the fitted noise law. A vanishing
  // resultant is the flat-distribution limit: kappa = 0, where the fitted
  // CDF no longer depends on the mean direction, so any mean serves.
  const double rbar = resultant_length(residuals);
  const MeanResultant mr = rbar < epsilon_resultant
                               ? MeanResultant{Angle(0.0), 0.0}
                               : circular_mean_and_resultant(residuals);
  const double kappa = kappa_from_resultant(mr.resultant_length);

  const std::size_t n = residuals.size();
  std::vector<double> z;
  z.reserve(n);
  for (Angle a : residuals) {
    z.push_back(von_mises_cdf(a, mr.mean, kappa));
  }
  std::sort(z.begin(), z.end());

  double zbar = 0.0;
  for (double v : z) zbar += v;
  zbar /= static_cast<double>(n);

  double u2 = 1.0 / (12.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double grid = (2.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * static_cast<double>(n));
    const double d = z[i] - grid;
    u2 += d * d;
  }
  u2 -= static_cast<double>(n) * (zbar - 0.5) * (zbar - 0.5);

  WatsonResult result;
  result.statistic = u2;
  result.critical_value = watson_critical_value_5pct;
  result.significance_level = level;
  result.reject = u2 > watson_critical_value_5pct;
  result.estimated_mu = mr.mean;
  result.estimated_kappa = kappa;
  return result;
}

std::vector<std::pair<Angle, Angle>> qq_points(const AngleSample& observed,
                                               const AngleSample& predicted) {
  if (observed.empty() || predicted.empty()) {
    throw EmptySampleError("quantile-quantile pairs of an empty sample");
  }
  const std::size_t m = std::min(observed.size(), predicted.size());
  std::vector<std::pair<Angle, Angle>> pairs;
  pairs.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) {
    const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(m);
    pairs.emplace_back(circular_quantile(observed, p), circular_quantile(predicted, p));
  }
  return pairs;
}

double circular_linear_correlation(const std::vector<double>& xs, const AngleSample& thetas) {
  if (xs.size() != thetas.size()) {
    throw InvalidInputError("predictor and angle lengths differ");
  }
  if (xs.size() < 3) {
    throw InvalidInputError("correlation requires at least 3 observations");
  }
  std::vector<double> c;
  std::vector<double> s;
  c.reserve(thetas.size());
  s.reserve(thetas.size());
  for (Angle a : thetas) {
    c.push_back(std::cos(a.value()));
    s.push_back(std::sin(a.value()));
  }
  const double rxc = pearson(xs, c);
  const double rxs = pearson(xs, s);
  const double rcs = pearson(c, s);
  const double denom = 1.0 - rcs * rcs;
  if (denom <= 0.0) {
    throw InvalidInputError("correlation undefined: cos/sin components are collinear");
  }
  double v = (rxc * rxc + rxs * rxs - 2.0 * rxc * rxs * rcs) / denom;
  v = std::clamp(v, 0.0, 1.0);
  return std::sqrt(v);
}

}  // namespace torusreg
