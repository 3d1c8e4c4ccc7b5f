#include "torusreg/distributions.hpp"

#include <cmath>
#include <numbers>

#include "torusreg/errors.hpp"

namespace torusreg {

namespace {

constexpr double pi = std::numbers::pi;

double require_positive_count(std::size_t n) {
  if (n == 0) {
    throw InvalidInputError("sample size must be at least 1");
  }
  return static_cast<double>(n);
}

// One standard normal draw by Box-Muller; the spare value is discarded so the
// draw count per call is fixed, which keeps substream layouts simple.
double normal_draw(SeededRng& rng) {
  const double u1 = 1.0 - rng.uniform01();  // (0, 1], keeps the log finite
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double cauchy_draw(SeededRng& rng) { return std::tan(pi * (rng.uniform01() - 0.5)); }

// Adaptive Simpson refinement for the unnormalized shifted vM density.
double adaptive_simpson(double (*f)(double, double, double), double mu, double kappa,
                        double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm, mu, kappa);
  const double frm = f(rm, mu, kappa);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, mu, kappa, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, mu, kappa, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Density shifted by its maximum: exp(kappa*(cos(u-mu)-1)) stays in (0, 1]
// for every kappa, so large concentrations cannot overflow.
double shifted_vm_density(double u, double mu, double kappa) {
  return std::exp(kappa * (std::cos(u - mu) - 1.0));
}

// Integral of the shifted density over [a, b]. The initial panel count grows
// with sqrt(kappa) so the O(1/sqrt(kappa)) density spike is always resolved
// before adaptive refinement starts.
double integrate_shifted_vm(double a, double b, double mu, double kappa, double tol) {
  if (b <= a) return 0.0;
  const int panels = std::max(16, std::min(4096, static_cast<int>(8.0 * std::sqrt(kappa) + 1.0)));
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == panels) ? b : lo + h;
    const double mid = 0.5 * (lo + hi);
    const double flo = shifted_vm_density(lo, mu, kappa);
    const double fmid = shifted_vm_density(mid, mu, kappa);
    const double fhi = shifted_vm_density(hi, mu, kappa);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += adaptive_simpson(&shifted_vm_density, mu, kappa, lo, hi, flo, fmid, fhi,
                              whole, tol / panels, 30);
  }
  return total;
}

}  // namespace

void AngularErrorSpec::validate() const {
  switch (family) {
    case AngularErrorFamily::VonMises:
      if (!(concentration > 0.0) || !std::isfinite(concentration)) {
        throw InvalidInputError("von Mises concentration must satisfy kappa > 0");
      }
      break;
    case AngularErrorFamily::WrappedCauchy:
      if (!(concentration > 0.0 && concentration < 1.0)) {
        throw InvalidInputError("wrapped Cauchy concentration must satisfy 0 < rho < 1");
      }
      break;
  }
}

AngleSample sample_von_mises(const AngularErrorSpec& spec, std::size_t n, SeededRng& rng) {
  if (spec.family != AngularErrorFamily::VonMises) {
    throw InvalidInputError("spec family must be VonMises");
  }
  spec.validate();
  require_positive_count(n);

  // Wrapped-Cauchy envelope rejection (Best-Fisher). The envelope parameter
  // r depends only on kappa.
  const double kappa = spec.concentration;
  const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
  const double r = (1.0 + b * b) / (2.0 * b);

  AngleSample out;
  out.reserve(n);
  while (out.size() < n) {
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double z = std::cos(pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double u3 = rng.uniform01();
      const double sign = (u3 < 0.5) ? -1.0 : 1.0;
      out.emplace_back(spec.mu.value() + sign * std::acos(f));
    }
  }
  return out;
}

AngleSample sample_wrapped_cauchy(const AngularErrorSpec& spec, std::size_t n, SeededRng& rng) {
  if (spec.family != AngularErrorFamily::WrappedCauchy) {
    throw InvalidInputError("spec family must be WrappedCauchy");
  }
  spec.validate();
  require_positive_count(n);

  const double rho = spec.concentration;
  const double scale = (1.0 - rho) / (1.0 + rho);
  AngleSample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    out.emplace_back(spec.mu.value() + 2.0 * std::atan(scale * std::tan(pi * (u - 0.5))));
  }
  return out;
}

AngleSample sample_angular_error(const AngularErrorSpec& spec, std::size_t n, SeededRng& rng) {
  return spec.family == AngularErrorFamily::VonMises ? sample_von_mises(spec, n, rng)
                                                     : sample_wrapped_cauchy(spec, n, rng);
}

std::vector<double> sample_predictor(const PredictorSpec& spec, std::size_t n, SeededRng& rng) {
  require_positive_count(n);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(spec.family == PredictorFamily::StandardNormal ? normal_draw(rng)
                                                                 : cauchy_draw(rng));
  }
  return out;
}

double von_mises_cdf(Angle theta, Angle mu, double kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa)) {
    throw InvalidInputError("von Mises CDF requires kappa >= 0");
  }
  if (kappa == 0.0) {
    return theta.value() / two_pi;
  }
  // Normalizer and partial integral share the same quadrature tolerance; the
  // ratio then meets the 1e-9 absolute target comfortably.
  const double tol = 1e-12;
  const double total = integrate_shifted_vm(0.0, two_pi, mu.value(), kappa, tol);
  const double part = integrate_shifted_vm(0.0, theta.value(), mu.value(), kappa, tol);
  double z = part / total;
  if (z < 0.0) z = 0.0;
  if (z > 1.0) z = 1.0;
  return z;
}

double kappa_from_resultant(double rbar) {
  if (!(rbar >= 0.0 && rbar <= 1.0)) {
    throw InvalidInputError("resultant length must lie in [0, 1]");
  }
  double kappa = 0.0;
  if (rbar < 0.53) {
    kappa = 2.0 * rbar + rbar * rbar * rbar + (5.0 / 6.0) * std::pow(rbar, 5);
  } else if (rbar < 0.85) {
    kappa = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  } else {
    kappa = 1.0 / (rbar * rbar * rbar - 4.0 * rbar * rbar + 3.0 * rbar);
  }
  return std::min(kappa, 1e4);
}

}  // namespace torusreg
