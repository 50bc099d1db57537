#include "llespec/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "llespec/errors.hpp"

namespace llespec {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with the argument reduced first so integers give exact zeros.
double sin_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  return std::sin(std::numbers::pi * r);
}

double lanczos_positive(double x) {
  // x >= 1/2
  const double z = x - 1.0;
  double sum = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    sum += kLanczosCoefficients[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * sum;
}

constexpr double kSeriesTolerance = 1e-14;

double raw_series(double a, double b, double c, double xi, long budget) {
  double sum = 1.0;
  double term = 1.0;
  const double settle = 2.0 * (std::fabs(a) + std::fabs(b) + std::fabs(c)) + 10.0;
  for (long n = 0; n < budget; ++n) {
    const double dn = static_cast<double>(n);
    const double factor = (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0));
    term *= factor * xi;
    sum += term;
    if (term == 0.0) return sum;  // terminating series
    if (dn > settle) {
      const double ratio = std::max(std::fabs(factor) * xi, xi);
      if (ratio < 1.0 && std::fabs(term) * ratio / (1.0 - ratio) <
                             kSeriesTolerance * std::fabs(sum)) {
        return sum;
      }
    }
  }
  throw PrecisionError("2F1 series did not converge within " + std::to_string(budget) +
                       " terms at xi = " + std::to_string(xi));
}

}  // namespace

double gamma_lanczos(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) {
    throw DomainError("Gamma has a pole at " + std::to_string(x));
  }
  if (x < 0.5) return std::numbers::pi / (sin_pi(x) * lanczos_positive(1.0 - x));
  return lanczos_positive(x);
}

double reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x < 0.5) return sin_pi(x) * lanczos_positive(1.0 - x) / std::numbers::pi;
  return 1.0 / lanczos_positive(x);
}

double gauss_2f1(double a, double b, double c, double xi) {
  if (is_nonpositive_integer(c)) {
    throw DomainError("2F1 has a pole: c = " + std::to_string(c) + " is a nonpositive integer");
  }
  if (!(xi >= 0.0 && xi < 1.0)) {
    throw DomainError("2F1 argument " + std::to_string(xi) + " outside [0, 1)");
  }
  if (xi == 0.0) return 1.0;

  const double s = c - a - b;
  const bool near_integer = std::fabs(s - std::round(s)) < 1e-3;
  if (xi <= 0.75 || near_integer) return raw_series(a, b, c, xi, near_integer ? 50'000'000 : 10'000'000);

  // Connection formula z -> 1 - z.
  const double w = 1.0 - xi;
  const double gc = gamma_lanczos(c);
  const double first = gc * gamma_lanczos(s) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b);
  const double second = gc * gamma_lanczos(-s) * reciprocal_gamma(a) * reciprocal_gamma(b);
  double value = 0.0;
  if (first != 0.0) value += first * raw_series(a, b, 1.0 - s, w, 10'000'000);
  if (second != 0.0) value += second * std::pow(w, s) * raw_series(c - a, c - b, 1.0 + s, w, 10'000'000);
  return value;
}

double gauss_at_one(double a, double b, double c) {
  const double s = c - a - b;
  if (!(s > 0.0)) {
    throw DomainError("Gauss identity needs c - a - b > 0, got " + std::to_string(s));
  }
  for (double arg : {c, s, c - a, c - b}) {
    if (is_nonpositive_integer(arg)) {
      throw DomainError("Gamma pole at " + std::to_string(arg) + " in the Gauss identity");
    }
  }
  return gamma_lanczos(c) * gamma_lanczos(s) / (gamma_lanczos(c - a) * gamma_lanczos(c - b));
}

}  // namespace llespec
