#include "llespec/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llespec/errors.hpp"
#include "llespec/spectral_solver.hpp"
#include "llespec/special_functions.hpp"

namespace llespec {

namespace {

const double kBetaMax = 3.0 + std::sqrt(3.0);

}  // namespace

double beta2_unbounded_n2(double eta1) {
  if (!(eta1 >= 0.0) || !std::isfinite(eta1)) {
    throw DomainError("eta_1 must be finite and >= 0, got " + std::to_string(eta1));
  }
  return 0.5 * (6.0 - eta1 + std::sqrt(eta1 * eta1 - 4.0 * eta1 + 12.0));
}

double eta1_from_beta(double beta) {
  if (!(beta > 2.0 && beta <= kBetaMax)) {
    throw DomainError("beta must lie in (2, 3 + sqrt 3], got " + std::to_string(beta));
  }
  return (beta * beta - 6.0 * beta + 6.0) / (2.0 - beta);
}

HypergeometricParams HypergeometricParams::from_beta(double beta) {
  (void)eta1_from_beta(beta);  // domain check
  const double den = 2.0 * (2.0 - beta);
  return {(beta * beta - 5.0 * beta + 8.0) / den, 3.0 - beta,
          (beta * beta - 7.0 * beta + 8.0) / den, beta};
}

HypergeometricParams HypergeometricParams::from_eta1(double eta1) {
  return from_beta(beta2_unbounded_n2(eta1));
}

Theorem1Values theorem1_solution(double eta1, double xi) {
  const auto p = HypergeometricParams::from_eta1(eta1);
  if (!(xi >= 0.0 && xi < 1.0)) {
    throw DomainError("xi must lie in [0, 1), got " + std::to_string(xi));
  }
  Theorem1Values v;
  v.f0 = gauss_2f1(p.a, p.b, p.c, xi);
  const double df0 = p.a * p.b / p.c * gauss_2f1(p.a + 1.0, p.b + 1.0, p.c + 1.0, xi);
  v.f1 = 0.5 * (xi - 1.0) * df0 + 0.5 * (3.0 - p.beta) * v.f0;
  const double blowup = std::pow(1.0 - xi, -p.beta);
  v.theta0 = blowup * v.f0;
  v.theta1 = blowup * v.f1;
  return v;
}

LevyDriver truncated_sle_driver(int n, Variant variant) {
  if (n < 1 || (variant == Variant::Bounded && n < 3)) {
    throw DomainError("truncated SLE needs N >= 1 (unbounded) or N >= 3 (bounded), got " +
                      std::to_string(n));
  }
  const double shift = variant == Variant::Unbounded ? 2.0 : -2.0;
  LevyDriver d;
  d.kappa = 2.0 * (n + shift) / (static_cast<double>(n) * n);
  return d;
}

std::vector<double> truncated_sle_spectrum(int n, Variant variant) {
  const auto driver = truncated_sle_driver(n, variant);
  std::vector<double> out;
  if (variant == Variant::Unbounded) {
    const double nn = static_cast<double>(n) * n;
    for (int l = 0; l < n; ++l) {
      out.push_back((n + 2.0 - (2.0 * nn - 3.0 * n - 6.0) * l + 2.0 * (n + 2.0) * l * l) / nn);
    }
    return out;
  }
  const auto eta = eta_sequence(driver, n);
  const auto spec = eigen_spectrum(build_matrices(eta, n, variant));
  for (const auto& z : spec.eigenvalues) out.push_back(z.real());
  return out;
}

std::vector<double> bounded_sle_quadratic_formula(int n) {
  const double kappa = truncated_sle_driver(n, Variant::Bounded).kappa;
  std::vector<double> out;
  for (int l = 0; l < n; ++l) {
    out.push_back((2.0 * kappa + (3.0 * kappa - 4.0) * l + kappa * l * l) / 4.0);
  }
  return out;
}

LevyDriver perturbed_n6_driver(double delta_kappa) {
  LevyDriver d;
  d.kappa = 4.0 / 9.0 - delta_kappa;
  d.uniform_rate = 18.0 * delta_kappa;
  return d;
}

std::array<std::complex<double>, 4> perturbed_n6_pairs(double delta_kappa) {
  if (!(delta_kappa > 0.0 && delta_kappa <= 1e-3)) {
    throw DomainError("delta kappa must lie in (0, 1e-3], got " + std::to_string(delta_kappa));
  }
  const double upper = 21.0 / 128.0 * std::sqrt(30.0 * delta_kappa);
  const double lower = 5.0 / 128.0 * std::sqrt(70.0 * delta_kappa);
  return {{{2.0 / 9.0, -upper}, {2.0 / 9.0, upper}, {-2.0 / 3.0, -lower}, {-2.0 / 3.0, lower}}};
}

}  // namespace llespec
