#pragma once

#include <array>
#include <complex>
#include <vector>

#include "llespec/levy_driver.hpp"
#include "llespec/loewner_system.hpp"

namespace llespec {

/// beta(2) of the unbounded process truncating at N = 2 (eta_2 = 4):
/// (6 - eta_1 + sqrt(eta_1^2 - 4 eta_1 + 12)) / 2, in (2, 3 + sqrt 3].
double beta2_unbounded_n2(double eta1);

/// Inverse of beta2_unbounded_n2: eta_1 = (beta^2 - 6 beta + 6) / (2 - beta).
double eta1_from_beta(double beta);

/// Parameters of the hypergeometric equation satisfied by f_0 in the N = 2
/// unbounded solution.
struct HypergeometricParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double beta = 0.0;

  static HypergeometricParams from_beta(double beta);
  static HypergeometricParams from_eta1(double eta1);
};

/// Closed-form N = 2 unbounded solution at xi in [0, 1):
/// f_0 = 2F1(a, b; c; xi), f_1 = (xi - 1)/2 f_0' + (3 - beta)/2 f_0,
/// theta_i = (1 - xi)^{-beta} f_i.
struct Theorem1Values {
  double f0 = 0.0;
  double f1 = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
};

Theorem1Values theorem1_solution(double eta1, double xi);

/// Driver of the N-truncated SLE: kappa = 2 (N + 2) / N^2 (Unbounded) or
/// 2 (N - 2) / N^2 (Bounded).
LevyDriver truncated_sle_driver(int n, Variant variant);

/// Spectrum of B for the N-truncated SLE. Unbounded: the quadratic formula in
/// l = 0..N-1, in that order. Bounded (N >= 3): eigenvalues of the matrix,
/// descending; its only nonnegative member is kappa_N / 2 = (N - 2) / N^2.
std::vector<double> truncated_sle_spectrum(int n, Variant variant);

/// (2 kappa_N + (3 kappa_N - 4) l + kappa_N l^2) / 4 for l = 0..N-1. Kept for
/// comparison only: beyond l = 0 it does not match the eigenvalues of the
/// bounded matrix (N = 3 gives {1/9, -2/3, -4/3} against {1/9, -4/3, -7/3}).
std::vector<double> bounded_sle_quadratic_formula(int n);

/// Driver kappa = 4/9 - dk plus uniform jumps of rate 18 dk; it truncates
/// the unbounded system at N = 6.
LevyDriver perturbed_n6_driver(double delta_kappa);

/// Leading-order complex eigenvalues of the perturbed N = 6 system:
/// 2/9 -+ i (21/128) sqrt(30 dk) and -2/3 -+ i (5/128) sqrt(70 dk).
/// Requires 0 < dk <= 1e-3.
std::array<std::complex<double>, 4> perturbed_n6_pairs(double delta_kappa);

}  // namespace llespec
