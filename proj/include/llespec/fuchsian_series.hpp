#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "llespec/levy_driver.hpp"
#include "llespec/loewner_system.hpp"

namespace llespec {

/// theta'(xi) = A theta / xi - B theta / (xi - 1). Residues at 0, 1 and
/// infinity are A, -B and B - A.
struct FuchsianSystem {
  LoewnerMatrices matrices;

  explicit FuchsianSystem(LoewnerMatrices m) : matrices(std::move(m)) {}
  int size() const { return matrices.n; }
  Variant variant() const { return matrices.variant; }
};

/// System of dimension `n`, or of the truncation order when `n` is absent.
/// Throws ValidationError when neither is available.
FuchsianSystem make_fuchsian_system(const EtaSequence& eta, Variant variant,
                                    std::optional<int> n = std::nullopt);

/// Kernel vector of A (Unbounded) or B - A (Bounded), first entry 1.
std::vector<double> analytic_null_vector(const LoewnerMatrices& m);

/// Produces the coefficients c_0, c_1, ... of the analytic solution one at a
/// time: powers of xi for Unbounded, of 1/xi for Bounded.
class CoefficientStream {
 public:
  explicit CoefficientStream(const FuchsianSystem& sys);

  int index() const { return k_; }
  std::span<const double> current() const { return current_; }
  void advance();

 private:
  LoewnerMatrices m_;
  int k_ = 0;
  std::vector<double> current_;
  std::vector<double> prefix_sum_;  // bounded only: c_0 + ... + c_k
  std::vector<double> work_;
};

/// Truncated power series of the analytic solution, normalized to c_0[0] = 1.
class ThetaSeries {
 public:
  ThetaSeries(Variant variant, int n, std::vector<double> coefficients);

  Variant variant() const { return variant_; }
  int size() const { return n_; }
  int order() const { return static_cast<int>(coeffs_.size()) / n_ - 1; }
  std::span<const double> coefficient(int k) const;

 private:
  Variant variant_;
  int n_;
  std::vector<double> coeffs_;  // (order + 1) x n, row-major
};

/// Coefficients c_0..c_{order}. Requires order >= 1.
ThetaSeries series_solution(const FuchsianSystem& sys, int order);

struct ThetaValue {
  std::vector<double> theta;
  /// Geometric bound on the omitted tail, from the last retained term.
  double tail_estimate = 0.0;
};

/// Unbounded: 0 <= xi < 1. Bounded: xi > 1 (xi = +inf gives c_0).
ThetaValue evaluate_theta(const ThetaSeries& series, double xi);

/// d theta / d xi from the differentiated series.
std::vector<double> evaluate_theta_derivative(const ThetaSeries& series, double xi);

/// Zero Fourier mode of rho: (1 + xi) theta_0 - 2 xi theta_1 for Unbounded,
/// (1 + 1/xi) theta_0 - (2/xi) theta_1 for Bounded.
double angular_mean_rho(Variant variant, std::span<const double> theta, double xi);
double angular_mean_rho(const ThetaSeries& series, double xi);

/// Integrates the system from (xi0, theta0) to each target in order, in the
/// variable t = -log|1 - xi| with an adaptive Dormand-Prince stepper.
std::vector<std::vector<double>> integrate_theta(const FuchsianSystem& sys, double xi0,
                                                 std::span<const double> theta0,
                                                 std::span<const double> targets,
                                                 double rtol = 1e-10);

/// Geometric ladder xi_j = 1 -+ 2^{-j}, j = j_min..j_max, approaching 1 from
/// inside the domain of the series.
struct LadderSpec {
  int j_min = 6;
  int j_max = 14;

  std::vector<double> points(Variant variant) const;
};

enum class FitMethod { Auto, Series, Ode };

std::string_view to_string(FitMethod m);
FitMethod parse_fit_method(std::string_view text);

struct FitOptions {
  FitMethod method = FitMethod::Auto;
  /// Series tail at the nearest ladder point relative to the value there.
  double tail_tolerance = 1e-6;
  long max_terms = 4'000'000;
  double ode_rtol = 1e-10;
};

struct BlowupFit {
  double beta_est = 0.0;
  double xi_near = 0.0;
  double xi_far = 0.0;
  /// Max deviation of the local slopes from beta_est.
  double residual = 0.0;
  /// The angular mean changed sign on the ladder: dominant exponents are
  /// complex and beta_est is unreliable.
  bool oscillation_detected = false;

  std::vector<double> xi;
  std::vector<double> mean_rho;
  std::vector<double> slopes;
  long series_terms = 0;
  FitMethod method_used = FitMethod::Series;

  bool reliable() const { return !oscillation_detected; }
};

BlowupFit blowup_exponent(const FuchsianSystem& sys, const LadderSpec& ladder = {},
                          const FitOptions& options = {});

}  // namespace llespec
