#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "llespec/levy_driver.hpp"
#include "llespec/rational.hpp"

namespace llespec {

/// Unbounded: the map from the unit disc, curve growing from infinity.
/// Bounded: the map from the exterior of the disc, curve growing from 0.
enum class Variant { Unbounded, Bounded };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

/// Real tridiagonal matrix held as three bands.
/// lower[i-1] = M(i, i-1) and upper[i] = M(i, i+1).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  int size() const { return static_cast<int>(diag.size()); }
  double sub(int row) const { return lower[static_cast<std::size_t>(row - 1)]; }
  double super(int row) const { return upper[static_cast<std::size_t>(row)]; }

  /// Test and diagnostics only.
  Eigen::MatrixXd dense() const;
};

/// Residue matrices of the Fuchsian system theta' = A theta / xi - B theta / (xi - 1).
/// A is bidiagonal (lower for Unbounded, upper for Bounded); B is tridiagonal.
struct LoewnerMatrices {
  Variant variant = Variant::Unbounded;
  int n = 0;
  Tridiagonal a;
  Tridiagonal b;
  /// eta_1..eta_{n-1} as exact rationals, when the input carried them.
  std::optional<std::vector<Rational>> eta_exact;
};

/// Three-term recurrence P_{n+1} = (beta - b_n) P_n - a_n P_{n-1},
/// P_0 = 1, P_{-1} = 0, whose P_N is det(beta - B).
struct CharPolyRecurrence {
  Variant variant = Variant::Unbounded;
  std::vector<double> a;  ///< a_1..a_{N-1}, stored from index 0
  std::vector<double> b;  ///< b_0..b_{N-1}
  std::optional<std::vector<Rational>> a_exact;
  std::optional<std::vector<Rational>> b_exact;

  int size() const { return static_cast<int>(b.size()); }
  double a_at(int n) const { return a[static_cast<std::size_t>(n - 1)]; }
  bool exact() const { return a_exact.has_value() && b_exact.has_value(); }
};

LoewnerMatrices build_matrices(const EtaSequence& eta, int n, Variant variant);

CharPolyRecurrence recurrence_coefficients(const EtaSequence& eta, int n, Variant variant);

/// Recurrence of B read off its bands: a_n = B(n, n-1) B(n-1, n), b_n = B(n, n).
/// Exact coefficients are attached when the matrices carry exact eta.
CharPolyRecurrence recurrence_from_matrices(const LoewnerMatrices& m);

/// P_N(beta) as mantissa * exp(log_scale). The recurrence pair is rescaled
/// whenever it leaves [1e-64, 1e64], so large N never overflows.
template <class T>
struct ScaledValue {
  T mantissa{};
  double log_scale = 0.0;

  T value() const { return mantissa * std::exp(log_scale); }
};

struct ScaledReal : ScaledValue<double> {
  int sign() const { return (mantissa > 0) - (mantissa < 0); }
};

ScaledReal charpoly_eval(const CharPolyRecurrence& rec, double beta);
ScaledValue<std::complex<double>> charpoly_eval(const CharPolyRecurrence& rec,
                                                std::complex<double> beta);

/// Monomial coefficients of P_N, constant term first. `exact` is filled when
/// the recurrence carries exact rational coefficients.
struct CharPolyCoefficients {
  std::vector<double> values;
  std::optional<std::vector<Rational>> exact;
};

inline constexpr int kDefaultCoefficientLimit = 512;

CharPolyCoefficients charpoly_coefficients(const CharPolyRecurrence& rec,
                                           int limit = kDefaultCoefficientLimit);

inline constexpr double kTruncationTolerance = 1e-12;

/// Smallest N with eta_N == N + 2 (Unbounded) or N - 2 (Bounded), within
/// kTruncationTolerance, searched over the stored range.
std::optional<int> truncation_order(const EtaSequence& eta, Variant variant);

/// Closest |eta_N - (N +- 2)| over the stored range, for diagnostics when no
/// exact truncation is found.
struct NearTruncation {
  int n = 0;
  double distance = 0.0;
};
std::optional<NearTruncation> nearest_truncation(const EtaSequence& eta, Variant variant);

}  // namespace llespec
