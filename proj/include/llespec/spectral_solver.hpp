#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "llespec/levy_driver.hpp"
#include "llespec/loewner_system.hpp"

namespace llespec {

/// Absolute tolerance for degeneracy and resonance detection.
inline constexpr double kClusterTolerance = 1e-7;

struct Cluster {
  std::complex<double> value;
  int multiplicity = 1;
};

struct SpectrumResult {
  /// Sorted by real part descending, then imaginary part ascending.
  std::vector<std::complex<double>> eigenvalues;
  /// Largest real part among eigenvalues with |Im| < kClusterTolerance;
  /// NaN when there is none.
  double max_real = 0.0;
  int n_nonneg_real = 0;
  std::vector<Cluster> clusters;
  /// Some pair of eigenvalues differs by a nonzero integer.
  bool resonant = false;
  bool all_real = false;
  /// Every diagonal block (split where a_n = 0) had a_n > 0 and went through
  /// the symmetric tridiagonal solver.
  bool symmetric_path = false;

  /// Multiplicity of the cluster containing eigenvalue `i`.
  int multiplicity_of(std::size_t i) const;
};

SpectrumResult eigen_spectrum(const LoewnerMatrices& m);

/// Spectrum of any matrix with the given recurrence: diagonal b_n and
/// off-diagonal products a_n.
SpectrumResult eigen_spectrum(const CharPolyRecurrence& rec);

struct MaxRootResult {
  double value = 0.0;
  /// No sign change was bracketed and the eigensolver supplied the value.
  bool used_fallback = false;
};

/// Upper bound on the real part of every root of P_N: Gershgorin row bound of
/// the balanced tridiagonal matrix with off-diagonals sqrt|a_n|.
double gershgorin_upper(const CharPolyRecurrence& rec);
double gershgorin_lower(const CharPolyRecurrence& rec);

/// Largest real root of P_N by a descending scan from the Gershgorin bound
/// and bisection to 1e-12 relative.
MaxRootResult max_real_root(const CharPolyRecurrence& rec);

/// Sign changes in a coefficient list, zeros skipped.
int descartes_positive_count(std::span<const double> coeffs);
int descartes_positive_count(std::span<const Rational> coeffs);

/// True iff a_n > 0 for every 1 <= n <= N-1: P_n are then orthogonal with
/// respect to a positive measure and the spectrum is real and simple.
bool classify_regime(const CharPolyRecurrence& rec);

struct SequencePoint {
  int m = 0;
  double beta_max = 0.0;
};

struct Beta2Report {
  Variant variant = Variant::Unbounded;
  /// Present when the eta sequence truncates within the searched range.
  std::optional<int> truncation;
  /// beta_max(M) for M = 2..m_max; always filled in sequence mode, and in
  /// truncated mode when requested.
  std::vector<SequencePoint> sequence;
  double beta2 = 0.0;
  bool converged = false;
  double convergence_gap = 0.0;

  bool truncated() const { return truncation.has_value(); }
};

struct Beta2Options {
  bool with_sequence = false;
  double convergence_tolerance = 1e-9;
};

Beta2Report beta2(const EtaSequence& eta, Variant variant, int m_max,
                  const Beta2Options& options = {});

}  // namespace llespec
