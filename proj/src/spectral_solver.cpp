#include "llespec/spectral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "llespec/errors.hpp"

namespace llespec {

namespace {

// The solvers run in extended precision: the degenerate truncated-SLE spectra
// contain Jordan blocks whose eigenvalues split by O(sqrt(eps)).
using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

std::string dump(const CharPolyRecurrence& rec) {
  std::ostringstream os;
  os.precision(17);
  os << "b = [";
  for (double v : rec.b) os << ' ' << v;
  os << " ], a = [";
  for (double v : rec.a) os << ' ' << v;
  os << " ]";
  return os.str();
}

bool less_spectral(const std::complex<double>& x, const std::complex<double>& y) {
  if (x.real() != y.real()) return x.real() > y.real();
  return x.imag() < y.imag();
}

void classify(SpectrumResult& r) {
  auto& ev = r.eigenvalues;
  std::sort(ev.begin(), ev.end(), less_spectral);

  r.max_real = std::numeric_limits<double>::quiet_NaN();
  r.n_nonneg_real = 0;
  r.all_real = true;
  for (const auto& z : ev) {
    if (std::fabs(z.imag()) < kClusterTolerance) {
      if (std::isnan(r.max_real) || z.real() > r.max_real) r.max_real = z.real();
      if (z.real() > -kClusterTolerance) ++r.n_nonneg_real;
    } else {
      r.all_real = false;
    }
  }

  // Single-linkage grouping within the cluster tolerance.
  std::vector<int> label(ev.size(), -1);
  int next_label = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (label[i] < 0) label[i] = next_label++;
    for (std::size_t j = i + 1; j < ev.size(); ++j) {
      if (std::abs(ev[i] - ev[j]) < kClusterTolerance) {
        if (label[j] < 0) {
          label[j] = label[i];
        } else if (label[j] != label[i]) {
          const int from = label[j];
          for (auto& l : label) {
            if (l == from) l = label[i];
          }
        }
      }
    }
  }
  r.clusters.clear();
  std::vector<int> seen;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), label[i]) != seen.end()) continue;
    seen.push_back(label[i]);
    std::complex<double> sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < ev.size(); ++j) {
      if (label[j] == label[i]) {
        sum += ev[j];
        ++count;
      }
    }
    r.clusters.push_back({sum / static_cast<double>(count), count});
  }

  r.resonant = false;
  for (std::size_t i = 0; i < ev.size() && !r.resonant; ++i) {
    for (std::size_t j = i + 1; j < ev.size(); ++j) {
      const auto d = ev[i] - ev[j];
      const double k = std::round(d.real());
      if (k != 0.0 && std::fabs(d.real() - k) < kClusterTolerance &&
          std::fabs(d.imag()) < kClusterTolerance) {
        r.resonant = true;
        break;
      }
    }
  }
}

}  // namespace

int SpectrumResult::multiplicity_of(std::size_t i) const {
  const auto& z = eigenvalues.at(i);
  int best = 1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) {
    const double d = std::abs(c.value - z);
    if (d < best_d) {
      best_d = d;
      best = c.multiplicity;
    }
  }
  return best;
}

bool classify_regime(const CharPolyRecurrence& rec) {
  return std::all_of(rec.a.begin(), rec.a.end(), [](double a) { return a > 0.0; });
}

SpectrumResult eigen_spectrum(const CharPolyRecurrence& rec) {
  const int n = rec.size();
  if (n < 1) throw ValidationError("spectrum of an empty matrix requested");

  // Exact coefficients keep degenerate spectra split only by long double
  // rounding rather than by the rounding of the inputs.
  const auto a_at = [&](int i) -> Real {
    return rec.exact() ? to_long_double((*rec.a_exact)[static_cast<std::size_t>(i - 1)]) : rec.a_at(i);
  };
  const auto b_at = [&](int i) -> Real {
    const auto k = static_cast<std::size_t>(i);
    return rec.exact() ? to_long_double((*rec.b_exact)[k]) : rec.b[k];
  };

  SpectrumResult r;
  r.eigenvalues.reserve(static_cast<std::size_t>(n));
  r.symmetric_path = true;

  // a_k = 0 makes the matrix block triangular; each diagonal block is solved
  // on its own.
  int first = 0;
  while (first < n) {
    int last = first + 1;
    while (last < n && rec.a_at(last) != 0.0) ++last;
    const int m = last - first;
    bool positive = true;
    for (int i = first + 1; i < last; ++i) positive = positive && rec.a_at(i) > 0.0;

    if (positive) {
      // Diagonal similarity to the symmetric matrix with off-diagonals sqrt(a_n).
      VectorR diag(m);
      VectorR off(std::max(m - 1, 0));
      for (int i = 0; i < m; ++i) diag(i) = b_at(first + i);
      for (int i = 1; i < m; ++i) off(i - 1) = std::sqrt(a_at(first + i));
      Eigen::SelfAdjointEigenSolver<MatrixR> solver;
      solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric tridiagonal QL did not converge: " + dump(rec));
      }
      for (int i = 0; i < m; ++i) {
        r.eigenvalues.emplace_back(static_cast<double>(solver.eigenvalues()(i)), 0.0);
      }
    } else {
      r.symmetric_path = false;
      // Balanced form: |M(i,i-1)| = |M(i-1,i)| = sqrt|a_i|, sign carried below.
      MatrixR dense = MatrixR::Zero(m, m);
      for (int i = 0; i < m; ++i) dense(i, i) = b_at(first + i);
      for (int i = 1; i < m; ++i) {
        const Real a = a_at(first + i);
        const Real s = std::sqrt(std::fabs(a));
        dense(i - 1, i) = s;
        dense(i, i - 1) = a < 0 ? -s : s;
      }
      Eigen::EigenSolver<MatrixR> solver(dense, false);
      if (solver.info() != Eigen::Success) {
        throw NumericalError("Hessenberg QR did not converge: " + dump(rec));
      }
      for (int i = 0; i < m; ++i) {
        const auto z = solver.eigenvalues()(i);
        r.eigenvalues.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
      }
    }
    first = last;
  }
  classify(r);
  return r;
}

SpectrumResult eigen_spectrum(const LoewnerMatrices& m) {
  return eigen_spectrum(recurrence_from_matrices(m));
}

double gershgorin_upper(const CharPolyRecurrence& rec) {
  const int n = rec.size();
  double bound = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i >= 1) radius += std::sqrt(std::fabs(rec.a_at(i)));
    if (i + 1 < n) radius += std::sqrt(std::fabs(rec.a_at(i + 1)));
    bound = std::max(bound, rec.b[static_cast<std::size_t>(i)] + radius);
  }
  return bound;
}

double gershgorin_lower(const CharPolyRecurrence& rec) {
  const int n = rec.size();
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i >= 1) radius += std::sqrt(std::fabs(rec.a_at(i)));
    if (i + 1 < n) radius += std::sqrt(std::fabs(rec.a_at(i + 1)));
    bound = std::min(bound, rec.b[static_cast<std::size_t>(i)] - radius);
  }
  return bound;
}

MaxRootResult max_real_root(const CharPolyRecurrence& rec) {
  const int n = rec.size();
  if (n < 1) throw ValidationError("max_real_root needs degree >= 1");

  const double upper = gershgorin_upper(rec);
  const double lower = gershgorin_lower(rec);
  const double margin = 1e-9 * (1.0 + std::max(std::fabs(upper), std::fabs(lower)));
  const double hi0 = upper + margin;
  const double lo0 = lower - margin;
  const int steps = std::max(256, 64 * n);
  const double h = (hi0 - lo0) / steps;

  const auto sign_at = [&](double x) { return charpoly_eval(rec, x).sign(); };

  double x_hi = hi0;
  int s_hi = sign_at(x_hi);
  if (s_hi == 0) return {x_hi, false};
  for (int k = 1; k <= steps; ++k) {
    const double x_lo = hi0 - k * h;
    const int s_lo = sign_at(x_lo);
    if (s_lo == 0) return {x_lo, false};
    if (s_lo != s_hi) {
      double lo = x_lo;
      double hi = x_hi;
      for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (hi - lo <= 1e-12 * std::fabs(mid) || hi - lo < 1e-300) break;
        const int s_mid = sign_at(mid);
        if (s_mid == 0) return {mid, false};
        if (s_mid == s_hi) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return {0.5 * (lo + hi), false};
    }
    x_hi = x_lo;
    s_hi = s_lo;
  }

  const auto spectrum = eigen_spectrum(rec);
  if (std::isnan(spectrum.max_real)) {
    throw NumericalError("characteristic polynomial has no real root: " + dump(rec));
  }
  return {spectrum.max_real, true};
}

int descartes_positive_count(std::span<const double> coeffs) {
  int changes = 0;
  int last = 0;
  for (double c : coeffs) {
    const int s = (c > 0) - (c < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int descartes_positive_count(std::span<const Rational> coeffs) {
  int changes = 0;
  int last = 0;
  for (const auto& c : coeffs) {
    const int s = sgn(c);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

Beta2Report beta2(const EtaSequence& eta, Variant variant, int m_max,
                  const Beta2Options& options) {
  if (m_max < 1) throw ValidationError("m_max must be >= 1");
  if (eta.n_max() < m_max) {
    throw ValidationError("eta covers 1.." + std::to_string(eta.n_max()) +
                          " but m_max = " + std::to_string(m_max));
  }
  const EtaSequence window = eta.prefix(m_max);

  Beta2Report report;
  report.variant = variant;
  report.truncation = truncation_order(window, variant);

  const bool want_sequence = options.with_sequence || !report.truncated();
  if (want_sequence) {
    for (int m = std::min(2, m_max); m <= m_max; ++m) {
      const auto spec = eigen_spectrum(build_matrices(window, m, variant));
      report.sequence.push_back({m, spec.max_real});
    }
    const auto& seq = report.sequence;
    if (seq.size() >= 2) {
      report.convergence_gap = std::fabs(seq.back().beta_max - seq[seq.size() - 2].beta_max);
    }
  }

  if (report.truncated()) {
    const auto spec = eigen_spectrum(build_matrices(window, *report.truncation, variant));
    report.beta2 = spec.max_real;
    report.converged = !std::isnan(spec.max_real);
  } else {
    report.beta2 = report.sequence.back().beta_max;
    report.converged = report.sequence.size() >= 2 && !std::isnan(report.beta2) &&
                       report.convergence_gap < options.convergence_tolerance;
  }
  return report;
}

}  // namespace llespec
