#include "llespec/loewner_system.hpp"

#include <cmath>
#include <string>

#include "llespec/errors.hpp"

namespace llespec {

std::string_view to_string(Variant v) {
  return v == Variant::Unbounded ? "unbounded" : "bounded";
}

Variant parse_variant(std::string_view text) {
  if (text == "unbounded") return Variant::Unbounded;
  if (text == "bounded") return Variant::Bounded;
  throw ValidationError("unknown variant '" + std::string(text) +
                        "' (expected unbounded or bounded)");
}

Eigen::MatrixXd Tridiagonal::dense() const {
  const int n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag[static_cast<std::size_t>(i)];
    if (i > 0) m(i, i - 1) = sub(i);
    if (i + 1 < n) m(i, i + 1) = super(i);
  }
  return m;
}

namespace {

void check_size(const EtaSequence& eta, int n) {
  if (n < 1) throw ValidationError("matrix size must be >= 1, got " + std::to_string(n));
  if (eta.n_max() < n - 1) {
    throw ValidationError("eta covers 1.." + std::to_string(eta.n_max()) + " but size " +
                          std::to_string(n) + " needs 1.." + std::to_string(n - 1));
  }
}

Tridiagonal empty_bands(int n) {
  Tridiagonal t;
  t.diag.assign(static_cast<std::size_t>(n), 0.0);
  t.lower.assign(static_cast<std::size_t>(n - 1), 0.0);
  t.upper.assign(static_cast<std::size_t>(n - 1), 0.0);
  return t;
}

// Generic entries of row i >= 1. The first row is special-cased by callers.
template <class T>
struct RowEntries {
  T b_sub, b_diag, b_super;
  T a_sub, a_diag, a_super;
};

template <class T>
RowEntries<T> unbounded_row(const T& eta, int i) {
  return {T((eta - i - 2) / 2), T(3 - eta), T((eta + i - 2) / 2),
          T((eta - i - 2) / 2), T(-(eta + i) / 2), T(0)};
}

template <class T>
RowEntries<T> bounded_row(const T& eta, int i) {
  return {T((eta + 2 - i) / 2), T(-eta - 1), T((eta + i + 2) / 2),
          T(0), T(-(eta + 2 - i) / 2), T((eta + i + 2) / 2)};
}

// a_n = B(n, n-1) B(n-1, n) and b_n = B(n, n), evaluated from the same row
// expressions as build_matrices so the identity holds bit for bit; n = 1 picks
// up the doubled first-row super-diagonal (-2 resp. 2).
template <class T>
void fill_recurrence(Variant variant, int n, const auto& eta_at, std::vector<T>& a,
                     std::vector<T>& b) {
  const auto row = [&](int i) {
    return variant == Variant::Unbounded ? unbounded_row<T>(eta_at(i), i)
                                         : bounded_row<T>(eta_at(i), i);
  };
  a.clear();
  b.clear();
  b.push_back(variant == Variant::Unbounded ? T(3) : T(-1));
  T prev_super = variant == Variant::Unbounded ? T(-2) : T(2);
  for (int i = 1; i < n; ++i) {
    const auto r = row(i);
    b.push_back(r.b_diag);
    a.push_back(r.b_sub * prev_super);
    prev_super = r.b_super;
  }
}

}  // namespace

LoewnerMatrices build_matrices(const EtaSequence& eta, int n, Variant variant) {
  check_size(eta, n);
  LoewnerMatrices m{variant, n, empty_bands(n), empty_bands(n), std::nullopt};

  // First rows as displayed: unbounded B = (3, -2), A = 0; bounded
  // B = A = (-1, 2).
  if (variant == Variant::Unbounded) {
    m.b.diag[0] = 3.0;
    if (n > 1) m.b.upper[0] = -2.0;
  } else {
    m.b.diag[0] = -1.0;
    m.a.diag[0] = -1.0;
    if (n > 1) {
      m.b.upper[0] = 2.0;
      m.a.upper[0] = 2.0;
    }
  }

  for (int i = 1; i < n; ++i) {
    const auto row = variant == Variant::Unbounded ? unbounded_row<double>(eta[i], i)
                                                   : bounded_row<double>(eta[i], i);
    const auto k = static_cast<std::size_t>(i);
    m.b.lower[k - 1] = row.b_sub;
    m.b.diag[k] = row.b_diag;
    m.a.lower[k - 1] = row.a_sub;
    m.a.diag[k] = row.a_diag;
    if (i + 1 < n) {
      m.b.upper[k] = row.b_super;
      m.a.upper[k] = row.a_super;
    }
  }
  if (eta.exact()) {
    std::vector<Rational> exact;
    for (int i = 1; i < n; ++i) exact.push_back(*eta.exact_at(i));
    m.eta_exact = std::move(exact);
  }
  return m;
}

CharPolyRecurrence recurrence_from_matrices(const LoewnerMatrices& m) {
  CharPolyRecurrence rec;
  rec.variant = m.variant;
  rec.b = m.b.diag;
  for (int i = 1; i < m.n; ++i) rec.a.push_back(m.b.sub(i) * m.b.super(i - 1));
  if (m.eta_exact) {
    std::vector<Rational> a, b;
    fill_recurrence<Rational>(
        m.variant, m.n, [&](int i) { return (*m.eta_exact)[static_cast<std::size_t>(i - 1)]; }, a, b);
    rec.a_exact = std::move(a);
    rec.b_exact = std::move(b);
  }
  return rec;
}

CharPolyRecurrence recurrence_coefficients(const EtaSequence& eta, int n, Variant variant) {
  check_size(eta, n);
  CharPolyRecurrence rec;
  rec.variant = variant;
  fill_recurrence<double>(variant, n, [&](int i) { return eta[i]; }, rec.a, rec.b);
  if (eta.exact()) {
    std::vector<Rational> a, b;
    fill_recurrence<Rational>(variant, n, [&](int i) { return *eta.exact_at(i); }, a, b);
    rec.a_exact = std::move(a);
    rec.b_exact = std::move(b);
  }
  return rec;
}

namespace {

constexpr double kRescaleHigh = 1e64;
constexpr double kRescaleLow = 1e-64;

template <class T>
ScaledValue<T> eval_scaled(const CharPolyRecurrence& rec, T beta) {
  T prev{0.0};
  T cur{1.0};
  double log_scale = 0.0;
  const int n = rec.size();
  for (int k = 0; k < n; ++k) {
    const double a = k == 0 ? 0.0 : rec.a_at(k);
    const T next = (beta - rec.b[static_cast<std::size_t>(k)]) * cur - a * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > kRescaleHigh || (mag < kRescaleLow && mag > 0.0)) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
    }
  }
  return {cur, log_scale};
}

template <class T>
std::vector<T> expand(const std::vector<T>& a, const std::vector<T>& b) {
  // Coefficient vectors, constant term first.
  std::vector<T> prev;       // P_{-1} = 0
  std::vector<T> cur{T(1)};  // P_0 = 1
  for (std::size_t k = 0; k < b.size(); ++k) {
    std::vector<T> next(cur.size() + 1, T(0));
    for (std::size_t j = 0; j < cur.size(); ++j) {
      next[j + 1] += cur[j];
      next[j] -= b[k] * cur[j];
    }
    if (k > 0) {
      for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= a[k - 1] * prev[j];
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

ScaledReal charpoly_eval(const CharPolyRecurrence& rec, double beta) {
  const auto v = eval_scaled<double>(rec, beta);
  return ScaledReal{{v.mantissa, v.log_scale}};
}

ScaledValue<std::complex<double>> charpoly_eval(const CharPolyRecurrence& rec,
                                                std::complex<double> beta) {
  return eval_scaled<std::complex<double>>(rec, beta);
}

CharPolyCoefficients charpoly_coefficients(const CharPolyRecurrence& rec, int limit) {
  if (rec.size() > limit) {
    throw CapacityError("characteristic polynomial degree " + std::to_string(rec.size()) +
                        " exceeds coefficient limit " + std::to_string(limit));
  }
  CharPolyCoefficients out;
  if (rec.exact()) {
    auto exact = expand<Rational>(*rec.a_exact, *rec.b_exact);
    out.values.reserve(exact.size());
    for (const auto& q : exact) out.values.push_back(to_double(q));
    out.exact = std::move(exact);
  } else {
    out.values = expand<double>(rec.a, rec.b);
  }
  return out;
}

namespace {

double truncation_target(int n, Variant variant) {
  return variant == Variant::Unbounded ? n + 2.0 : n - 2.0;
}

}  // namespace

std::optional<int> truncation_order(const EtaSequence& eta, Variant variant) {
  for (int n = 1; n <= eta.n_max(); ++n) {
    if (std::fabs(eta[n] - truncation_target(n, variant)) < kTruncationTolerance) return n;
  }
  return std::nullopt;
}

std::optional<NearTruncation> nearest_truncation(const EtaSequence& eta, Variant variant) {
  std::optional<NearTruncation> best;
  for (int n = 1; n <= eta.n_max(); ++n) {
    const double d = std::fabs(eta[n] - truncation_target(n, variant));
    if (!best || d < best->distance) best = NearTruncation{n, d};
  }
  return best;
}

}  // namespace llespec
