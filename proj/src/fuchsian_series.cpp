#include "llespec/fuchsian_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "llespec/errors.hpp"

namespace llespec {

namespace {

// y = M x for a banded matrix.
void multiply(const Tridiagonal& m, std::span<const double> x, std::span<double> y) {
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    double s = m.diag[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    if (i > 0) s += m.sub(i) * x[static_cast<std::size_t>(i - 1)];
    if (i + 1 < n) s += m.super(i) * x[static_cast<std::size_t>(i + 1)];
    y[static_cast<std::size_t>(i)] = s;
  }
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

void require_domain(Variant variant, double xi) {
  const bool ok = variant == Variant::Unbounded ? (xi >= 0.0 && xi < 1.0) : (xi > 1.0);
  if (!ok || std::isnan(xi)) {
    throw DomainError("xi = " + std::to_string(xi) + " outside the series domain (" +
                      (variant == Variant::Unbounded ? "[0, 1)" : "(1, inf]") + ")");
  }
}

// Expansion variable: xi for Unbounded, 1/xi for Bounded.
double expansion_variable(Variant variant, double xi) {
  return variant == Variant::Unbounded ? xi : 1.0 / xi;
}

}  // namespace

FuchsianSystem make_fuchsian_system(const EtaSequence& eta, Variant variant,
                                    std::optional<int> n) {
  if (!n) n = truncation_order(eta, variant);
  if (!n) {
    std::string msg = "eta does not truncate for the " + std::string(to_string(variant)) +
                      " variant; pass an explicit dimension";
    if (auto near = nearest_truncation(eta, variant); near && near->distance < 1e-6) {
      msg += " (eta_" + std::to_string(near->n) + " misses truncation by " +
             std::to_string(near->distance) + "; supply exact values)";
    }
    throw ValidationError(msg);
  }
  return FuchsianSystem(build_matrices(eta, *n, variant));
}

std::vector<double> analytic_null_vector(const LoewnerMatrices& m) {
  std::vector<double> v(static_cast<std::size_t>(m.n), 0.0);
  v[0] = 1.0;
  for (int i = 1; i < m.n; ++i) {
    double pivot = 0.0;
    double coupling = 0.0;
    if (m.variant == Variant::Unbounded) {
      pivot = m.a.diag[static_cast<std::size_t>(i)];
      coupling = m.a.sub(i);
    } else {
      // B - A is lower bidiagonal with a zero first row.
      pivot = m.b.diag[static_cast<std::size_t>(i)] - m.a.diag[static_cast<std::size_t>(i)];
      coupling = m.b.sub(i) - m.a.sub(i);
    }
    if (pivot == 0.0) {
      throw DegeneracyError("zero pivot in row " + std::to_string(i) +
                            " of the residue matrix: the zero exponent is not simple");
    }
    v[static_cast<std::size_t>(i)] = -coupling * v[static_cast<std::size_t>(i - 1)] / pivot;
  }
  return v;
}

CoefficientStream::CoefficientStream(const FuchsianSystem& sys)
    : m_(sys.matrices),
      current_(analytic_null_vector(sys.matrices)),
      prefix_sum_(current_),
      work_(current_.size()) {}

void CoefficientStream::advance() {
  const int n = m_.n;
  const int k = k_;
  auto& c = current_;
  if (m_.variant == Variant::Unbounded) {
    // (A - (k+1)) c_{k+1} = (A - B - k) c_k, A lower bidiagonal.
    std::vector<double> bc(c.size());
    multiply(m_.a, c, work_);
    multiply(m_.b, c, bc);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      work_[u] -= bc[u] + k * c[u];
    }
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double pivot = m_.a.diag[u] - (k + 1);
      if (pivot == 0.0) {
        throw DegeneracyError("singular solve at series order " + std::to_string(k + 1));
      }
      double rhs = work_[u];
      if (i > 0) rhs -= m_.a.sub(i) * c[u - 1];
      c[u] = rhs / pivot;
    }
  } else {
    // ((k+1) - (B - A)) c_{k+1} = B (c_0 + ... + c_k), B - A lower bidiagonal.
    multiply(m_.b, prefix_sum_, work_);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double pivot = (k + 1) - (m_.b.diag[u] - m_.a.diag[u]);
      if (pivot == 0.0) {
        throw DegeneracyError("singular solve at series order " + std::to_string(k + 1));
      }
      double rhs = work_[u];
      if (i > 0) rhs += (m_.b.sub(i) - m_.a.sub(i)) * c[u - 1];
      c[u] = rhs / pivot;
    }
    for (std::size_t u = 0; u < c.size(); ++u) prefix_sum_[u] += c[u];
  }
  ++k_;
}

ThetaSeries::ThetaSeries(Variant variant, int n, std::vector<double> coefficients)
    : variant_(variant), n_(n), coeffs_(std::move(coefficients)) {
  if (n_ < 1 || coeffs_.empty() || coeffs_.size() % static_cast<std::size_t>(n_) != 0) {
    throw ValidationError("malformed series coefficient block");
  }
}

std::span<const double> ThetaSeries::coefficient(int k) const {
  if (k < 0 || k > order()) throw ValidationError("series order out of range");
  return std::span<const double>(coeffs_).subspan(static_cast<std::size_t>(k * n_),
                                                  static_cast<std::size_t>(n_));
}

ThetaSeries series_solution(const FuchsianSystem& sys, int order) {
  if (order < 1) throw ValidationError("series order must be >= 1");
  CoefficientStream stream(sys);
  std::vector<double> coeffs;
  coeffs.reserve(static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(sys.size()));
  for (int k = 0; k <= order; ++k) {
    if (k > 0) stream.advance();
    const auto c = stream.current();
    coeffs.insert(coeffs.end(), c.begin(), c.end());
  }
  return ThetaSeries(sys.variant(), sys.size(), std::move(coeffs));
}

ThetaValue evaluate_theta(const ThetaSeries& series, double xi) {
  const int n = series.size();
  const int order = series.order();
  if (series.variant() == Variant::Bounded && std::isinf(xi) && xi > 0) {
    const auto c0 = series.coefficient(0);
    return {std::vector<double>(c0.begin(), c0.end()), 0.0};
  }
  require_domain(series.variant(), xi);
  const double z = expansion_variable(series.variant(), xi);

  ThetaValue out;
  out.theta.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = order; k >= 0; --k) {
    const auto c = series.coefficient(k);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      out.theta[u] = out.theta[u] * z + c[u];
    }
  }
  if (z > 0.0) {
    const double last = inf_norm(series.coefficient(order)) * std::pow(z, order);
    out.tail_estimate = z < 1.0 ? last * z / (1.0 - z) : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<double> evaluate_theta_derivative(const ThetaSeries& series, double xi) {
  require_domain(series.variant(), xi);
  const int n = series.size();
  const double z = expansion_variable(series.variant(), xi);
  // d/dz sum c_k z^k, then chain rule for z = 1/xi.
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (int k = series.order(); k >= 1; --k) {
    const auto c = series.coefficient(k);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      d[u] = d[u] * z + k * c[u];
    }
  }
  if (series.variant() == Variant::Bounded) {
    for (auto& x : d) x *= -z * z;
  }
  return d;
}

double angular_mean_rho(Variant variant, std::span<const double> theta, double xi) {
  const double t0 = theta[0];
  const double t1 = theta.size() > 1 ? theta[1] : 0.0;
  if (variant == Variant::Unbounded) return (1.0 + xi) * t0 - 2.0 * xi * t1;
  return (1.0 + 1.0 / xi) * t0 - (2.0 / xi) * t1;
}

double angular_mean_rho(const ThetaSeries& series, double xi) {
  const auto v = evaluate_theta(series, xi);
  return angular_mean_rho(series.variant(), v.theta, xi);
}

std::vector<std::vector<double>> integrate_theta(const FuchsianSystem& sys, double xi0,
                                                 std::span<const double> theta0,
                                                 std::span<const double> targets,
                                                 double rtol) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;

  const auto& m = sys.matrices;
  const bool unbounded = sys.variant() == Variant::Unbounded;
  const auto to_t = [](double xi) { return -std::log(std::fabs(1.0 - xi)); };
  const auto to_xi = [&](double t) {
    return unbounded ? 1.0 - std::exp(-t) : 1.0 + std::exp(-t);
  };
  require_domain(sys.variant(), xi0);

  // With s = |1 - xi| = e^{-t}: d theta/dt = B theta -+ s A theta / xi.
  State ax(static_cast<std::size_t>(m.n));
  auto rhs = [&](const State& x, State& dxdt, double t) {
    const double xi = to_xi(t);
    const double s = std::exp(-t);
    multiply(m.b, x, dxdt);
    multiply(m.a, x, ax);
    const double w = (unbounded ? s : -s) / xi;
    for (std::size_t u = 0; u < x.size(); ++u) dxdt[u] += w * ax[u];
  };

  std::vector<double> times{to_t(xi0)};
  for (double xi : targets) {
    require_domain(sys.variant(), xi);
    const double t = to_t(xi);
    if (t < times.back()) throw DomainError("ODE targets must move toward xi = 1");
    times.push_back(t);
  }

  std::vector<State> out;
  State x(theta0.begin(), theta0.end());
  auto stepper = ode::make_controlled(1e-14, rtol, ode::runge_kutta_dopri5<State>());
  const double dt0 = 1e-3;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] > times[i - 1]) {
      ode::integrate_adaptive(stepper, rhs, x, times[i - 1], times[i], dt0);
    }
    out.push_back(x);
  }
  return out;
}

std::vector<double> LadderSpec::points(Variant variant) const {
  if (j_min < 1 || j_max <= j_min) throw ValidationError("ladder needs 1 <= j_min < j_max");
  std::vector<double> xs;
  for (int j = j_min; j <= j_max; ++j) {
    const double d = std::ldexp(1.0, -j);
    xs.push_back(variant == Variant::Unbounded ? 1.0 - d : 1.0 + d);
  }
  return xs;
}

std::string_view to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Auto: return "auto";
    case FitMethod::Series: return "series";
    case FitMethod::Ode: return "ode";
  }
  return "auto";
}

FitMethod parse_fit_method(std::string_view text) {
  if (text == "auto") return FitMethod::Auto;
  if (text == "series") return FitMethod::Series;
  if (text == "ode") return FitMethod::Ode;
  throw ValidationError("unknown fit method '" + std::string(text) + "'");
}

namespace {

// Sums the stream at every ladder point at once. Returns nullopt when the
// nearest point would need more than max_terms.
std::optional<std::vector<std::vector<double>>> ladder_by_series(
    const FuchsianSystem& sys, std::span<const double> xs, const FitOptions& opt,
    long& terms_used) {
  const auto n = static_cast<std::size_t>(sys.size());
  std::vector<double> z(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) z[j] = expansion_variable(sys.variant(), xs[j]);
  const std::size_t nearest = static_cast<std::size_t>(
      std::max_element(z.begin(), z.end()) - z.begin());
  const double z_near = z[nearest];

  std::vector<std::vector<double>> sums(xs.size(), std::vector<double>(n, 0.0));
  std::vector<double> powers(xs.size(), 1.0);
  CoefficientStream stream(sys);
  double prev_norm = 0.0;
  for (long k = 0;; ++k) {
    if (k > 0) stream.advance();
    const auto c = stream.current();
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (std::size_t u = 0; u < n; ++u) sums[j][u] += powers[j] * c[u];
      powers[j] *= z[j];
    }
    const double norm = inf_norm(c);
    if (k >= 16 && k % 32 == 0) {
      double ratio = z_near;
      if (prev_norm > 0.0) ratio = std::max(ratio, z_near * norm / prev_norm);
      if (ratio < 1.0) {
        // powers[nearest] is already z^{k+1}.
        const double tail = norm * powers[nearest] / (1.0 - ratio);
        if (tail < opt.tail_tolerance * inf_norm(sums[nearest])) {
          terms_used = k + 1;
          return sums;
        }
      }
    }
    prev_norm = norm;
    if (k + 1 >= opt.max_terms) return std::nullopt;
  }
}

std::vector<std::vector<double>> ladder_by_ode(const FuchsianSystem& sys,
                                               std::span<const double> xs,
                                               const FitOptions& opt) {
  // Seed well inside the disc of convergence, where a short series is exact.
  const double seed = sys.variant() == Variant::Unbounded ? 0.5 : 2.0;
  const auto series = series_solution(sys, 200);
  const auto theta0 = evaluate_theta(series, seed).theta;
  return integrate_theta(sys, seed, theta0, xs, opt.ode_rtol);
}

}  // namespace

BlowupFit blowup_exponent(const FuchsianSystem& sys, const LadderSpec& ladder,
                          const FitOptions& options) {
  BlowupFit fit;
  fit.xi = ladder.points(sys.variant());

  std::vector<std::vector<double>> thetas;
  if (options.method != FitMethod::Ode) {
    auto by_series = ladder_by_series(sys, fit.xi, options, fit.series_terms);
    if (by_series) {
      thetas = std::move(*by_series);
      fit.method_used = FitMethod::Series;
    } else if (options.method == FitMethod::Series) {
      throw PrecisionError("series tail still above tolerance after " +
                           std::to_string(options.max_terms) +
                           " terms at xi = " + std::to_string(fit.xi.back()) +
                           "; raise the term budget or use the ODE method");
    }
  }
  if (thetas.empty()) {
    thetas = ladder_by_ode(sys, fit.xi, options);
    fit.method_used = FitMethod::Ode;
  }

  for (std::size_t j = 0; j < fit.xi.size(); ++j) {
    fit.mean_rho.push_back(angular_mean_rho(sys.variant(), thetas[j], fit.xi[j]));
  }
  for (std::size_t j = 0; j + 1 < fit.mean_rho.size(); ++j) {
    const double g0 = fit.mean_rho[j];
    const double g1 = fit.mean_rho[j + 1];
    if (g0 == 0.0 || g1 == 0.0 || (g0 < 0) != (g1 < 0)) fit.oscillation_detected = true;
    const double d0 = std::fabs(1.0 - fit.xi[j]);
    const double d1 = std::fabs(1.0 - fit.xi[j + 1]);
    fit.slopes.push_back(std::log(std::fabs(g1) / std::fabs(g0)) / std::log(d0 / d1));
  }
  fit.xi_far = fit.xi.front();
  fit.xi_near = fit.xi.back();

  // Aitken extrapolation of the slope sequence when it converges
  // geometrically; otherwise the last slope.
  const auto& s = fit.slopes;
  fit.beta_est = s.back();
  if (s.size() >= 3) {
    const double d1 = s[s.size() - 2] - s[s.size() - 3];
    const double d2 = s.back() - s[s.size() - 2];
    if (d1 != 0.0) {
      const double q = d2 / d1;
      if (std::fabs(q) < 0.9) fit.beta_est = s.back() + d2 * q / (1.0 - q);
    }
  }
  for (double x : s) fit.residual = std::max(fit.residual, std::fabs(x - fit.beta_est));
  return fit;
}

}  // namespace llespec
