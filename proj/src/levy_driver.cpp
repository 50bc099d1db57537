#include "llespec/levy_driver.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "llespec/errors.hpp"

namespace llespec {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("invalid driver: " + what);
}

std::optional<std::vector<Rational>> recognize_all(std::span<const double> values) {
  std::vector<Rational> exact;
  exact.reserve(values.size());
  for (double v : values) {
    auto q = recognize_rational(v);
    if (!q) return std::nullopt;
    exact.push_back(std::move(*q));
  }
  return exact;
}

}  // namespace

void LevyDriver::validate() const {
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be finite and >= 0");
  require(std::isfinite(uniform_rate) && uniform_rate >= 0.0,
          "uniform_rate must be finite and >= 0");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    const std::string tag = "atoms[" + std::to_string(i) + "]";
    require(std::isfinite(a.angle) && a.angle > 0.0 && a.angle <= std::numbers::pi,
            tag + ".angle must lie in (0, pi]");
    require(std::isfinite(a.rate) && a.rate > 0.0, tag + ".rate must be > 0");
  }
}

EtaSequence::EtaSequence(std::vector<double> values, bool formal,
                         std::optional<std::vector<Rational>> exact)
    : values_(std::move(values)), formal_(formal), exact_(std::move(exact)) {}

double EtaSequence::operator[](int n) const {
  if (n == 0) return 0.0;
  if (n < 0 || n > n_max()) {
    throw ValidationError("eta index " + std::to_string(n) + " outside 0.." +
                          std::to_string(n_max()));
  }
  return values_[static_cast<std::size_t>(n - 1)];
}

std::optional<Rational> EtaSequence::exact_at(int n) const {
  if (!exact_) return std::nullopt;
  if (n == 0) return Rational(0);
  (void)(*this)[n];  // range check
  return (*exact_)[static_cast<std::size_t>(n - 1)];
}

EtaSequence EtaSequence::prefix(int n) const {
  if (n < 0 || n > n_max()) throw ValidationError("eta prefix length out of range");
  std::vector<double> v(values_.begin(), values_.begin() + n);
  std::optional<std::vector<Rational>> e;
  if (exact_) e.emplace(exact_->begin(), exact_->begin() + n);
  return EtaSequence(std::move(v), formal_, std::move(e));
}

EtaSequence eta_sequence(const LevyDriver& driver, int n_max) {
  driver.validate();
  if (n_max < 1) throw ValidationError("n_max must be >= 1");

  std::vector<double> values(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    double eta = 0.5 * driver.kappa * n * n + driver.uniform_rate;
    for (const auto& atom : driver.atoms) eta += atom.rate * (1.0 - std::cos(n * atom.angle));
    values[static_cast<std::size_t>(n - 1)] = eta;
  }

  // Pure Brownian plus uniform jumps stays rational when its parameters are.
  std::optional<std::vector<Rational>> exact;
  if (driver.atoms.empty()) {
    const auto kappa = recognize_rational(driver.kappa);
    const auto rate = recognize_rational(driver.uniform_rate);
    if (kappa && rate) {
      exact.emplace();
      exact->reserve(values.size());
      for (int n = 1; n <= n_max; ++n) {
        Rational eta = *kappa * n * n / 2 + *rate;
        values[static_cast<std::size_t>(n - 1)] = to_double(eta);
        exact->push_back(std::move(eta));
      }
    }
  }
  return EtaSequence(std::move(values), false, std::move(exact));
}

EtaSequence validate_eta(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw ValidationError("eta[" + std::to_string(i + 1) + "] must be finite and >= 0");
    }
  }
  return EtaSequence(std::vector<double>(values.begin(), values.end()), true,
                     recognize_all(values));
}

}  // namespace llespec
