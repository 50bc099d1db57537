#pragma once

#include <optional>
#include <span>
#include <vector>

#include "llespec/rational.hpp"

namespace llespec {

/// A symmetric jump of the driver: the pair of angles +angle and -angle,
/// sharing `rate` evenly. An atom at exactly pi is its own mirror.
struct Atom {
  double angle = 0.0;  ///< in (0, pi]
  double rate = 0.0;   ///< total intensity, > 0
};

/// Drift-free symmetric Levy process on the circle: Brownian part of
/// temperature `kappa`, compound Poisson jumps uniform on the circle with
/// intensity `uniform_rate`, and finitely many symmetric atoms.
struct LevyDriver {
  double kappa = 0.0;
  double uniform_rate = 0.0;
  std::vector<Atom> atoms;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Characteristic exponents eta_1..eta_{n_max}; eta_0 = 0 is implicit and
/// eta_{-n} = eta_n is never stored.
class EtaSequence {
 public:
  EtaSequence() = default;
  EtaSequence(std::vector<double> values, bool formal,
              std::optional<std::vector<Rational>> exact = std::nullopt);

  /// eta_n for 0 <= n <= n_max(); eta(0) == 0.
  double operator[](int n) const;
  int n_max() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }

  /// True when the sequence was supplied directly rather than derived from
  /// a driver; no realizability is claimed for it.
  bool formal() const { return formal_; }

  /// Exact values when every entry is a recognizable rational.
  const std::optional<std::vector<Rational>>& exact() const { return exact_; }
  std::optional<Rational> exact_at(int n) const;

  /// First `n` entries.
  EtaSequence prefix(int n) const;

 private:
  std::vector<double> values_;
  bool formal_ = false;
  std::optional<std::vector<Rational>> exact_;
};

/// eta_n = kappa n^2 / 2 + uniform_rate + sum over atoms rate (1 - cos(n angle)).
EtaSequence eta_sequence(const LevyDriver& driver, int n_max);

/// Accepts any finite nonnegative sequence (index 1 first) as formal input.
EtaSequence validate_eta(std::span<const double> values);

}  // namespace llespec
