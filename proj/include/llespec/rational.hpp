#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace llespec {

using Rational = mpq_class;

/// Recovers p/q with q <= max_denominator whose correctly rounded double is
/// exactly `x`. Returns nullopt for non-finite input or when no such fraction
/// exists (the value is then treated as irrational for exact arithmetic).
std::optional<Rational> recognize_rational(double x, long max_denominator = 1L << 20);

double to_double(const Rational& q);

/// Nearest long double, to within one unit in its last place.
long double to_long_double(const Rational& q);

/// Parses "p/q", an integer or a decimal literal. Throws ValidationError.
Rational parse_rational(const std::string& text);

}  // namespace llespec
