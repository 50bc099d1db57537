#pragma once

namespace llespec {

/// Gamma function from a fixed-coefficient Lanczos approximation (g = 7,
/// nine terms) with reflection below 1/2. Throws DomainError at poles.
double gamma_lanczos(double x);

/// 1/Gamma(x), zero at the poles.
double reciprocal_gamma(double x);

/// Gauss hypergeometric 2F1(a, b; c; xi) for 0 <= xi < 1.
///
/// Sums the power series with the term-ratio recurrence until the tail bound
/// drops below 1e-14 of the partial sum. Above xi = 0.75 the z -> 1 - z
/// connection formula is used unless c - a - b is within 1e-3 of an integer,
/// in which case the raw series is summed with a larger budget.
/// Throws DomainError when c is a nonpositive integer and PrecisionError when
/// the term budget runs out.
double gauss_2f1(double a, double b, double c, double xi);

/// 2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)),
/// valid for c - a - b > 0.
double gauss_at_one(double a, double b, double c);

}  // namespace llespec
