#include "llespec/rational.hpp"

#include <cmath>

#include "llespec/errors.hpp"

namespace llespec {

double to_double(const Rational& q) {
  if (q == 0) return 0.0;
  // mpf_get_d truncates toward zero; pick the nearer of the two neighbours.
  const mpf_class f(q, 256);
  const double lo = f.get_d();
  const double hi = std::nextafter(lo, q > 0 ? INFINITY : -INFINITY);
  if (!std::isfinite(hi)) return lo;
  return abs(q - Rational(lo)) <= abs(Rational(hi) - q) ? lo : hi;
}

std::optional<Rational> recognize_rational(double x, long max_denominator) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == std::floor(x) && std::fabs(x) < 9.0e15) {
    return Rational(mpz_class(static_cast<long>(x)));
  }
  // Continued-fraction convergents of |x|.
  const bool negative = x < 0;
  double r = std::fabs(x);
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(r));
  mpz_class k_prev = 0, k = 1;
  double frac = r - std::floor(r);
  for (int iter = 0; iter < 64; ++iter) {
    Rational candidate(negative ? mpz_class(-h) : h, k);
    candidate.canonicalize();
    if (to_double(candidate) == x) return candidate;
    if (frac < 1e-300) break;
    const double inv = 1.0 / frac;
    if (inv > static_cast<double>(max_denominator)) break;
    const long a = static_cast<long>(std::floor(inv));
    frac = inv - std::floor(inv);
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_denominator) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

long double to_long_double(const Rational& q) {
  const double head = to_double(q);
  if (!std::isfinite(head)) return head;
  const Rational rest = q - Rational(head);
  return static_cast<long double>(head) + static_cast<long double>(to_double(rest));
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      Rational q(mpz_class(text.substr(0, slash)), mpz_class(text.substr(slash + 1)));
      if (q.get_den() == 0) throw ValidationError("zero denominator in '" + text + "'");
      q.canonicalize();
      return q;
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    if (auto q = recognize_rational(v)) return *q;
    return Rational(v);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number '" + text + "'");
  }
}

}  // namespace llespec
