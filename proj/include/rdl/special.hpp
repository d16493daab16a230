#pragma once

// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a), evaluated in the
// log domain so that a up to ~1e4 neither underflows nor loses the prefactor to
// cancellation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "rdl/errors.hpp"

namespace rdl {

namespace detail {

/// log1p(t) - t without cancellation near t = 0.
inline double log1pmx(double t) {
  if (std::abs(t) > 0.25) return std::log1p(t) - t;
  // -t^2/2 + t^3/3 - t^4/4 + ...
  double term = t;
  double sum = 0.0;
  for (int k = 2; k < 200; ++k) {
    term *= -t;
    const double add = term / k;
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

/// lgamma(a) - [(a - 1/2) ln a - a + ln(2π)/2], valid for a >= 10.
inline double stirling_correction(double a) {
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
}

/// ln(x^a e^{-x} / Γ(a)).
inline double log_gamma_prefactor(double a, double x) {
  if (a < 10.0) return a * std::log(x) - x - std::lgamma(a);
  const double t = (x - a) / a;
  return 0.5 * std::log(a) + a * log1pmx(t) - 0.5 * std::log(2.0 * std::numbers::pi) -
         stirling_correction(a);
}

}  // namespace detail

/// ln Q(a, x) for a >= 1 (integral a in all uses), x >= 0.
inline double log_reg_upper_gamma(double a, double x) {
  if (!(a >= 1.0) || !std::isfinite(a)) throw domain_error("log_reg_upper_gamma: need a >= 1");
  if (!(x >= 0.0)) throw domain_error("log_reg_upper_gamma: need x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();

  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 1'000'000;
  const double log_pre = detail::log_gamma_prefactor(a, x);

  if (x < a + 1.0) {
    // P(a,x) = x^a e^{-x} / Γ(a+1) * sum_k x^k / ((a+1)...(a+k))
    double term = 1.0;
    double sum = 1.0;
    double denom = a;
    for (int k = 1; k < kMaxIter; ++k) {
      denom += 1.0;
      term *= x / denom;
      sum += term;
      if (term < kEps * sum) {
        const double lower = std::exp(log_pre - std::log(a) + std::log(sum));
        return std::log1p(-lower);
      }
    }
    throw numeric_error("log_reg_upper_gamma: series did not converge");
  }

  // Modified Lentz evaluation of the continued fraction for Γ(a,x) e^x x^{-a}.
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 4.0 * kEps) return log_pre + std::log(h);
  }
  throw numeric_error("log_reg_upper_gamma: continued fraction did not converge");
}

inline double reg_upper_gamma(double a, double x) { return std::exp(log_reg_upper_gamma(a, x)); }

}  // namespace rdl
