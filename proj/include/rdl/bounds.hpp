#pragma once

// Sample-complexity bounds, all evaluated as log10 so that n up to 10⁴ never
// overflows. Constants (0.01, 1.98, 0.99, 8, ln 4/δ) are kept explicit because
// the advantage contours depend on them.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"
#include "rdl/parallel.hpp"
#include "rdl/random.hpp"
#include "rdl/special.hpp"

namespace rdl {

struct BoundQuery {
  std::size_t n = 8;
  double kappa = 1.0;
  double eps = 0.2;
  double delta = 1.0 / 3.0;
  double sigma = 0.0;  // channel width; 0 is the sharp-peak limit

  /// σ_γ² of the hidden-peak prior: 2σ_γ² = 0.99κ.
  double sigma_gamma_sq() const noexcept { return 0.99 * kappa / 2.0; }
};

enum class BoundKind { ef_main, ef_finite_sigma, ef_gaussian, ea_upper };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::ef_main: return "EF_main";
    case BoundKind::ef_finite_sigma: return "EF_finite_sigma";
    case BoundKind::ef_gaussian: return "EF_gaussian";
    case BoundKind::ea_upper: return "EA_upper";
  }
  return "?";
}

struct BoundResult {
  double log10_N = 0.0;
  bool valid = true;
  BoundKind which = BoundKind::ef_main;
  std::string reason;     // empty when valid
  int active_branch = 0;  // Gaussian-scheme bound: 1 = (1+0.99κ/σ²)^{n/2}, 2 = finite-σ base
};

namespace detail {

inline void check_query(const BoundQuery& q) {
  if (q.n == 0) throw domain_error("bounds: n must be >= 1");
  if (!(q.kappa >= 0.0) || !std::isfinite(q.kappa)) throw domain_error("bounds: kappa must be finite and >= 0");
  if (!(q.eps > 0.0)) throw domain_error("bounds: eps must be > 0");
  if (!(q.delta > 0.0 && q.delta < 1.0)) throw domain_error("bounds: delta must lie in (0, 1)");
  if (!(q.sigma >= 0.0) || !std::isfinite(q.sigma)) throw domain_error("bounds: sigma must be finite and >= 0");
}

/// Shared premise of the entanglement-free bounds: n >= 8 and ε <= 0.24.
inline std::string ef_premise(const BoundQuery& q) {
  if (q.n < 8) return "requires n >= 8";
  if (q.eps > 0.24) return "requires eps <= 0.24";
  return {};
}

/// log10 of 0.01 ε⁻² (1 + 1.98κ/(1+2σ²))ⁿ. At σ = 0 the denominator is exactly 1.
inline double log10_ef_finite(const BoundQuery& q) {
  const double base = 1.0 + 1.98 * q.kappa / (1.0 + 2.0 * q.sigma * q.sigma);
  return -2.0 - 2.0 * std::log10(q.eps) + static_cast<double>(q.n) * std::log10(base);
}

}  // namespace detail

/// max{1 - 1.98κ, √(y²+1) - y} with y = 0.99κ; the second term equals 0.99κ(√(1+(0.99κ)⁻²) - 1).
inline double finite_sigma_threshold(double kappa) {
  const double y = 0.99 * kappa;
  return std::max(1.0 - 1.98 * kappa, 1.0 / (std::sqrt(y * y + 1.0) + y));
}

inline bool finite_sigma_condition(const BoundQuery& q) {
  return 2.0 * q.sigma * q.sigma <= finite_sigma_threshold(q.kappa);
}

/// N >= 0.01 ε⁻² (1+1.98κ)ⁿ for every entanglement-free scheme.
inline BoundResult lower_bound_ef(const BoundQuery& q) {
  detail::check_query(q);
  BoundQuery sharp = q;
  sharp.sigma = 0.0;
  BoundResult res{detail::log10_ef_finite(sharp), true, BoundKind::ef_main, detail::ef_premise(q), 0};
  res.valid = res.reason.empty();
  return res;
}

/// N >= 0.01 ε⁻² (1 + 1.98κ/(1+2σ²))ⁿ, subject to the σ condition.
inline BoundResult lower_bound_ef_finite_sigma(const BoundQuery& q) {
  detail::check_query(q);
  BoundResult res{detail::log10_ef_finite(q), true, BoundKind::ef_finite_sigma, detail::ef_premise(q), 0};
  if (res.reason.empty() && !finite_sigma_condition(q)) res.reason = "2 sigma^2 exceeds the finite-sigma threshold";
  res.valid = res.reason.empty();
  return res;
}

/// Entanglement-free Gaussian schemes: 0.01 ε⁻² min{(1+0.99κ/σ²)^{n/2}, (1+1.98κ/(1+2σ²))ⁿ}.
inline BoundResult lower_bound_ef_gaussian(const BoundQuery& q) {
  detail::check_query(q);
  if (q.sigma == 0.0) throw domain_error("lower_bound_ef_gaussian: sigma must be > 0 (use lower_bound_ef)");
  const double prefactor = -2.0 - 2.0 * std::log10(q.eps);
  const double n = static_cast<double>(q.n);
  const double first = prefactor + 0.5 * n * std::log10(1.0 + 0.99 * q.kappa / (q.sigma * q.sigma));
  const double second = detail::log10_ef_finite(q);
  BoundResult res{std::min(first, second), true, BoundKind::ef_gaussian, detail::ef_premise(q),
                  first < second ? 1 : 2};
  res.valid = res.reason.empty();
  return res;
}

/// Worst case over |β|² <= κn of the TMSV+BM sample count: 8 e^{2e^{-2 r_eff}κn} ε⁻² ln(4/δ).
inline BoundResult upper_bound_ea(const BoundQuery& q, double r_eff) {
  detail::check_query(q);
  const double units = std::isinf(r_eff) && r_eff > 0.0 ? 0.0 : std::exp(-2.0 * r_eff);
  const double exponent = 2.0 * units * q.kappa * static_cast<double>(q.n);
  const double log10_n = std::log10(8.0) + exponent / std::numbers::ln10 - 2.0 * std::log10(q.eps) +
                         std::log10(std::log(4.0 / q.delta));
  return {log10_n, true, BoundKind::ea_upper, {}, 0};
}

inline BoundResult lower_bound(const BoundQuery& q, BoundKind variant) {
  switch (variant) {
    case BoundKind::ef_main: return lower_bound_ef(q);
    case BoundKind::ef_finite_sigma: return lower_bound_ef_finite_sigma(q);
    case BoundKind::ef_gaussian: return lower_bound_ef_gaussian(q);
    case BoundKind::ea_upper: break;
  }
  throw domain_error("lower_bound: EA_upper is not a lower bound");
}

/// log10(N_lower / N_upper); validity follows the lower bound's.
inline BoundResult advantage_ratio(const BoundQuery& q, double r_eff, BoundKind ef_variant = BoundKind::ef_main) {
  BoundResult lower = lower_bound(q, ef_variant);
  lower.log10_N -= upper_bound_ea(q, r_eff).log10_N;
  return lower;
}

// ---------------------------------------------------------------------------
// Gaussian tail of the hidden-peak prior

/// Pr(|γ|² > κn) for γ with 2σ_γ² = 0.99κ, i.e. Q(n, n/0.99). κ cancels.
inline double gaussian_tail(std::size_t n, double kappa) {
  if (n == 0) throw domain_error("gaussian_tail: n must be >= 1");
  if (!(kappa > 0.0)) throw domain_error("gaussian_tail: kappa must be > 0");
  const double nd = static_cast<double>(n);
  return reg_upper_gamma(nd, nd / 0.99);
}

/// (k e^{1-k})ⁿ with k = 1/0.99, an upper bound on gaussian_tail.
inline double gaussian_tail_bound(std::size_t n) {
  const double k = 1.0 / 0.99;
  return std::exp(static_cast<double>(n) * (std::log(k) + 1.0 - k));
}

// ---------------------------------------------------------------------------
// Coherent-state saturation

inline double coherent_saturation_closed_form(std::size_t n, double sigma, double sigma_gamma_sq) {
  const double s = 1.0 + 2.0 * sigma * sigma;
  return std::pow(s / (s + 4.0 * sigma_gamma_sq), static_cast<double>(n));
}

/// σ² <= max{½ - 2σ_γ², σ_γ²(√(1 + 1/(4σ_γ⁴)) - 1)}.
inline bool coherent_saturation_condition(double sigma, double sigma_gamma_sq) {
  const double t = sigma_gamma_sq;
  const double second = t > 0.0 ? t * (std::sqrt(1.0 + 1.0 / (4.0 * t * t)) - 1.0) : 0.5;
  return sigma * sigma <= std::max(0.5 - 2.0 * t, second);
}

struct SaturationResult {
  double mc_estimate = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  bool condition_ok = true;
};

/// Monte Carlo E_γ[e^{-2|γ|²/(1+2σ²)}], γ ∈ Cⁿ with per-quadrature variance σ_γ².
/// Chunk c of 4096 draws uses stream.split(c).
inline SaturationResult coherent_saturation(std::size_t n, double sigma, double sigma_gamma_sq, std::size_t M,
                                      const RandomStream& stream, unsigned threads = 1) {
  if (n == 0 || M == 0) throw domain_error("coherent_saturation: need n >= 1 and M >= 1");
  if (!(sigma_gamma_sq >= 0.0)) throw domain_error("coherent_saturation: sigma_gamma_sq must be >= 0");
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (M + kChunk - 1) / kChunk;
  const double rate = 2.0 / (1.0 + 2.0 * sigma * sigma);
  std::vector<double> sums(chunks, 0.0), sq_sums(chunks, 0.0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto gen = stream.split(c).generator();
    std::vector<cplx> gamma(n);
    const std::size_t end = std::min(M, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      fill_gaussian(gen, sigma_gamma_sq, gamma);
      const double f = std::exp(-rate * norm_sq(gamma));
      sums[c] += f;
      sq_sums[c] += f * f;
    }
  });
  double sum = 0.0, sq = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    sq += sq_sums[c];
  }
  const double m = static_cast<double>(M);
  const double mean = sum / m;
  const double var = std::max(0.0, sq / m - mean * mean);
  return {mean, std::sqrt(var / m), coherent_saturation_closed_form(n, sigma, sigma_gamma_sq),
          coherent_saturation_condition(sigma, sigma_gamma_sq)};
}

}  // namespace rdl
