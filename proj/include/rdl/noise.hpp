#pragma once

// Analytic noise envelopes of the TMSV + Bell-measurement scheme.
//
// The estimator of λ(β) divides the empirical Fourier mean by the input state's
// characteristic function g(β*, β); the sample count therefore scales with
// 1/|g|². Each routine here returns that |g|² (or the ingredients for it) for
// a particular imperfection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"

namespace rdl {

// ---------------------------------------------------------------------------
// Effective squeezing

/// e^{-2 r_eff} = T_b e^{-2r} + e^{-2s}/T_a + (1 - T_b) + (1 - T_a)/T_a.
inline double effective_noise_units(double r, double t_before, double t_after,
                                    double s = std::numeric_limits<double>::infinity()) {
  if (!(t_before > 0.0) || t_before > 1.0) throw domain_error("effective squeezing: T_b must lie in (0, 1]");
  if (!(t_after > 0.0) || t_after > 1.0) throw domain_error("effective squeezing: T_a must lie in (0, 1]");
  if (!(r >= 0.0)) throw domain_error("effective squeezing: r must be >= 0");
  if (!(s >= 0.0)) throw domain_error("effective squeezing: s must be >= 0");
  return (t_before * std::exp(-2.0 * r) + std::exp(-2.0 * s) / t_after) + (1.0 - t_before) +
         (1.0 - t_after) / t_after;
}

inline double r_eff(double r, double t_before, double t_after,
                    double s = std::numeric_limits<double>::infinity()) {
  const double units = effective_noise_units(r, t_before, t_after, s);
  if (t_before == 1.0 && t_after == 1.0 && std::isinf(s)) return r;
  return -0.5 * std::log(units);
}

// ---------------------------------------------------------------------------
// TMSV characteristic function

/// g(ω₁, ω₂, r) = exp(-½ Σ_j [(|ω₁ⱼ|² + |ω₂ⱼ|²) cosh 2r - 2 Re(ω₁ⱼ ω₂ⱼ) sinh 2r]).
///
/// Evaluated as exp(-¼ Σ_j [e^{2r}|ω₁ⱼ - ω₂ⱼ*|² + e^{-2r}|ω₁ⱼ + ω₂ⱼ*|²]), which is the
/// same quantity without the cosh/sinh cancellation at large r.
inline double g_tmsv(std::span<const cplx> w1, std::span<const cplx> w2, double r) {
  require_same_length(w1.size(), w2.size(), "g_tmsv");
  double anti = 0.0;
  double squeezed = 0.0;
  for (std::size_t j = 0; j < w1.size(); ++j) {
    anti += std::norm(w1[j] - std::conj(w2[j]));
    squeezed += std::norm(w1[j] + std::conj(w2[j]));
  }
  double exponent = 0.0;
  if (anti != 0.0) exponent += std::exp(2.0 * r) * anti;
  if (squeezed != 0.0) exponent += std::exp(-2.0 * r) * squeezed;
  return std::exp(-0.25 * exponent);
}

struct NoiseEnvelope {
  ComplexVec beta;
  double g_sq = 1.0;
  double overhead = 1.0;  // 1 / g_sq
};

inline NoiseEnvelope make_envelope(const ComplexVec& beta, double g_sq) {
  return {beta, g_sq, g_sq > 0.0 ? 1.0 / g_sq : std::numeric_limits<double>::infinity()};
}

/// |g(β*, β, r)|² = exp(-2 e^{-2r} |β|²).
inline double noiseless_g_sq(double beta_norm_sq, double r) {
  return std::exp(-2.0 * std::exp(-2.0 * r) * beta_norm_sq);
}

// ---------------------------------------------------------------------------
// Phase diffusion

namespace detail {

/// log E_{φ_A, φ_B ~ N(0, Δ²)} g(β* e^{iφ_A}, β e^{iφ_B}, r) for one mode with |β|² = mag_sq.
///
/// The integrand only sees ψ = φ_A + φ_B ~ N(0, 2Δ²):
///   g = exp(-|β|² [e^{-2r} + 2 sinh(2r) sin²(ψ/2)]),
/// so the noiseless factor comes out exactly and the rest is a 1-D integral in (0, 1].
inline double log_phase_averaged_g_mode(double mag_sq, double r, double delta_rad) {
  const double sd = std::numbers::sqrt2 * delta_rad;
  const double k = 2.0 * mag_sq * std::sinh(2.0 * r);
  auto f = [&](double psi) {
    const double s = std::sin(0.5 * psi);
    const double u = psi / sd;
    return std::exp(-k * s * s - 0.5 * u * u);
  };
  double err = 0.0;
  // Even integrand; the Gaussian weight is below e^{-72} past 12 sd.
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 12.0 * sd, 20, 1e-13, &err);
  const double integral = 2.0 * half / (sd * std::sqrt(2.0 * std::numbers::pi));
  if (!(integral > 0.0) || !std::isfinite(integral) || err > 1e-9 * half)
    throw numeric_error("phase_diffusion_g_sq: quadrature did not converge");
  return -mag_sq * std::exp(-2.0 * r) + std::log(std::min(1.0, integral));
}

}  // namespace detail

/// |g_Δ(β*, β)|² for TMSV inputs whose two arms suffer independent Gaussian phase noise of std Δ.
inline NoiseEnvelope phase_diffusion_g_sq(const ComplexVec& beta, double r, double delta_rad) {
  if (!(delta_rad >= 0.0) || !std::isfinite(delta_rad)) throw domain_error("phase_diffusion_g_sq: need Δ >= 0");
  if (delta_rad == 0.0) return make_envelope(beta, noiseless_g_sq(beta.norm_sq(), r));
  // Per-mode values depend only on |β_j|; reuse them across equal-magnitude modes.
  std::vector<std::pair<double, double>> cache;
  double log_g = 0.0;
  for (const auto& bj : beta) {
    const double mag_sq = std::norm(bj);
    if (mag_sq == 0.0) continue;
    double value = 0.0;
    bool hit = false;
    for (const auto& [key, val] : cache)
      if (key == mag_sq) {
        value = val;
        hit = true;
        break;
      }
    if (!hit) {
      value = detail::log_phase_averaged_g_mode(mag_sq, r, delta_rad);
      cache.emplace_back(mag_sq, value);
    }
    log_g += value;
  }
  return make_envelope(beta, std::exp(2.0 * log_g));
}

// ---------------------------------------------------------------------------
// Bell-measurement crosstalk

inline void check_crosstalk_angle(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) >= std::numbers::pi / 4.0 ||
      std::abs(std::sin(theta) - std::cos(theta)) < 1e-12)
    throw domain_error("crosstalk: |θ| must be < π/4 (sin θ - cos θ vanishes at π/4)");
}

/// β^θ with Re β^θ = ((cosθ - sinθ)/(sinθ + cosθ)) Re β and Im β^θ = ((sinθ + cosθ)/(sinθ - cosθ)) Im β.
inline ComplexVec crosstalk_partner(const ComplexVec& beta, double theta) {
  check_crosstalk_angle(theta);
  const double s = std::sin(theta), c = std::cos(theta);
  const double re_factor = (c - s) / (s + c);
  const double im_factor = (s + c) / (s - c);
  ComplexVec out(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) out[j] = {re_factor * beta[j].real(), im_factor * beta[j].imag()};
  return out;
}

/// |g(β^θ, β, r)|² cos^{2n}(2θ).
inline NoiseEnvelope crosstalk_envelope(const ComplexVec& beta, double r, double theta) {
  const ComplexVec partner = crosstalk_partner(beta, theta);
  const double g = g_tmsv(partner.view(), beta.view(), r);
  const auto n = static_cast<double>(beta.size());
  const double log_g_sq = 2.0 * std::log(g) + 2.0 * n * std::log(std::cos(2.0 * theta));
  return make_envelope(beta, std::exp(log_g_sq));
}

// ---------------------------------------------------------------------------
// General input states

/// 8 ε⁻² ln(4/δ) / |g|²; +inf when g_sq == 0.
inline double sample_overhead(double g_sq, double eps, double delta) {
  if (!(g_sq >= 0.0) || g_sq > 1.0) throw domain_error("sample_overhead: g_sq must lie in [0, 1]");
  if (!(eps > 0.0)) throw domain_error("sample_overhead: eps must be > 0");
  if (!(delta > 0.0) || !(delta < 1.0)) throw domain_error("sample_overhead: delta must lie in (0, 1)");
  if (g_sq == 0.0) return std::numeric_limits<double>::infinity();
  return 8.0 / g_sq / (eps * eps) * std::log(4.0 / delta);
}

}  // namespace rdl
