#pragma once

// Unbiased characteristic-function estimators and Hoeffding sample sizing.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rdl/channels.hpp"
#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"
#include "rdl/measurement.hpp"
#include "rdl/noise.hpp"
#include "rdl/parallel.hpp"
#include "rdl/random.hpp"

namespace rdl {

struct EstimateResult {
  ComplexVec beta;
  cplx lambda_hat;
  double std_error = 0.0;
  std::size_t N = 0;
  double envelope = 1.0;
};

namespace detail {

/// Running mean/variance (divide-by-N) of a stream of unit-modulus terms.
struct KernelMoments {
  std::size_t count = 0;
  double mean_re = 0.0, mean_im = 0.0;
  double m2_re = 0.0, m2_im = 0.0;

  void add(cplx k) {
    ++count;
    const double c = static_cast<double>(count);
    const double d_re = k.real() - mean_re;
    const double d_im = k.imag() - mean_im;
    mean_re += d_re / c;
    mean_im += d_im / c;
    m2_re += d_re * (k.real() - mean_re);
    m2_im += d_im * (k.imag() - mean_im);
  }

  cplx mean() const { return {mean_re, mean_im}; }
  /// sqrt(Var Re + Var Im) / sqrt(N).
  double std_error() const {
    const double c = static_cast<double>(count);
    return std::sqrt(std::max(0.0, (m2_re + m2_im) / c) / c);
  }
};

inline EstimateResult finish(const ComplexVec& beta, const KernelMoments& m, double envelope) {
  return {beta, envelope * m.mean(), envelope * m.std_error(), m.count, envelope};
}

}  // namespace detail

/// λ̃(β) = e^{e^{-2 r_eff}|β|²} (1/N) Σ_i e^{(ζ_i†β - β†ζ_i)/√T_a}.
inline EstimateResult estimate_lambda(const OutcomeSamples& samples, const ComplexVec& beta) {
  require_same_length(beta.size(), samples.n, "estimate_lambda");
  const std::size_t N = samples.size();
  if (N == 0) throw domain_error("estimate_lambda: no samples");
  const double inv_scale = 1.0 / std::sqrt(samples.scheme.t_after);
  const double envelope = samples.scheme.envelope(beta.norm_sq());
  detail::KernelMoments m;
  for (std::size_t i = 0; i < N; ++i) {
    const double phase = 2.0 * inv_scale * im_inner(samples.row(i), beta.view());
    m.add({std::cos(phase), std::sin(phase)});
  }
  return detail::finish(beta, m, envelope);
}

/// Elementwise estimate_lambda; results do not depend on `threads`.
inline std::vector<EstimateResult> estimate_lambda_batch(const OutcomeSamples& samples,
                                                         const std::vector<ComplexVec>& betas,
                                                         unsigned threads = 1) {
  std::vector<EstimateResult> out(betas.size());
  parallel_for(betas.size(), threads, [&](std::size_t k) { out[k] = estimate_lambda(samples, betas[k]); });
  return out;
}

/// Crosstalk-aware estimator for an ideal TMSV scheme with Bell-measurement
/// crosstalk θ: mean of e^{2i Im(z†β)} over transformed outcomes z, divided by
/// g(β^θ, β, r). `envelope` reports 1/g.
inline EstimateResult estimate_lambda_crosstalk(const OutcomeSamples& samples, const ComplexVec& beta,
                                                double r, double theta) {
  require_same_length(beta.size(), samples.n, "estimate_lambda_crosstalk");
  const std::size_t N = samples.size();
  if (N == 0) throw domain_error("estimate_lambda_crosstalk: no samples");
  const ComplexVec partner = crosstalk_partner(beta, theta);
  const double g = g_tmsv(partner.view(), beta.view(), r);
  if (!(g > 0.0)) throw numeric_error("estimate_lambda_crosstalk: g underflowed to 0");
  detail::KernelMoments m;
  for (std::size_t i = 0; i < N; ++i) {
    const ComplexVec z = crosstalk_sample_transform(samples.row(i), theta);
    const double phase = 2.0 * im_inner(z.view(), beta.view());
    m.add({std::cos(phase), std::sin(phase)});
  }
  return detail::finish(beta, m, 1.0 / g);
}

/// ceil(8 e^{2 e^{-2 r_eff}|β|²} ε⁻² ln(4/δ)).
inline std::uint64_t hoeffding_N(double eps, double delta, double r_eff, double beta_norm_sq) {
  if (!(eps > 0.0)) throw domain_error("hoeffding_N: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw domain_error("hoeffding_N: delta must lie in (0, 1)");
  if (!(beta_norm_sq >= 0.0)) throw domain_error("hoeffding_N: |β|² must be >= 0");
  const double units = std::isinf(r_eff) && r_eff > 0.0 ? 0.0 : std::exp(-2.0 * r_eff);
  const double value = 8.0 * std::exp(2.0 * units * beta_norm_sq) / (eps * eps) * std::log(4.0 / delta);
  if (!(value < 9.0e18)) throw numeric_error("hoeffding_N: sample count overflows 64 bits");
  return static_cast<std::uint64_t>(std::ceil(value));
}

/// Fraction of `trials` independent N-sample estimates with |λ̃(β) - λ(β)| > ε.
/// Trial t draws from stream.split(t).
inline double empirical_failure_rate(const ChannelSpec& spec, const SchemeConfig& cfg, const ComplexVec& beta,
                                     double eps, std::size_t N, std::size_t trials, const RandomStream& stream,
                                     unsigned threads = 1) {
  if (trials < 100) throw domain_error("empirical_failure_rate: need at least 100 trials");
  const cplx target = eval_lambda(spec, beta);
  std::vector<unsigned char> failed(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto samples = sample_outcomes(spec, cfg, N, stream.split(t));
    failed[t] = std::abs(estimate_lambda(samples, beta).lambda_hat - target) > eps ? 1 : 0;
  });
  std::size_t count = 0;
  for (auto f : failed) count += f;
  return static_cast<double>(count) / static_cast<double>(trials);
}

}  // namespace rdl
