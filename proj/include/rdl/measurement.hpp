#pragma once

// Outcome simulation for the TMSV + Bell-measurement scheme (and its r = 0
// special case, vacuum input + heterodyne).
//
// The Bell measurement is not simulated in Fock space. At the level of outcome
// distributions it is equivalent to
//
//   ζ = √T_a (α + w),   α ~ p,   w ~ CN(0, e^{-2 r_eff}) (per-quadrature e^{-2 r_eff}/2),
//
// which reproduces E[e^{(ζ†β - β†ζ)/√T_a}] = λ(β) e^{-e^{-2 r_eff}|β|²}.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rdl/channel_io.hpp"
#include "rdl/channels.hpp"
#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"
#include "rdl/noise.hpp"
#include "rdl/parallel.hpp"
#include "rdl/random.hpp"

namespace rdl {

struct SchemeConfig {
  double r = 0.0;
  double t_before = 1.0;
  double t_after = 1.0;
  double s = std::numeric_limits<double>::infinity();

  static SchemeConfig ideal(double r) { return {r, 1.0, 1.0, std::numeric_limits<double>::infinity()}; }
  static SchemeConfig vacuum_heterodyne() { return ideal(0.0); }

  void validate() const {
    if (!(r >= 0.0)) throw config_error("scheme.r: must be >= 0");
    if (!(t_before > 0.0 && t_before <= 1.0)) throw config_error("scheme.T_b: must lie in (0, 1]");
    if (!(t_after > 0.0 && t_after <= 1.0)) throw config_error("scheme.T_a: must lie in (0, 1]");
    if (!(s >= 0.0)) throw config_error("scheme.s: must be >= 0");
  }

  /// e^{-2 r_eff}: twice the per-quadrature variance of the added noise.
  double noise_units() const {
    validate();
    return effective_noise_units(r, t_before, t_after, s);
  }

  double effective_r() const {
    validate();
    return rdl::r_eff(r, t_before, t_after, s);
  }

  /// e^{e^{-2 r_eff}|β|²}, the estimator's amplification factor.
  double envelope(double beta_norm_sq) const {
    const double u = noise_units();
    return u == 0.0 ? 1.0 : std::exp(u * beta_norm_sq);
  }

  bool is_ideal() const noexcept { return t_before == 1.0 && t_after == 1.0 && std::isinf(s); }

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

/// N outcomes in C^n stored row-major.
struct OutcomeSamples {
  std::size_t n = 0;
  SchemeConfig scheme;
  std::uint64_t channel_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t substream = 0;
  std::size_t chunk_size = 0;
  std::vector<cplx> zeta;

  std::size_t size() const noexcept { return n == 0 ? 0 : zeta.size() / n; }
  std::span<const cplx> row(std::size_t i) const { return {zeta.data() + i * n, n}; }
  std::span<cplx> row(std::size_t i) { return {zeta.data() + i * n, n}; }
};

inline constexpr std::size_t kDefaultChunkSize = 4096;

/// Draws N outcomes. Chunk c (rows [c·chunk, (c+1)·chunk)) uses substream
/// stream.split(c), so the output depends on the chunk size but not on `threads`.
inline OutcomeSamples sample_outcomes(const ChannelSpec& spec, const SchemeConfig& cfg, std::size_t N,
                                      const RandomStream& stream, unsigned threads = 1,
                                      std::size_t chunk_size = kDefaultChunkSize) {
  cfg.validate();
  if (N == 0) throw domain_error("sample_outcomes: need N >= 1");
  if (chunk_size == 0) throw config_error("chunk_size: must be >= 1");
  const std::size_t n = spec.modes();
  const double units = cfg.noise_units();
  const double noise_var = units / 2.0;
  const double scale = std::sqrt(cfg.t_after);
  const DisplacementSampler sampler(spec);

  OutcomeSamples out;
  out.n = n;
  out.scheme = cfg;
  out.channel_id = channel_digest(spec);
  out.seed = stream.master_seed();
  out.substream = stream.substream_index();
  out.chunk_size = chunk_size;
  out.zeta.assign(N * n, cplx{0.0, 0.0});

  const std::size_t chunks = (N + chunk_size - 1) / chunk_size;
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto gen = stream.split(c).generator();
    std::vector<cplx> noise(n);
    const std::size_t end = std::min(N, (c + 1) * chunk_size);
    for (std::size_t i = c * chunk_size; i < end; ++i) {
      auto z = out.row(i);
      sampler.draw(gen, z);
      if (noise_var > 0.0) {
        fill_gaussian(gen, noise_var, noise);
        for (std::size_t j = 0; j < n; ++j) z[j] += noise[j];
      }
      if (scale != 1.0)
        for (auto& v : z) v *= scale;
      for (const auto& v : z)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw numeric_error("sample_outcomes: non-finite outcome");
    }
  });
  return out;
}

/// Channel whose density is p convolved with the measurement noise, i.e. whose
/// characteristic function is λ(β) e^{-e^{-2 r_eff}|β|²}.
inline ChannelSpec measured_channel(const ChannelSpec& spec, const SchemeConfig& cfg) {
  const double b = cfg.noise_units();
  if (b == 0.0) return spec;
  std::vector<Peak> peaks;
  peaks.reserve(spec.peaks().size());
  for (const auto& p : spec.peaks()) {
    const double a = 1.0 / (2.0 * p.width * p.width);
    const double ab = a + b;
    peaks.push_back(Peak{p.weight * std::exp(-a * b * p.center.norm_sq() / ab), p.center.scaled(a / ab),
                         1.0 / std::sqrt(2.0 * ab)});
  }
  const double a0 = 1.0 / (2.0 * spec.sigma() * spec.sigma());
  return ChannelSpec(spec.modes(), 1.0 / std::sqrt(2.0 * (a0 + b)), std::move(peaks));
}

/// Closed-form density of sample_outcomes at ζ.
inline double eval_p_meas(const ChannelSpec& measured, const SchemeConfig& cfg, std::span<const cplx> zeta) {
  require_same_length(zeta.size(), measured.modes(), "eval_p_meas");
  if (cfg.t_after == 1.0) return eval_p(measured, zeta);
  const double inv = 1.0 / std::sqrt(cfg.t_after);
  std::vector<cplx> unscaled(zeta.begin(), zeta.end());
  for (auto& z : unscaled) z *= inv;
  return std::pow(cfg.t_after, -static_cast<double>(zeta.size())) * eval_p(measured, unscaled);
}

/// Convenience overload; rebuilds the measured channel on each call.
inline double eval_p_meas(const ChannelSpec& spec, const SchemeConfig& cfg, const ComplexVec& zeta) {
  return eval_p_meas(measured_channel(spec, cfg), cfg, zeta.view());
}

/// Outcome coordinates under Bell-measurement crosstalk θ:
/// z = -Re ζ/(sinθ - cosθ) + i Im ζ/(sinθ + cosθ). Identity at θ = 0.
inline ComplexVec crosstalk_sample_transform(std::span<const cplx> zeta, double theta) {
  check_crosstalk_angle(theta);
  const double s = std::sin(theta), c = std::cos(theta);
  ComplexVec out(zeta.size());
  for (std::size_t j = 0; j < zeta.size(); ++j) out[j] = {-zeta[j].real() / (s - c), zeta[j].imag() / (s + c)};
  return out;
}

}  // namespace rdl
