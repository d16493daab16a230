#pragma once

// Partially-revealed hypothesis-testing game. Alice hides γ ~ N(0, σ_γ²) per
// quadrature and applies one of {Λ_dep, Λ_γ, Λ_{-γ}} (dep with probability ½,
// otherwise ±γ uniformly). Bob queries the channel N times with an
// entanglement-assisted scheme, learns γ, and decides "dep" vs "signal" by
// thresholding |Im λ̃(γ)| at ε = 0.98 ε₀.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rdl/channels.hpp"
#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"
#include "rdl/estimation.hpp"
#include "rdl/measurement.hpp"
#include "rdl/parallel.hpp"
#include "rdl/random.hpp"

namespace rdl {

struct GameConfig {
  std::size_t n = 8;
  double kappa = 1.0;
  double sigma = 0.3;
  double eps0 = 0.245;
  std::size_t N = 0;  // samples per round; 0 makes Bob guess blindly
  SchemeConfig scheme = SchemeConfig::ideal(2.0);

  double eps() const noexcept { return 0.98 * eps0; }
  double sigma_gamma_sq() const noexcept { return 0.99 * kappa / 2.0; }

  void validate() const {
    if (n == 0) throw config_error("game.n: must be >= 1");
    if (!(kappa > 0.0)) throw config_error("game.kappa: must be > 0");
    if (!(sigma > 0.0)) throw config_error("game.sigma: must be > 0");
    if (!(eps0 >= 0.0 && eps0 <= 0.25)) throw config_error("game.eps0: must lie in [0, 0.25]");
    scheme.validate();
  }
};

enum class Hypothesis { dep, signal };

struct RoundOutcome {
  Hypothesis truth;
  Hypothesis guess;
  bool in_range;
  ComplexVec gamma;
};

/// Draw order on stream.generator(): γ (2n normals), hypothesis, sign, blind guess.
/// Bob's outcomes come from stream.split(0).
inline RoundOutcome play_round(const GameConfig& cfg, const RandomStream& stream) {
  auto gen = stream.generator();
  ComplexVec gamma(cfg.n);
  fill_gaussian(gen, cfg.sigma_gamma_sq(), gamma.view());
  const Hypothesis truth = gen.uniform() < 0.5 ? Hypothesis::dep : Hypothesis::signal;
  const double sign = gen.uniform() < 0.5 ? 1.0 : -1.0;
  const Hypothesis blind = gen.uniform() < 0.5 ? Hypothesis::dep : Hypothesis::signal;

  const double g2 = gamma.norm_sq();
  const bool in_range = 2.0 * cfg.sigma * cfg.sigma < g2 && g2 <= cfg.kappa * static_cast<double>(cfg.n);
  if (!in_range || cfg.N == 0) return {truth, blind, in_range, std::move(gamma)};

  const ChannelSpec channel = truth == Hypothesis::dep ? depolarizing(cfg.n, cfg.sigma)
                                                       : three_peak(gamma.scaled(sign), cfg.eps0, cfg.sigma);
  const auto samples = sample_outcomes(channel, cfg.scheme, cfg.N, stream.split(0));
  const double im = estimate_lambda(samples, gamma).lambda_hat.imag();
  const Hypothesis guess = std::abs(im) < cfg.eps() ? Hypothesis::dep : Hypothesis::signal;
  return {truth, guess, in_range, std::move(gamma)};
}

struct WilsonInterval {
  double low;
  double high;
};

/// Wilson score interval for k successes in m trials (default 95%).
inline WilsonInterval wilson_interval(std::size_t k, std::size_t m, double z = 1.959963984540054) {
  if (m == 0) return {0.0, 1.0};
  const double mm = static_cast<double>(m);
  const double p = static_cast<double>(k) / mm;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * mm)) / (1.0 + z2 / mm);
  const double half = z * std::sqrt(p * (1.0 - p) / mm + z2 / (4.0 * mm * mm)) / (1.0 + z2 / mm);
  // The endpoints are exactly 0 (k = 0) and 1 (k = m); avoid cancellation residue there.
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == m ? 1.0 : std::min(1.0, centre + half)};
}

struct GameSummary {
  std::size_t rounds = 0;
  std::size_t N = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double in_range_fraction = 0.0;
  double in_range_success_rate = 0.0;  // success conditioned on 2σ² < |γ|² <= κn
};

/// Round k uses stream.split(k); the summary does not depend on `threads`.
inline GameSummary run_game(const GameConfig& cfg, std::size_t rounds, const RandomStream& stream,
                            unsigned threads = 1) {
  cfg.validate();
  if (rounds == 0) throw config_error("game.rounds: must be >= 1");
  std::vector<unsigned char> won(rounds, 0), in_range(rounds, 0);
  parallel_for(rounds, threads, [&](std::size_t k) {
    const auto r = play_round(cfg, stream.split(k));
    won[k] = r.truth == r.guess ? 1 : 0;
    in_range[k] = r.in_range ? 1 : 0;
  });
  std::size_t wins = 0, hits = 0, wins_in_range = 0;
  for (std::size_t k = 0; k < rounds; ++k) {
    wins += won[k];
    hits += in_range[k];
    wins_in_range += won[k] & in_range[k];
  }
  const auto ci = wilson_interval(wins, rounds);
  const double m = static_cast<double>(rounds);
  return {rounds,
          cfg.N,
          static_cast<double>(wins) / m,
          ci.low,
          ci.high,
          static_cast<double>(hits) / m,
          hits ? static_cast<double>(wins_in_range) / static_cast<double>(hits) : 0.0};
}

}  // namespace rdl
