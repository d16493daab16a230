#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace rdl;

namespace {

GameConfig hoeffding_config(double eps0 = 0.245) {
  GameConfig cfg;
  // N is fixed before γ is revealed, so size it for the largest in-range |γ|² = κn.
  cfg.N = static_cast<std::size_t>(hoeffding_N(0.98 * 0.245, 1.0 / 3.0, cfg.scheme.effective_r(),
                                               cfg.kappa * static_cast<double>(cfg.n)));
  cfg.eps0 = eps0;
  return cfg;
}

/// P(2σ² < |γ|² <= κn) with |γ|² ~ Gamma(n, scale 0.99κ).
double in_range_probability(std::size_t n, double kappa, double sigma) {
  const double scale = 0.99 * kappa;
  const auto nd = static_cast<double>(n);
  return reg_upper_gamma(nd, 2 * sigma * sigma / scale) - reg_upper_gamma(nd, kappa * nd / scale);
}

double se(double p, std::size_t m) { return std::sqrt(p * (1 - p) / static_cast<double>(m)); }

}  // namespace

TEST(GameConfig, Derived) {
  GameConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.eps(), 0.2401);
  EXPECT_DOUBLE_EQ(2 * cfg.sigma_gamma_sq(), 0.99);
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps0 = 0.3;
  EXPECT_THROW(cfg.validate(), config_error);
  cfg = GameConfig{};
  cfg.n = 0;
  EXPECT_THROW(cfg.validate(), config_error);
  EXPECT_THROW(run_game(GameConfig{}, 0, RandomStream(1, 0)), config_error);
  EXPECT_EQ(hoeffding_config().N, 463u);  // 462.27 rounded up
}

TEST(Game, MarginIdentityForSampledGammas) {
  GameConfig cfg;
  const RandomStream root(11, 0);
  const auto dep = depolarizing(cfg.n, cfg.sigma);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto round = play_round(cfg, root.split(k));
    const double g2 = round.gamma.norm_sq();
    const double margin = 2 * cfg.eps0 * std::abs(1 - std::exp(-4 * g2 / (2 * cfg.sigma * cfg.sigma)));
    const cplx base = eval_lambda(dep, round.gamma);
    for (double s : {1.0, -1.0}) {
      const cplx sig = eval_lambda(three_peak(round.gamma.scaled(s), cfg.eps0, cfg.sigma), round.gamma);
      EXPECT_NEAR(std::abs(sig - base), margin, 1e-10);
      EXPECT_NEAR(sig.imag(), s * margin, 1e-10);
    }
    EXPECT_NEAR(base.imag(), 0.0, 1e-15);
    // In range, the three candidate values of Im λ(γ) are at least 2ε apart.
    if (round.in_range) {
      EXPECT_GE(margin, 2 * cfg.eps());
    }
  }
}

TEST(Game, InRangeFractionAnalytic) {
  for (std::size_t n = 8; n <= 400; n += (n < 40 ? 1 : 40))
    EXPECT_GE(in_range_probability(n, 1.0, 0.3), 0.49987) << n;
  // 2σ² at its largest allowed value 0.99κ still clears the bound.
  EXPECT_GE(in_range_probability(8, 1.0, std::sqrt(0.495)), 0.49987);
}

TEST(Game, InRangeFractionMonteCarlo) {
  GameConfig cfg;  // N = 0: rounds are cheap
  const std::size_t m = 20000;
  const auto s = run_game(cfg, m, RandomStream(12, 0));
  const double p = in_range_probability(cfg.n, cfg.kappa, cfg.sigma);
  EXPECT_NEAR(s.in_range_fraction, p, 4 * se(p, m));
}

TEST(Game, NoSamplesIsCoinFlip) {
  GameConfig cfg;
  const std::size_t m = 20000;
  const auto s = run_game(cfg, m, RandomStream(13, 0));
  EXPECT_NEAR(s.success_rate, 0.5, 4 * se(0.5, m));
  EXPECT_LE(s.ci_low, s.success_rate);
  EXPECT_GE(s.ci_high, s.success_rate);
}

TEST(Game, IndistinguishableHypothesesIsCoinFlip) {
  const auto cfg = hoeffding_config(0.0);
  const std::size_t m = 3000;
  const auto s = run_game(cfg, m, RandomStream(14, 0));
  EXPECT_NEAR(s.success_rate, 0.5, 4 * se(0.5, m));
}

TEST(Game, HoeffdingSizedBeatsFloor) {
  const auto cfg = hoeffding_config();
  const std::size_t m = 3000;
  const auto s = run_game(cfg, m, RandomStream(15, 0));
  EXPECT_GE(s.success_rate, 0.58 - 3 * se(0.58, m));
  const auto hits = static_cast<std::size_t>(std::llround(s.in_range_fraction * static_cast<double>(m)));
  EXPECT_GE(s.in_range_success_rate, 2.0 / 3.0 - 3 * se(2.0 / 3.0, hits));
}

TEST(Game, MoreSamplesNeverHurt) {
  GameConfig cfg;
  const std::size_t m = 2000;
  double prev = 0.0;
  for (std::size_t N : {0u, 8u, 16u, 32u, 64u, 128u}) {
    cfg.N = N;
    const double rate = run_game(cfg, m, RandomStream(16, 0)).success_rate;
    EXPECT_GE(rate, prev - 3 * std::sqrt(2.0) * se(0.5, m)) << N;
    prev = rate;
  }
}

TEST(Game, DeterministicAcrossThreads) {
  const auto cfg = hoeffding_config();
  const auto a = run_game(cfg, 300, RandomStream(17, 0), 1);
  const auto b = run_game(cfg, 300, RandomStream(17, 0), 3);
  EXPECT_EQ(a.success_rate, b.success_rate);
  EXPECT_EQ(a.in_range_fraction, b.in_range_fraction);
  EXPECT_EQ(a.in_range_success_rate, b.in_range_success_rate);
  const auto r1 = play_round(cfg, RandomStream(18, 3));
  const auto r2 = play_round(cfg, RandomStream(18, 3));
  EXPECT_EQ(r1.gamma, r2.gamma);
  EXPECT_EQ(r1.guess, r2.guess);
}

TEST(Wilson, EndpointsSolveScoreEquation) {
  const double z = 1.959963984540054;
  for (std::size_t m : {10u, 100u, 10000u})
    for (std::size_t k : {std::size_t{1}, m / 3, m / 2, m - 1}) {
      const auto ci = wilson_interval(k, m);
      const double p = static_cast<double>(k) / static_cast<double>(m);
      for (double x : {ci.low, ci.high})
        EXPECT_NEAR((p - x) * (p - x), z * z * x * (1 - x) / static_cast<double>(m), 1e-12) << k << "/" << m;
      EXPECT_LT(ci.low, p);
      EXPECT_GT(ci.high, p);
    }
  EXPECT_EQ(wilson_interval(0, 50).low, 0.0);
  EXPECT_EQ(wilson_interval(50, 50).high, 1.0);
  EXPECT_EQ(wilson_interval(0, 0).low, 0.0);
  EXPECT_EQ(wilson_interval(0, 0).high, 1.0);
}
