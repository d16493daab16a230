#pragma once

// Statistical helpers and independent reference samplers shared by the test
// binaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "rdl/rdl.hpp"

namespace rdl::testing {

/// sup |F_emp - F| for a sample against a continuous CDF.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

/// Asymptotic one-sample critical value at level alpha.
inline double ks_critical(std::size_t m, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(m));
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double ks_two_sample_critical(std::size_t m, std::size_t n, double alpha) {
  const double mm = static_cast<double>(m), nn = static_cast<double>(n);
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((mm + nn) / (mm * nn));
}

/// Upper tail probability of χ² with `dof` degrees of freedom.
inline double chi2_sf(double stat, double dof) { return boost::math::gamma_q(dof / 2.0, stat / 2.0); }

/// χ² statistic of observed counts vs expected, merging cells with expectation < 5
/// into one pooled cell. Returns {stat, dof}.
inline std::pair<double, double> chi2_statistic(const std::vector<double>& observed,
                                                const std::vector<double>& expected) {
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 5.0) {
      pooled_obs += observed[i];
      pooled_exp += expected[i];
      continue;
    }
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++cells;
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  return {stat, static_cast<double>(cells) - 1.0};
}

inline double normal_cdf(double x, double var) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * var)); }

/// Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
  return s * h / 3.0;
}

/// Cell probabilities of a single-mode density on a uniform grid of cells over
/// [-half, half]², by tensor Simpson quadrature inside each cell.
inline std::vector<double> cell_probabilities(const std::function<double(cplx)>& density, double half,
                                              std::size_t cells, std::size_t sub = 8) {
  std::vector<double> probs(cells * cells, 0.0);
  const double w = 2.0 * half / static_cast<double>(cells);
  const double h = w / static_cast<double>(sub);
  std::vector<double> weights(sub + 1);
  for (std::size_t k = 0; k <= sub; ++k) weights[k] = (k == 0 || k == sub) ? 1.0 : (k % 2 ? 4.0 : 2.0);
  for (std::size_t ci = 0; ci < cells; ++ci)
    for (std::size_t cj = 0; cj < cells; ++cj) {
      const double x0 = -half + w * static_cast<double>(ci);
      const double y0 = -half + w * static_cast<double>(cj);
      double s = 0.0;
      for (std::size_t a = 0; a <= sub; ++a)
        for (std::size_t b = 0; b <= sub; ++b)
          s += weights[a] * weights[b] *
               density({x0 + h * static_cast<double>(a), y0 + h * static_cast<double>(b)});
      probs[cj * cells + ci] = s * h * h / 9.0;
    }
  return probs;
}

/// Histogram of single-mode points over the same grid; points outside are dropped.
inline std::vector<double> histogram(const std::vector<cplx>& pts, double half, std::size_t cells) {
  std::vector<double> counts(cells * cells, 0.0);
  const double w = 2.0 * half / static_cast<double>(cells);
  for (const auto& z : pts) {
    const double fx = (z.real() + half) / w, fy = (z.imag() + half) / w;
    if (fx < 0.0 || fy < 0.0) continue;
    const auto i = static_cast<std::size_t>(fx), j = static_cast<std::size_t>(fy);
    if (i >= cells || j >= cells) continue;
    counts[j * cells + i] += 1.0;
  }
  return counts;
}

/// Outcomes of an ideal TMSV + Bell measurement whose beam splitter has crosstalk θ.
/// In the transformed coordinates z = crosstalk_sample_transform(ζ, θ) the outcome is
/// α plus independent Gaussian noise; this maps back to ζ.
inline OutcomeSamples sample_crosstalk_outcomes(const ChannelSpec& spec, double r, double theta, std::size_t N,
                                                const RandomStream& stream) {
  check_crosstalk_angle(theta);
  const double s = std::sin(theta), c = std::cos(theta);
  const double a = (c - s) / (c + s);
  const double C = std::cosh(2.0 * r), S = std::sinh(2.0 * r);
  const double var_re = ((1.0 / (a * a) + 1.0) * C - 2.0 * S / a) / 4.0;
  const double var_im = ((a * a + 1.0) * C - 2.0 * a * S) / 4.0;
  const std::size_t n = spec.modes();
  DisplacementSampler sampler(spec);
  auto gen = stream.generator();
  OutcomeSamples out;
  out.n = n;
  out.scheme = SchemeConfig::ideal(r);
  out.zeta.resize(N * n);
  for (std::size_t i = 0; i < N; ++i) {
    auto row = out.row(i);
    sampler.draw(gen, row);
    for (auto& z : row) {
      const double zr = z.real() + std::sqrt(var_re) * gen.normal();
      const double zi = z.imag() + std::sqrt(var_im) * gen.normal();
      z = {-zr * (s - c), zi * (s + c)};
    }
  }
  return out;
}

}  // namespace rdl::testing
