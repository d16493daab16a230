#pragma once

// Random displacement channels whose characteristic function is a Hermitian
// Gaussian mixture
//
//   λ(β) = Σ_k c_k exp(-|β - γ_k|² / (2σ_k²)),
//
// and whose displacement density is its inverse Fourier transform
//
//   p(α) = Σ_k c_k (2σ_k²/π)^n exp(-2σ_k²|α|²) exp(2i Im(γ_k† α)).

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"
#include "rdl/random.hpp"

namespace rdl {

struct Peak {
  cplx weight;
  ComplexVec center;
  double width = 0.0;  // 0 selects the channel's common σ
};

class ChannelSpec {
 public:
  /// Peak at γ = 0 (real weight).
  struct Central {
    double weight;
    double width;
  };
  /// Representative of a Hermitian pair; its partner is (conj(weight), -center).
  struct Pair {
    cplx weight;
    ComplexVec center;
    double width;
  };

  static constexpr double kTolerance = 1e-12;

  ChannelSpec(std::size_t n, double sigma, std::vector<Peak> peaks)
      : n_(n), sigma_(sigma), peaks_(std::move(peaks)) {
    if (n_ == 0) throw domain_error("ChannelSpec: need at least one mode");
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw domain_error("ChannelSpec: sigma must be finite and > 0");
    for (auto& p : peaks_) {
      require_same_length(p.center.size(), n_, "ChannelSpec peak center");
      if (p.width == 0.0) p.width = sigma_;
      if (!(p.width > 0.0) || !std::isfinite(p.width)) throw domain_error("ChannelSpec: peak width must be > 0");
      if (!std::isfinite(p.weight.real()) || !std::isfinite(p.weight.imag()))
        throw domain_error("ChannelSpec: non-finite peak weight");
    }
    canonicalize();
    validate();
  }

  std::size_t modes() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<Peak>& peaks() const noexcept { return peaks_; }
  const std::vector<Central>& central() const noexcept { return central_; }
  const std::vector<Pair>& pairs() const noexcept { return pairs_; }

  /// All peaks share σ: exact rejection sampling and the nonnegativity certificate apply.
  bool samplable() const noexcept { return common_width_; }

  /// c_0: total weight on the γ = 0 peak(s).
  double zero_weight() const noexcept {
    double c0 = 0.0;
    for (const auto& c : central_) c0 += c.weight;
    return c0;
  }

  /// M = Σ_k |c_k|, the supremum of the density modulation.
  double modulation_bound() const noexcept {
    double m = 0.0;
    for (const auto& c : central_) m += std::abs(c.weight);
    for (const auto& p : pairs_) m += 2.0 * std::abs(p.weight);
    return m;
  }

 private:
  void canonicalize() {
    std::vector<bool> used(peaks_.size(), false);
    for (std::size_t i = 0; i < peaks_.size(); ++i) {
      if (used[i]) continue;
      const Peak& p = peaks_[i];
      used[i] = true;
      if (p.center.is_zero()) {
        if (std::abs(p.weight.imag()) > kTolerance)
          throw domain_error("ChannelSpec: peak at the origin must have a real weight");
        central_.push_back({p.weight.real(), p.width});
        continue;
      }
      const double scale = 1.0 + std::sqrt(p.center.norm_sq());
      bool matched = false;
      for (std::size_t j = i + 1; j < peaks_.size() && !matched; ++j) {
        if (used[j]) continue;
        const Peak& q = peaks_[j];
        double mismatch = 0.0;
        for (std::size_t m = 0; m < n_; ++m) mismatch += std::norm(p.center[m] + q.center[m]);
        if (std::sqrt(mismatch) > kTolerance * scale) continue;
        if (std::abs(q.weight - std::conj(p.weight)) > kTolerance * (1.0 + std::abs(p.weight))) continue;
        if (q.width != p.width) continue;
        used[j] = true;
        matched = true;
      }
      if (!matched)
        throw domain_error("ChannelSpec: Hermitian closure violated (missing partner (conj(c), -γ))");
      pairs_.push_back({p.weight, p.center, p.width});
    }
  }

  void validate() {
    common_width_ = true;
    for (const auto& p : peaks_)
      if (p.width != sigma_) common_width_ = false;

    cplx total{0.0, 0.0};
    for (const auto& c : central_) total += c.weight;
    for (const auto& p : pairs_) {
      const double decay = std::exp(-p.center.norm_sq() / (2.0 * p.width * p.width));
      total += 2.0 * p.weight.real() * decay;
    }
    if (std::abs(total - cplx{1.0, 0.0}) > kTolerance)
      throw domain_error("ChannelSpec: normalization violated (λ(0) != 1)");

    if (common_width_) {
      double off_origin = 0.0;
      for (const auto& p : pairs_) off_origin += 2.0 * std::abs(p.weight);
      if (off_origin > zero_weight() + kTolerance)
        throw domain_error("ChannelSpec: nonnegativity certificate violated (Σ|c_k| > c_0)");
    }
  }

  std::size_t n_;
  double sigma_;
  std::vector<Peak> peaks_;
  std::vector<Central> central_;
  std::vector<Pair> pairs_;
  bool common_width_ = true;
};

// ---------------------------------------------------------------------------
// Builders

inline ChannelSpec depolarizing(std::size_t n, double sigma) {
  return ChannelSpec(n, sigma, {Peak{{1.0, 0.0}, ComplexVec(n), 0.0}});
}

/// λ_γ(β) = e^{-|β|²/2σ²} + 2iε₀ e^{-|β-γ|²/2σ²} - 2iε₀ e^{-|β+γ|²/2σ²}.
inline ChannelSpec three_peak(const ComplexVec& gamma, double eps0, double sigma) {
  if (!(eps0 >= 0.0) || eps0 > 0.25)
    throw domain_error("three_peak: eps0 must lie in [0, 0.25] for a nonnegative density");
  const std::size_t n = gamma.size();
  if (gamma.is_zero()) return depolarizing(n, sigma);
  return ChannelSpec(n, sigma,
                     {Peak{{1.0, 0.0}, ComplexVec(n), 0.0}, Peak{{0.0, 2.0 * eps0}, gamma, 0.0},
                      Peak{{0.0, -2.0 * eps0}, -gamma, 0.0}});
}

/// Single-mode example with peaks {(1,0), (¼,±γ), (-¼,±iγ)}.
inline ChannelSpec five_peak_example(double sigma, cplx gamma) {
  const cplx igamma = cplx{0.0, 1.0} * gamma;
  return ChannelSpec(1, sigma,
                     {Peak{{1.0, 0.0}, ComplexVec{cplx{0.0, 0.0}}, 0.0}, Peak{{0.25, 0.0}, ComplexVec{gamma}, 0.0},
                      Peak{{0.25, 0.0}, ComplexVec{-gamma}, 0.0}, Peak{{-0.25, 0.0}, ComplexVec{igamma}, 0.0},
                      Peak{{-0.25, 0.0}, ComplexVec{-igamma}, 0.0}});
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double dist_sq(std::span<const cplx> a, std::span<const cplx> b, double sign_b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double dr = a[j].real() - sign_b * b[j].real();
    const double di = a[j].imag() - sign_b * b[j].imag();
    s += dr * dr + di * di;
  }
  return s;
}

}  // namespace detail

inline cplx eval_lambda(const ChannelSpec& spec, std::span<const cplx> beta) {
  require_same_length(beta.size(), spec.modes(), "eval_lambda");
  const double b2 = norm_sq(beta);
  cplx sum{0.0, 0.0};
  for (const auto& c : spec.central()) sum += c.weight * std::exp(-b2 / (2.0 * c.width * c.width));
  for (const auto& p : spec.pairs()) {
    const double inv = 1.0 / (2.0 * p.width * p.width);
    const double near = std::exp(-detail::dist_sq(beta, p.center.view(), 1.0) * inv);
    const double far = std::exp(-detail::dist_sq(beta, p.center.view(), -1.0) * inv);
    sum += p.weight * near + std::conj(p.weight) * far;
  }
  return sum;
}

/// Mixture modulation m(α) = c_0 + Σ_pairs 2 Re(c e^{2i Im(γ†α)}) (common-width channels).
inline double modulation(const ChannelSpec& spec, std::span<const cplx> alpha) {
  double m = 0.0;
  for (const auto& c : spec.central()) m += c.weight;
  for (const auto& p : spec.pairs()) {
    const double phase = 2.0 * im_inner(p.center.view(), alpha);
    m += 2.0 * (p.weight.real() * std::cos(phase) - p.weight.imag() * std::sin(phase));
  }
  return m;
}

/// Displacement density p(α); clamped at 0 to absorb rounding at modulation zeros.
inline double eval_p(const ChannelSpec& spec, std::span<const cplx> alpha) {
  require_same_length(alpha.size(), spec.modes(), "eval_p");
  const double a2 = norm_sq(alpha);
  const auto n = static_cast<double>(spec.modes());
  auto envelope = [&](double width) {
    const double s2 = width * width;
    return std::pow(2.0 * s2 / std::numbers::pi, n) * std::exp(-2.0 * s2 * a2);
  };
  double value = 0.0;
  if (spec.samplable()) {
    value = envelope(spec.sigma()) * modulation(spec, alpha);
  } else {
    for (const auto& c : spec.central()) value += c.weight * envelope(c.width);
    for (const auto& p : spec.pairs()) {
      const double phase = 2.0 * im_inner(p.center.view(), alpha);
      value += envelope(p.width) * 2.0 * (p.weight.real() * std::cos(phase) - p.weight.imag() * std::sin(phase));
    }
  }
  return value < 0.0 ? 0.0 : value;
}

// ---------------------------------------------------------------------------
// Sampling

struct DisplacementSample {
  ComplexVec alpha;
  std::uint64_t acceptance_trials = 0;
};

/// Exact sampler for α ~ p: Gaussian proposal (per-quadrature variance 1/(4σ²))
/// accepted with probability m(α)/M.
class DisplacementSampler {
 public:
  static constexpr std::uint64_t kMaxTrials = 1'000'000;

  explicit DisplacementSampler(const ChannelSpec& spec)
      : spec_(&spec), proposal_sd_(1.0 / (2.0 * spec.sigma())), bound_(spec.modulation_bound()) {
    if (!spec.samplable()) throw domain_error("DisplacementSampler: channel peaks do not share a common width");
  }

  /// Writes one sample into `alpha`; returns the number of proposals used.
  std::uint64_t draw(Generator& gen, std::span<cplx> alpha) const {
    require_same_length(alpha.size(), spec_->modes(), "DisplacementSampler::draw");
    const bool trivial = spec_->pairs().empty();
    for (std::uint64_t trial = 1; trial <= kMaxTrials; ++trial) {
      for (auto& z : alpha) {
        const double re = gen.normal();
        const double im = gen.normal();
        z = {proposal_sd_ * re, proposal_sd_ * im};
      }
      if (trivial) return trial;
      const double u = gen.uniform();
      if (u * bound_ < modulation(*spec_, alpha)) return trial;
    }
    throw numeric_error("DisplacementSampler: rejection loop exceeded the trial cap");
  }

  double acceptance_probability() const noexcept { return 1.0 / bound_; }

 private:
  const ChannelSpec* spec_;
  double proposal_sd_;
  double bound_;
};

inline DisplacementSample sample_displacement(const ChannelSpec& spec, const RandomStream& stream) {
  DisplacementSampler sampler(spec);
  auto gen = stream.generator();
  DisplacementSample out{ComplexVec(spec.modes()), 0};
  out.acceptance_trials = sampler.draw(gen, out.alpha.view());
  return out;
}

}  // namespace rdl
