#pragma once

// Brute-force single-mode Fourier inversion on a uniform grid. Used to validate
// closed-form density / characteristic-function pairs, not for production paths.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "rdl/complex_vec.hpp"
#include "rdl/errors.hpp"

namespace rdl {

/// Uniform grid over a rectangle of the complex plane with samples of a function.
struct PlaneGrid {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 1.0;
  std::size_t n_re = 2, n_im = 2;
  std::vector<cplx> values;  // row-major, index = i_im * n_re + i_re

  double step_re() const { return (re_max - re_min) / static_cast<double>(n_re - 1); }
  double step_im() const { return (im_max - im_min) / static_cast<double>(n_im - 1); }
  cplx point(std::size_t i_re, std::size_t i_im) const {
    return {re_min + step_re() * static_cast<double>(i_re), im_min + step_im() * static_cast<double>(i_im)};
  }
  const cplx& at(std::size_t i_re, std::size_t i_im) const { return values[i_im * n_re + i_re]; }

  /// Square grid [-half_width, half_width]^2 with `points` samples per axis.
  static PlaneGrid sample(double half_width, std::size_t points, const std::function<cplx(cplx)>& f) {
    PlaneGrid g{-half_width, half_width, -half_width, half_width, points, points, {}};
    g.values.resize(points * points);
    for (std::size_t j = 0; j < points; ++j)
      for (std::size_t i = 0; i < points; ++i) g.values[j * points + i] = f(g.point(i, j));
    return g;
  }
};

struct OracleResult {
  cplx value;
  bool coverage_warning = false;  // |f| on the boundary exceeds the truncation threshold
};

/// (1/π²) ∬ f(β) e^{β*α - α*β} d²β by the trapezoid rule (single mode).
inline OracleResult fourier_oracle_1mode(const PlaneGrid& f, const ComplexVec& target) {
  if (target.size() != 1) throw dimension_error("fourier_oracle_1mode: target must have one mode");
  if (f.n_re < 2 || f.n_im < 2 || f.values.size() != f.n_re * f.n_im)
    throw dimension_error("fourier_oracle_1mode: malformed grid");
  constexpr double kBoundaryTol = 1e-12;
  const cplx alpha = target[0];
  const double h_re = f.step_re();
  const double h_im = f.step_im();

  OracleResult out{{0.0, 0.0}, false};
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < f.n_im; ++j) {
    const bool edge_im = (j == 0 || j + 1 == f.n_im);
    for (std::size_t i = 0; i < f.n_re; ++i) {
      const bool edge_re = (i == 0 || i + 1 == f.n_re);
      const cplx val = f.at(i, j);
      if ((edge_im || edge_re) && std::abs(val) >= kBoundaryTol) out.coverage_warning = true;
      if (val == cplx{0.0, 0.0}) continue;
      const cplx beta = f.point(i, j);
      // β*α - α*β = 2i Im(conj(β) α)
      const double phase = 2.0 * (beta.real() * alpha.imag() - beta.imag() * alpha.real());
      const double w = (edge_re ? 0.5 : 1.0) * (edge_im ? 0.5 : 1.0);
      acc += w * val * cplx{std::cos(phase), std::sin(phase)};
    }
  }
  out.value = acc * (h_re * h_im / (std::numbers::pi * std::numbers::pi));
  return out;
}

}  // namespace rdl
