#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "rdl/errors.hpp"
#include "rdl/random.hpp"

namespace rdl {

using cplx = std::complex<double>;

/// Point in C^n (one complex amplitude per bosonic mode). Entries are always finite.
class ComplexVec {
 public:
  ComplexVec() = default;
  explicit ComplexVec(std::size_t n) : v_(n, cplx{0.0, 0.0}) {}
  ComplexVec(std::initializer_list<cplx> xs) : v_(xs) { check_finite(); }
  explicit ComplexVec(std::vector<cplx> xs) : v_(std::move(xs)) { check_finite(); }
  explicit ComplexVec(std::span<const cplx> xs) : v_(xs.begin(), xs.end()) { check_finite(); }

  /// n copies of `value`.
  static ComplexVec filled(std::size_t n, cplx value) {
    return ComplexVec(std::vector<cplx>(n, value));
  }

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  const cplx& operator[](std::size_t i) const { return v_[i]; }
  cplx& operator[](std::size_t i) { return v_[i]; }

  std::span<const cplx> view() const noexcept { return v_; }
  std::span<cplx> view() noexcept { return v_; }
  operator std::span<const cplx>() const noexcept { return v_; }

  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  double norm_sq() const noexcept {
    double s = 0.0;
    for (const auto& z : v_) s += std::norm(z);
    return s;
  }

  bool is_zero() const noexcept {
    for (const auto& z : v_)
      if (z != cplx{0.0, 0.0}) return false;
    return true;
  }

  ComplexVec operator-() const {
    ComplexVec out(*this);
    for (auto& z : out.v_) z = -z;
    return out;
  }

  ComplexVec scaled(double factor) const {
    ComplexVec out(*this);
    for (auto& z : out.v_) z *= factor;
    return out;
  }

  friend bool operator==(const ComplexVec&, const ComplexVec&) = default;

 private:
  void check_finite() const {
    for (const auto& z : v_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw domain_error("ComplexVec: non-finite entry");
    }
  }

  std::vector<cplx> v_;
};

inline double norm_sq(std::span<const cplx> v) noexcept {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

/// Im(a† b) = sum_j (Re a_j Im b_j - Im a_j Re b_j).
inline double im_inner(std::span<const cplx> a, std::span<const cplx> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j].real() * b[j].imag() - a[j].imag() * b[j].real();
  return s;
}

/// e^{a†b - b†a} = e^{2i Im(a†b)}.
inline cplx phase_kernel(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_length(a.size(), b.size(), "phase_kernel");
  const double phase = 2.0 * im_inner(a, b);
  return {std::cos(phase), std::sin(phase)};
}

/// Fill `out` with i.i.d. complex Gaussians, each quadrature N(0, var_per_quadrature).
inline void fill_gaussian(Generator& gen, double var_per_quadrature, std::span<cplx> out) {
  const double sd = std::sqrt(var_per_quadrature);
  for (auto& z : out) {
    const double re = gen.normal();
    const double im = gen.normal();
    z = {sd * re, sd * im};
  }
}

inline ComplexVec gaussian_complex(const RandomStream& stream, std::size_t n, double var_per_quadrature) {
  if (!(var_per_quadrature >= 0.0) || !std::isfinite(var_per_quadrature))
    throw domain_error("gaussian_complex: variance must be finite and >= 0");
  ComplexVec out(n);
  if (var_per_quadrature == 0.0) return out;
  auto gen = stream.generator();
  fill_gaussian(gen, var_per_quadrature, out.view());
  return out;
}

}  // namespace rdl
