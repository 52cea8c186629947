#pragma once

#include "cclab/linalg.hpp"

namespace cclab {

/// Real symmetric 2x2 coefficient; the off-diagonal entry is stored once.
struct SymTensor {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static SymTensor isotropic(double value) { return {value, 0.0, value}; }
  static SymTensor from_matrix(const Mat2& m) { return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)}; }

  Mat2 matrix() const {
    Mat2 m;
    m << a11, a12, a12, a22;
    return m;
  }

  bool is_finite() const { return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a22); }
  bool operator==(const SymTensor&) const = default;
};

/// Coefficients of the flux law  gamma(grad u) = (sigma + i eps) grad u + zeta conj(grad u).
struct Material {
  SymTensor sigma = SymTensor::isotropic(1.0);
  SymTensor eps;
  SymTensor zeta;

  bool operator==(const Material&) const = default;
};

/// Flux of the conjugate-coupled law.
CVec2 flux(const Material& m, const CVec2& grad);

/// The real 4x4 block acting on (Re grad, Im grad):
///   [[sigma + zeta, -eps], [eps, sigma - zeta]].
Mat4 real_block(const Material& m);

}  // namespace cclab
