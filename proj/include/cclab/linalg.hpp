#pragma once

#include <Eigen/Dense>

#include <complex>

namespace cclab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using CVec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using complex = std::complex<double>;

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline Vec2 sym_eigenvalues(const Mat2& m) {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  const double radius = std::hypot(half_diff, off);
  return {mean - radius, mean + radius};
}

inline double spectral_norm_sym(const Mat2& m) {
  const Vec2 ev = sym_eigenvalues(m);
  return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

/// Symmetrize against round-off in products like A*B*A.
template <typename M>
M symmetrized(const M& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace cclab
