#include "cclab/material.hpp"

namespace cclab {

CVec2 flux(const Material& m, const CVec2& grad) {
  const complex i(0.0, 1.0);
  const Eigen::Matrix2cd linear = m.sigma.matrix().cast<complex>() + i * m.eps.matrix().cast<complex>();
  return linear * grad + m.zeta.matrix().cast<complex>() * grad.conjugate();
}

Mat4 real_block(const Material& m) {
  const Mat2 s = m.sigma.matrix();
  const Mat2 e = m.eps.matrix();
  const Mat2 z = m.zeta.matrix();
  Mat4 block;
  block << s + z, -e, e, s - z;
  return block;
}

}  // namespace cclab
