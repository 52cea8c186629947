#pragma once

#include "cclab/error.hpp"
#include "cclab/scenario.hpp"

#include <doctest.h>

#include <numbers>
#include <optional>

namespace fixtures {

using namespace cclab;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

/// Unit square, sigma0 = I, eps0 = 0, h = nu . e1.
inline ScenarioSpec homogeneous(int n) {
  ScenarioSpec s;
  s.id = "homogeneous";
  s.mesh = {n, n, 1.0, 1.0, {0.0, 0.0}};
  s.constants.alpha0 = 1.0;
  s.constants.alpha1 = 1.0;
  s.constants.ell0 = 0.1;
  return s;
}

/// Disk inclusion with sigma1 = I, zeta1 = -0.75 I, eps = 0: M = 3I, N = 0.75I.
inline ScenarioSpec disk(int n, double radius = 0.1, Vec2 center = {0.5, 0.5}) {
  ScenarioSpec s = homogeneous(n);
  s.id = "disk";
  Material inner;
  inner.sigma = SymTensor::isotropic(1.0);
  inner.zeta = SymTensor::isotropic(-0.75);
  s.inclusion = InclusionSpec{Disk{center, radius}, inner};
  s.constants.alpha1 = 4.0;
  s.constants.beta = 0.5;
  s.constants.delta = 0.0;
  s.constants.ell1 = 0.02;
  return s;
}

/// Anisotropic complex background and inclusion passing every condition.
inline ScenarioSpec anisotropic(int n) {
  ScenarioSpec s;
  s.id = "anisotropic";
  s.mesh = {n, n, 1.0, 1.0, {0.0, 0.0}};
  s.background.sigma = {1.2, 0.15, 0.9};
  s.background.eps = {0.2, -0.05, 0.1};
  Material inner;
  // sigma1 + zeta1 = (sigma0^-1 + 0.6 I)^-1, sigma1 - zeta1 = sigma0 + 0.4 I.
  const Mat2 s0 = s.background.sigma.matrix();
  const Mat2 plus = (Mat2(s0.inverse()) + 0.6 * Mat2::Identity()).inverse();
  const Mat2 minus = s0 + 0.4 * Mat2::Identity();
  inner.sigma = SymTensor::from_matrix(0.5 * (plus + minus));
  inner.zeta = SymTensor::from_matrix(0.5 * (plus - minus));
  inner.eps = {0.22, -0.04, 0.09};
  s.inclusion = InclusionSpec{Ellipse{{0.45, 0.55}, 0.16, 0.1, 0.4}, inner};
  s.boundary.direction = Vec2(0.6, 0.8);
  s.constants.alpha0 = 1.5;
  s.constants.alpha1 = 3.0;
  s.constants.beta = 0.3;
  s.constants.delta = 0.05;
  s.constants.ell0 = 0.1;
  s.constants.ell1 = 0.02;
  return s;
}

}  // namespace fixtures
