#pragma once

#include "cclab/forward.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace cclab {

/// Interpolation exponent of the three-ball inequality,
///   ((2 r1 / lambda)^-s - r2^-s) / (r0^-s - r2^-s).
/// Requires 0 < r0 < r1 < lambda r2 / 2, s > 0 and lambda in (0, 1].
double tau(double r0, double r1, double r2, double lambda, double s);

/// (integral over ball of |u|^2)^(1/2), clipped to the mesh, with centroid
/// values of |u|^2 on each cell overlap.
double ball_norm(const ComplexField& u, const Ball& ball);

/// Integral of |grad u|^2 over the ball, clipped to the mesh.
double ball_gradient_energy(const ComplexField& u, const Ball& ball);

/// Ellipticity constant lambda of sigma0 + i eps0 over all cells: lambda <= eig(sigma0) <= 1/lambda and
/// every |p_jk| <= 1/lambda, capped at 1.
double ellipticity(const Scenario& scenario);

struct ThreeBallParams {
  Vec2 center{0.5, 0.5};
  double r0 = 0.05;
  double r1 = 0.1;
  double r2 = 0.3;
  double lambda = 1.0;
  double s = 0.0;          // <= 0 selects the default max(K, 1) + 1
  double lipschitz = 0.0;  // L, gives K = 2 L and R = min(1, lambda / (20 L))
};

struct ThreeBallReport {
  Vec2 center;
  double r0 = 0.0, r1 = 0.0, r2 = 0.0;
  double lambda = 1.0;
  double s = 0.0;
  double k = 0.0;
  double big_r = 1.0;
  double tau = 0.0;
  double n0 = 0.0, n1 = 0.0, n2 = 0.0;
  double c_hat = 0.0;         // N1^2 / (N0^(2 tau) N2^(2 (1 - tau)))
  bool window = false;        // r0 < r1 < lambda r2 / 2 <= sqrt(lambda) R / 2
  bool s_above_k = false;
  bool degenerate = false;    // all three norms vanish; c_hat set to 1
};

/// Throws Error(InvalidArgument) when the outer ball leaves the domain or the
/// radii/exponent are invalid.
ThreeBallReport three_ball_check(const ComplexField& u0, const ThreeBallParams& params);

struct SmallnessReport {
  double rho = 0.0;
  std::vector<Vec2> samples;
  std::vector<double> ratios;  // int_{B_rho(x)} |grad u0|^2 / int |grad u0|^2
  double min_ratio = 0.0;
  Vec2 argmin{0.0, 0.0};
};

/// Keeps the candidates in the interior set {dist(x, boundary) > 4 rho}.
/// Throws Error(InvalidArgument) when none remain.
SmallnessReport smallness_chain(const ComplexField& u0, double rho, std::span<const Vec2> candidates);

/// Cell-centred n x n grid over the mesh bounding box.
std::vector<Vec2> sample_grid(const Mesh& mesh, int per_axis);

void write_three_ball_csv(std::span<const ThreeBallReport> rows, std::ostream& out);
void write_smallness_csv(const SmallnessReport& report, std::ostream& out);

}  // namespace cclab
