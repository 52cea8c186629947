#include "cclab/continuation.hpp"

#include "cclab/csv.hpp"
#include "cclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace cclab {

double tau(double r0, double r1, double r2, double lambda, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponent s must be positive");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in (0, 1]");
  if (!(r0 > 0.0 && r0 < r1 && r1 < 0.5 * lambda * r2)) {
    throw Error(ErrorCode::InvalidArgument, "radii must satisfy 0 < r0 < r1 < lambda r2 / 2");
  }
  const double mid = std::pow(2.0 * r1 / lambda, -s);
  const double outer = std::pow(r2, -s);
  const double inner = std::pow(r0, -s);
  return (mid - outer) / (inner - outer);
}

double ball_norm(const ComplexField& u, const Ball& ball) {
  const auto overlap = cell_measure_in_ball(*u.mesh, ball);
  double sum = 0.0;
  for (Index c = 0; c < u.mesh->num_cells(); ++c) {
    if (overlap[c] > 0.0) sum += overlap[c] * std::norm(u.at_centroid(c));
  }
  return std::sqrt(sum);
}

double ball_gradient_energy(const ComplexField& u, const Ball& ball) {
  const auto overlap = cell_measure_in_ball(*u.mesh, ball);
  const auto grads = gradient_field(u);
  double sum = 0.0;
  for (Index c = 0; c < u.mesh->num_cells(); ++c) {
    if (overlap[c] > 0.0) sum += overlap[c] * grads[c].squaredNorm();
  }
  return sum;
}

double ellipticity(const Scenario& scenario) {
  double lambda = 1.0;
  for (const Material& m : scenario.background()) {
    const Vec2 ev = sym_eigenvalues(m.sigma.matrix());
    const Mat2 s = m.sigma.matrix();
    const Mat2 e = m.eps.matrix();
    double max_entry = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) max_entry = std::max(max_entry, std::hypot(s(i, j), e(i, j)));
    }
    lambda = std::min({lambda, ev[0], 1.0 / ev[1], 1.0 / max_entry});
  }
  return lambda;
}

ThreeBallReport three_ball_check(const ComplexField& u0, const ThreeBallParams& p) {
  const Mesh& mesh = *u0.mesh;
  if (!mesh.contains(p.center) || mesh.distance_to_boundary(p.center) < p.r2 * (1.0 - 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "outer ball leaves the domain");
  }
  if (p.lipschitz < 0.0) throw Error(ErrorCode::InvalidArgument, "Lipschitz bound must be non-negative");

  ThreeBallReport r;
  r.center = p.center;
  r.r0 = p.r0;
  r.r1 = p.r1;
  r.r2 = p.r2;
  r.lambda = p.lambda;
  r.k = 2.0 * p.lipschitz;  // n L with n = 2
  r.s = p.s > 0.0 ? p.s : std::max(r.k, 1.0) + 1.0;
  r.big_r = p.lipschitz > 0.0 ? std::min(1.0, p.lambda / (20.0 * p.lipschitz)) : 1.0;
  r.tau = tau(p.r0, p.r1, p.r2, p.lambda, r.s);
  r.window = p.r0 < p.r1 && p.r1 < 0.5 * p.lambda * p.r2 && 0.5 * p.lambda * p.r2 <= 0.5 * std::sqrt(p.lambda) * r.big_r;
  r.s_above_k = r.s > r.k;

  r.n0 = ball_norm(u0, {p.center, p.r0});
  r.n1 = ball_norm(u0, {p.center, p.r1});
  r.n2 = ball_norm(u0, {p.center, p.r2});
  if (r.n0 == 0.0 && r.n1 == 0.0 && r.n2 == 0.0) {
    r.degenerate = true;
    r.c_hat = 1.0;
  } else if (r.n1 == 0.0) {
    r.c_hat = 0.0;
  } else if (r.n0 == 0.0) {
    r.c_hat = std::numeric_limits<double>::infinity();
  } else {
    r.c_hat = std::exp(2.0 * std::log(r.n1) - 2.0 * r.tau * std::log(r.n0) - 2.0 * (1.0 - r.tau) * std::log(r.n2));
  }
  return r;
}

SmallnessReport smallness_chain(const ComplexField& u0, double rho, std::span<const Vec2> candidates) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  const Mesh& mesh = *u0.mesh;
  SmallnessReport r;
  r.rho = rho;
  for (const Vec2& x : candidates) {
    if (mesh.contains(x) && mesh.distance_to_boundary(x) > 4.0 * rho) r.samples.push_back(x);
  }
  if (r.samples.empty()) throw Error(ErrorCode::InvalidArgument, "no sample point lies farther than 4 rho from the boundary");

  const auto grads = gradient_field(u0);
  double total = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) total += mesh.cell_area(c) * grads[c].squaredNorm();
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateData, "background field has zero energy");

  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const Vec2& x : r.samples) {
    const auto overlap = cell_measure_in_ball(mesh, {x, rho});
    double local = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      if (overlap[c] > 0.0) local += overlap[c] * grads[c].squaredNorm();
    }
    const double ratio = local / total;
    r.ratios.push_back(ratio);
    if (ratio < r.min_ratio) {
      r.min_ratio = ratio;
      r.argmin = x;
    }
  }
  return r;
}

std::vector<Vec2> sample_grid(const Mesh& mesh, int per_axis) {
  if (per_axis < 1) throw Error(ErrorCode::InvalidArgument, "sample grid needs at least one point per axis");
  const Vec2 lo = mesh.bbox_min();
  const Vec2 span = mesh.bbox_max() - lo;
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (int j = 0; j < per_axis; ++j) {
    for (int i = 0; i < per_axis; ++i) {
      pts.emplace_back(lo.x() + span.x() * (i + 0.5) / per_axis, lo.y() + span.y() * (j + 0.5) / per_axis);
    }
  }
  return pts;
}

void write_three_ball_csv(std::span<const ThreeBallReport> rows, std::ostream& out) {
  out << "x0,y0,r0,r1,r2,lambda,s,K,R,tau,n0,n1,n2,c_hat,window,s_above_k,degenerate\n";
  for (const auto& r : rows) {
    out << fmt17(r.center.x()) << ',' << fmt17(r.center.y()) << ',' << fmt17(r.r0) << ',' << fmt17(r.r1) << ','
        << fmt17(r.r2) << ',' << fmt17(r.lambda) << ',' << fmt17(r.s) << ',' << fmt17(r.k) << ',' << fmt17(r.big_r)
        << ',' << fmt17(r.tau) << ',' << fmt17(r.n0) << ',' << fmt17(r.n1) << ',' << fmt17(r.n2) << ','
        << fmt17(r.c_hat) << ',' << r.window << ',' << r.s_above_k << ',' << r.degenerate << '\n';
  }
}

void write_smallness_csv(const SmallnessReport& report, std::ostream& out) {
  out << "x,y,rho,ratio\n";
  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    out << fmt17(report.samples[i].x()) << ',' << fmt17(report.samples[i].y()) << ',' << fmt17(report.rho) << ','
        << fmt17(report.ratios[i]) << '\n';
  }
}

}  // namespace cclab
