#include "cclab/power.hpp"

#include "cclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cclab {

namespace {

void require_same_mesh(const Scenario& scenario, const ComplexField& u) {
  if (u.mesh.get() != &scenario.mesh() && (u.mesh->num_vertices() != scenario.mesh().num_vertices() ||
                                           u.mesh->num_cells() != scenario.mesh().num_cells())) {
    throw Error(ErrorCode::InvalidArgument, "field and scenario live on different meshes");
  }
}

std::span<const Material> materials_of(const Scenario& s, int which) {
  if (which != 0 && which != 1) throw Error(ErrorCode::InvalidArgument, "problem index must be 0 or 1");
  return which == 0 ? s.background() : s.perturbed();
}

/// Map (Re grad, Im grad) -> v for the background law.
Mat4 background_field_map(const Material& bg) {
  Mat4 t = Mat4::Zero();
  t.topLeftCorner<2, 2>() = bg.sigma.matrix();
  t.topRightCorner<2, 2>() = -bg.eps.matrix();
  t.bottomRightCorner<2, 2>() = Mat2::Identity();
  return t;
}

Vec4 eigen_extremes(const Mat4& sym) {
  const auto ev = Eigen::SelfAdjointEigenSolver<Mat4>(sym, Eigen::EigenvaluesOnly).eigenvalues();
  return ev;
}

}  // namespace

BoundaryPower boundary_power(const ComplexField& u, std::span<const complex> h) {
  const auto edges = u.mesh->boundary_edges();
  if (h.size() != edges.size()) throw Error(ErrorCode::InvalidArgument, "boundary data does not match the mesh");
  BoundaryPower p;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const complex trace = 0.5 * (u.values[edges[e].vertices[0]] + u.values[edges[e].vertices[1]]);
    p.bilinear += edges[e].length * trace * h[e];
    p.hermitian += edges[e].length * (trace.real() * h[e].real() + trace.imag() * h[e].imag());
  }
  return p;
}

Mat4 cg_block(const Material& m) {
  const Mat2 s = m.sigma.matrix() + m.zeta.matrix();
  const double det = s.determinant();
  if (!(std::abs(det) > 1e-14 * std::max(1.0, s.squaredNorm()))) {
    throw Error(ErrorCode::SingularMaterial, "sigma + zeta is singular");
  }
  const Mat2 s_inv = symmetrized(Mat2(s.inverse()));
  const Mat2 e = m.eps.matrix();
  const Mat2 upper = s_inv * e;
  Mat4 b;
  b.topLeftCorner<2, 2>() = s_inv;
  b.topRightCorner<2, 2>() = upper;
  b.bottomLeftCorner<2, 2>() = upper.transpose();
  b.bottomRightCorner<2, 2>() = symmetrized(Mat2(m.sigma.matrix() - m.zeta.matrix() + e * s_inv * e));
  return b;
}

std::vector<Vec4> cg_field(const ComplexField& u, std::span<const Material> materials) {
  const auto grads = gradient_field(u);
  if (materials.size() != grads.size()) throw Error(ErrorCode::InvalidArgument, "one material per cell expected");
  std::vector<Vec4> v(grads.size());
  for (std::size_t c = 0; c < grads.size(); ++c) {
    const CVec2 f = flux(materials[c], grads[c]);
    v[c] << f.real(), grads[c].imag();
  }
  return v;
}

BasicIdentity verify_basic_identity(const Scenario& scenario, const ComplexField& uj, const ComplexField& uk, int j,
                                    int k) {
  require_same_mesh(scenario, uj);
  require_same_mesh(scenario, uk);
  const auto mj = materials_of(scenario, j);
  const auto mk = materials_of(scenario, k);
  const auto vj = cg_field(uj, mj);
  const auto vk = cg_field(uk, mk);
  const Mesh& mesh = scenario.mesh();

  BasicIdentity out;
  double ejj = 0.0;
  double ekk = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const Mat4 bj = cg_block(mj[c]);
    out.volume += mesh.cell_area(c) * (bj * vj[c]).dot(vk[c]);
    ejj += mesh.cell_area(c) * (bj * vj[c]).dot(vj[c]);
    ekk += mesh.cell_area(c) * (cg_block(mk[c]) * vk[c]).dot(vk[c]);
  }
  const auto h = scenario.boundary_data();
  const auto edges = mesh.boundary_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e].vertices;
    const double re_uj = 0.5 * (uj.values[a].real() + uj.values[b].real());
    const double im_uk = 0.5 * (uk.values[a].imag() + uk.values[b].imag());
    out.boundary += edges[e].length * (re_uj * h[e].real() + im_uk * h[e].imag());
  }
  const double scale = std::max({std::abs(out.volume), std::abs(out.boundary), std::sqrt(ejj * ekk)});
  out.residual = scale > 0.0 ? std::abs(out.volume - out.boundary) / scale : 0.0;
  return out;
}

GapIdentity verify_gap_identity(const Scenario& scenario, const ComplexField& u0, const ComplexField& u1) {
  require_same_mesh(scenario, u0);
  require_same_mesh(scenario, u1);
  const Mesh& mesh = scenario.mesh();
  const auto v0 = cg_field(u0, scenario.background());
  const auto v1 = cg_field(u1, scenario.perturbed());
  const auto h = scenario.boundary_data();

  GapIdentity out;
  out.re_gap = (boundary_power(u1, h).bilinear - boundary_power(u0, h).bilinear).real();

  double b0_diff = 0.0;   // int B0 (v0-v1)^2
  double b1_diff = 0.0;   // int B1 (v0-v1)^2
  double jump_v1 = 0.0;   // int_D (B1-B0) v1.v1
  double jump_v0 = 0.0;   // int_D (B1-B0) v0.v0
  double energy0 = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const Mat4 b0 = cg_block(scenario.background()[c]);
    const Vec4 dv = v0[c] - v1[c];
    const double area = mesh.cell_area(c);
    b0_diff += area * (b0 * dv).dot(dv);
    energy0 += area * (b0 * v0[c]).dot(v0[c]);
    if (scenario.in_inclusion(c)) {
      const Mat4 b1 = cg_block(scenario.perturbed()[c]);
      const Mat4 jump = b1 - b0;
      b1_diff += area * (b1 * dv).dot(dv);
      jump_v1 += area * (jump * v1[c]).dot(v1[c]);
      jump_v0 += area * (jump * v0[c]).dot(v0[c]);
    } else {
      b1_diff += area * (b0 * dv).dot(dv);
    }
  }
  out.line1 = b0_diff + jump_v1;
  out.line2 = -b1_diff + jump_v0;

  // Relative to the gap, with a floor tied to the background energy so an
  // exactly vanishing gap does not divide by zero.
  const double floor = 1e-13 * energy0;
  const double scale = std::max(std::abs(out.re_gap), floor);
  if (scale > 0.0) {
    out.residual1 = std::abs(out.line1 - out.re_gap) / scale;
    out.residual2 = std::abs(out.line2 - out.re_gap) / scale;
    const double lhs = b0_diff + b1_diff;
    const double rhs = jump_v0 - jump_v1;
    out.cross_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
  }
  return out;
}

std::vector<JumpCell> jump_matrices(const Scenario& scenario) {
  std::vector<JumpCell> out;
  for (Index c : scenario.inclusion_cells()) {
    const Material& bg = scenario.background()[c];
    const Material& pt = scenario.perturbed()[c];
    const Mat2 s0 = bg.sigma.matrix();
    const Mat2 s0_inv = symmetrized(Mat2(s0.inverse()));
    const Mat2 e0 = bg.eps.matrix();
    const Mat2 e1 = pt.eps.matrix();
    const Mat2 de = e1 - e0;
    const Mat2 plus = pt.sigma.matrix() + pt.zeta.matrix();
    if (!(std::abs(plus.determinant()) > 1e-14 * std::max(1.0, plus.squaredNorm()))) {
      throw Error(ErrorCode::SingularMaterial, "sigma1 + zeta1 is singular on cell " + std::to_string(c));
    }

    JumpCell j;
    j.cell = c;
    j.m = symmetrized(Mat2(plus.inverse() - s0_inv));
    j.n = pt.sigma.matrix() - pt.zeta.matrix() - s0;
    j.c.topLeftCorner<2, 2>() = j.m;
    j.c.topRightCorner<2, 2>() = j.m * e1;
    j.c.bottomLeftCorner<2, 2>() = e1 * j.m;
    j.c.bottomRightCorner<2, 2>() = j.n + e1 * j.m * e1;
    j.d.topLeftCorner<2, 2>() = Mat2::Zero();
    j.d.topRightCorner<2, 2>() = s0_inv * de;
    j.d.bottomLeftCorner<2, 2>() = de * s0_inv;
    j.d.bottomRightCorner<2, 2>() = de * s0_inv * e1 + e0 * s0_inv * de;

    const Mat4 jump = cg_block(pt) - cg_block(bg);
    j.decomposition_residual = (jump - j.c - j.d).norm();
    const Vec4 ev = eigen_extremes(symmetrized(jump));
    j.lambda_min = ev[0];
    j.lambda_max = ev[3];
    out.push_back(j);
  }
  return out;
}

double PowerReport::max_basic_residual() const {
  double r = 0.0;
  for (const auto& b : basic) r = std::max(r, b.residual);
  return r;
}

PowerReport analyze_power(const Scenario& scenario, const ComplexField& u0, const ComplexField& u1) {
  require_same_mesh(scenario, u0);
  require_same_mesh(scenario, u1);
  const Mesh& mesh = scenario.mesh();
  const auto h = scenario.boundary_data();

  PowerReport r;
  const BoundaryPower p0 = boundary_power(u0, h);
  const BoundaryPower p1 = boundary_power(u1, h);
  r.w0 = p0.bilinear;
  r.w = p1.bilinear;
  r.gap = r.w - r.w0;
  r.re_gap = r.gap.real();
  // The background energy int B0 v0.v0; equals Re W0 for real data.
  r.re_w0 = p0.hermitian;
  r.hermitian_w0 = p0.hermitian;
  r.hermitian_w = p1.hermitian;

  const ComplexField* fields[2] = {&u0, &u1};
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) r.basic[2 * j + k] = verify_basic_identity(scenario, *fields[j], *fields[k], j, k);
  }
  r.identity = verify_gap_identity(scenario, u0, u1);

  const auto grads = gradient_field(u0);
  const auto jumps = jump_matrices(scenario);
  if (!jumps.empty()) {
    r.c1 = std::numeric_limits<double>::infinity();
    r.c2 = 0.0;
  }
  for (const JumpCell& j : jumps) {
    const Material& bg = scenario.background()[j.cell];
    r.inclusion_energy += mesh.cell_area(j.cell) * grads[j.cell].squaredNorm();

    const Eigen::JacobiSVD<Mat4> svd(background_field_map(bg));
    const double s_max = svd.singularValues()[0];
    const double s_min = svd.singularValues()[3];
    const double b0_min = eigen_extremes(cg_block(bg))[0];

    // Lower route: b0|v0 - v1|^2 + a|v1|^2 >= (a b0 / (a + b0)) |v0|^2.
    const double a = std::max(j.lambda_min, 0.0);
    const double lower_factor = a > 0.0 ? a * b0_min / (a + b0_min) * s_min * s_min : 0.0;
    const double upper_factor = std::max(j.lambda_max, 0.0) * s_max * s_max;
    r.c1 = std::min(r.c1, lower_factor);
    r.c2 = std::max(r.c2, upper_factor);

    r.jump_lambda_min = r.jump_lambda_min ? std::min(*r.jump_lambda_min, j.lambda_min) : j.lambda_min;
    r.jump_lambda_max = r.jump_lambda_max ? std::max(*r.jump_lambda_max, j.lambda_max) : j.lambda_max;
  }
  r.guaranteed = !r.jump_lambda_min || *r.jump_lambda_min >= 0.0;
  r.lower = r.c1 * r.inclusion_energy;
  r.upper = r.c2 * r.inclusion_energy;
  // Slack covers round-off in the discrete identities only.
  const double slack = 1e-10 * (std::abs(r.re_gap) + r.upper) + 1e-14 * std::abs(r.hermitian_w0);
  r.lower_holds = r.lower <= r.re_gap + slack;
  r.upper_holds = r.re_gap <= r.upper + slack;
  return r;
}

PowerReport energy_bounds(const Scenario& scenario, const ComplexField& u0, const ComplexField& u1) {
  PowerReport r = analyze_power(scenario, u0, u1);
  if (!r.guaranteed) {
    throw Error(ErrorCode::InadmissibleJump, "B1 - B0 has a negative eigenvalue on the inclusion");
  }
  return r;
}

}  // namespace cclab
