#include "fixtures.hpp"

#include "cclab/pipeline.hpp"
#include "cclab/power.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

using namespace cclab;
using fixtures::code_of;

namespace {

struct Solved {
  Scenario scenario;
  ComplexField u0;
  ComplexField u1;
};

Solved solve(const ScenarioSpec& spec) {
  Scenario sc(spec);
  auto u0 = solve_neumann(assemble(sc, Problem::Background, false));
  auto u1 = solve_neumann(assemble(sc, Problem::Perturbed, false));
  return {std::move(sc), std::move(u0), std::move(u1)};
}

}  // namespace

TEST_CASE("boundary power") {
  const Solved s = solve(fixtures::homogeneous(16));
  const auto h = s.scenario.boundary_data();
  // The patch solution x - 1/2 carries unit energy.
  const BoundaryPower p = boundary_power(s.u0, h);
  CHECK(p.hermitian == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(p.bilinear - 1.0) < 1e-9);

  ComplexField constant = s.u0;
  for (auto& v : constant.values) v = complex(0.7, -0.2);
  CHECK(std::abs(boundary_power(constant, h).bilinear) < 1e-15);
  CHECK(std::abs(boundary_power(constant, h).hermitian) < 1e-15);

  std::vector<complex> h2(h.begin(), h.end());
  for (auto& x : h2) x *= 2.0;
  ComplexField u2 = s.u0;
  for (auto& v : u2.values) v *= 2.0;
  CHECK(boundary_power(u2, h2).hermitian == doctest::Approx(4.0 * p.hermitian).epsilon(1e-14));

  const std::vector<complex> short_h(h.size() - 1);
  CHECK(code_of([&] { boundary_power(s.u0, short_h); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Cherkaev-Gibiansky blocks") {
  CHECK((cg_block(Material{}) - Mat4::Identity()).norm() < 1e-15);

  Material m;
  m.sigma = SymTensor::isotropic(2.0);
  m.zeta = SymTensor::isotropic(1.0);
  Vec4 d;
  d << 1.0 / 3, 1.0 / 3, 1.0, 1.0;
  CHECK((cg_block(m) - Mat4(d.asDiagonal())).norm() < 1e-15);

  m.eps = SymTensor::isotropic(1.0);
  Mat4 expected = Mat4::Zero();
  expected.topLeftCorner<2, 2>() = Mat2::Identity() / 3.0;
  expected.topRightCorner<2, 2>() = Mat2::Identity() / 3.0;
  expected.bottomLeftCorner<2, 2>() = Mat2::Identity() / 3.0;
  expected.bottomRightCorner<2, 2>() = Mat2::Identity() * 4.0 / 3.0;
  CHECK((cg_block(m) - expected).norm() < 1e-15);

  Material singular;
  singular.zeta = SymTensor::isotropic(-1.0);
  CHECK(code_of([&] { cg_block(singular); }) == ErrorCode::SingularMaterial);
}

TEST_CASE("Cherkaev-Gibiansky fields") {
  const auto mesh = std::make_shared<const Mesh>(build_rect_mesh(4, 4, 1.0, 1.0));
  const std::vector<Material> id(mesh->num_cells());
  auto v = cg_field(ComplexField::interpolate(mesh, [](const Vec2& p) { return complex(p.x()); }), id);
  for (const auto& x : v) CHECK((x - Vec4(1, 0, 0, 0)).norm() < 1e-13);
  v = cg_field(ComplexField::interpolate(mesh, [](const Vec2& p) { return complex(0.0, p.x()); }), id);
  for (const auto& x : v) CHECK((x - Vec4(0, 0, 1, 0)).norm() < 1e-13);

  // Defining relation (Re grad, Im flux) = B (Re flux, Im grad) on random data.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  std::vector<Material> mats(mesh->num_cells());
  for (auto& m : mats) {
    m.sigma = {1.5 + 0.2 * n(rng), 0.1 * n(rng), 1.5 + 0.2 * n(rng)};
    m.eps = {0.3 * n(rng), 0.3 * n(rng), 0.3 * n(rng)};
    m.zeta = {-0.3 + 0.05 * n(rng), 0.05 * n(rng), -0.3 + 0.05 * n(rng)};
  }
  ComplexField u{mesh, std::vector<complex>(mesh->num_vertices())};
  for (auto& z : u.values) z = complex(n(rng), n(rng));
  v = cg_field(u, mats);
  const auto grads = gradient_field(u);
  for (Index c = 0; c < mesh->num_cells(); ++c) {
    const CVec2 f = flux(mats[c], grads[c]);
    Vec4 lhs;
    lhs << grads[c].real(), f.imag();
    CHECK((cg_block(mats[c]) * v[c] - lhs).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("basic identity") {
  SUBCASE("homogeneous background") {
    const Solved s = solve(fixtures::homogeneous(16));
    const auto b = verify_basic_identity(s.scenario, s.u0, s.u0, 0, 0);
    CHECK(b.residual <= 1e-8);
    CHECK(b.volume == doctest::Approx(boundary_power(s.u0, s.scenario.boundary_data()).hermitian).epsilon(1e-10));
  }
  SUBCASE("all pairs, real and complex data") {
    for (complex amplitude : {complex(1.0, 0.0), complex(0.6, -0.8)}) {
      ScenarioSpec spec = fixtures::anisotropic(32);
      spec.boundary.amplitude = amplitude;
      const Solved s = solve(spec);
      const ComplexField* u[2] = {&s.u0, &s.u1};
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) CHECK(verify_basic_identity(s.scenario, *u[j], *u[k], j, k).residual <= 1e-8);
      }
    }
  }
  SUBCASE("zero data") {
    ScenarioSpec spec = fixtures::disk(8);
    spec.boundary.amplitude = 0.0;
    const Solved s = solve(spec);
    const auto b = verify_basic_identity(s.scenario, s.u0, s.u1, 0, 1);
    CHECK(b.volume == 0.0);
    CHECK(b.boundary == 0.0);
    CHECK(b.residual == 0.0);
  }
}

TEST_CASE("gap identity") {
  SUBCASE("no inclusion") {
    const Solved s = solve(fixtures::homogeneous(8));
    const auto g = verify_gap_identity(s.scenario, s.u0, s.u1);
    CHECK(s.u0.values == s.u1.values);
    CHECK(g.re_gap == 0.0);
    CHECK(g.line1 == 0.0);
    CHECK(g.line2 == 0.0);
  }
  SUBCASE("disk at 64x64") {
    const Solved s = solve(fixtures::disk(64, 0.15));
    const auto g = verify_gap_identity(s.scenario, s.u0, s.u1);
    CHECK(g.re_gap > 0.0);
    CHECK(g.residual1 <= 1e-6);
    CHECK(g.residual2 <= 1e-6);
    CHECK(g.cross_residual <= 1e-6);
  }
  SUBCASE("complex data uses the bilinear power") {
    ScenarioSpec spec = fixtures::anisotropic(32);
    spec.boundary.amplitude = complex(0.6, -0.8);
    const Solved s = solve(spec);
    const auto g = verify_gap_identity(s.scenario, s.u0, s.u1);
    CHECK(g.residual1 <= 1e-6);
    CHECK(g.residual2 <= 1e-6);
  }
}

TEST_CASE("jump matrices") {
  SUBCASE("negative zeta disk") {
    const auto cells = jump_matrices(Scenario(fixtures::disk(16)));
    REQUIRE_FALSE(cells.empty());
    Vec4 d;
    d << 3.0, 3.0, 0.75, 0.75;
    for (const auto& j : cells) {
      CHECK((j.m - 3.0 * Mat2::Identity()).norm() < 1e-14);
      CHECK((j.n - 0.75 * Mat2::Identity()).norm() < 1e-14);
      CHECK((j.c - Mat4(d.asDiagonal())).norm() < 1e-14);
      CHECK(j.d.norm() == 0.0);
      CHECK(j.lambda_min == doctest::Approx(0.75).epsilon(1e-13));
    }
  }
  SUBCASE("equal permittivities give D = 0") {
    ScenarioSpec spec = fixtures::anisotropic(16);
    spec.inclusion->material.eps = spec.background.eps;
    for (const auto& j : jump_matrices(Scenario(spec))) CHECK(j.d.norm() == 0.0);
  }
  SUBCASE("decomposition on generated cells") {
    for (const auto& sc : generate_ensemble(77, 5, EnsembleRanges{})) {
      for (const auto& j : jump_matrices(sc)) CHECK(j.decomposition_residual <= 1e-12);
    }
  }
}

TEST_CASE("quadratic form of C") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (const auto& sc : generate_ensemble(31, 4, EnsembleRanges{})) {
    const double beta = sc.constants().beta;
    for (const auto& j : jump_matrices(sc)) {
      const Mat2 e1 = sc.perturbed()[j.cell].eps.matrix();
      for (int k = 0; k < 4; ++k) {
        const Vec2 u(n(rng), n(rng));
        const Vec2 v(n(rng), n(rng));
        Vec4 x;
        x << u, v;
        const Vec2 w = u + e1 * v;
        const double form = x.dot(j.c * x);
        CHECK(form == doctest::Approx(w.dot(j.m * w) + v.dot(j.n * v)).epsilon(1e-12));
        CHECK(form >= beta * (w.squaredNorm() + v.squaredNorm()) * (1.0 - 1e-12));
      }
    }
  }
}

TEST_CASE("energy bounds") {
  SUBCASE("no inclusion") {
    const Solved s = solve(fixtures::homogeneous(8));
    const auto r = energy_bounds(s.scenario, s.u0, s.u1);
    CHECK(r.inclusion_energy == 0.0);
    CHECK(r.re_gap == 0.0);
    CHECK(r.lower == 0.0);
    CHECK(r.upper == 0.0);
    CHECK(r.inequality_holds());
  }
  SUBCASE("disk inclusion, unit background gradient") {
    const Solved s = solve(fixtures::disk(128));
    const auto r = energy_bounds(s.scenario, s.u0, s.u1);
    CHECK(std::abs(r.inclusion_energy - std::numbers::pi * 0.01) / (std::numbers::pi * 0.01) < 0.01);
    CHECK(r.lower > 0.0);
    CHECK(r.inequality_holds());
    CHECK(r.lower <= r.re_gap);
    CHECK(r.re_gap <= r.upper);
    CHECK(r.re_w0 == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("negative jump") {
    ScenarioSpec spec = fixtures::disk(16);
    spec.inclusion->material.zeta = SymTensor::isotropic(0.5);
    const Solved s = solve(spec);
    const auto r = analyze_power(s.scenario, s.u0, s.u1);
    CHECK_FALSE(r.guaranteed);
    REQUIRE(r.jump_lambda_min);
    CHECK(*r.jump_lambda_min < 0.0);
    CHECK(code_of([&] { energy_bounds(s.scenario, s.u0, s.u1); }) == ErrorCode::InadmissibleJump);
  }
}

TEST_CASE("ensemble invariants") {
  const auto ensemble = generate_ensemble(123, 6, EnsembleRanges{});
  const auto runs = run_ensemble(ensemble, 1);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const Scenario& sc = ensemble[i];
    for (Index c = 0; c < sc.mesh().num_cells(); ++c) {
      CHECK(Eigen::LLT<Mat4>(cg_block(sc.background()[c])).info() == Eigen::Success);
      CHECK(Eigen::LLT<Mat4>(cg_block(sc.perturbed()[c])).info() == Eigen::Success);
    }
    const PowerReport& p = runs[i].power;
    CHECK(p.inclusion_energy > 0.0);
    CHECK(p.re_gap > 0.0);
    CHECK(p.guaranteed);
    CHECK(p.inequality_holds());
    CHECK(p.max_basic_residual() <= 1e-8);
    CHECK(p.identity.residual1 <= 1e-6);
    CHECK(p.identity.residual2 <= 1e-6);
    // Pairing consistency with the (0, 0) identity.
    CHECK(p.re_w0 == doctest::Approx(p.basic[0].volume).epsilon(1e-10));
  }
}
