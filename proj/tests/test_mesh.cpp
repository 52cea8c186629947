#include "cclab/error.hpp"
#include "cclab/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace cclab;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("rectangle mesh counts") {
  const Mesh one = build_rect_mesh(1, 1, 1.0, 1.0);
  CHECK(one.num_vertices() == 4);
  CHECK(one.num_cells() == 2);
  CHECK(one.boundary_edges().size() == 4);

  const Mesh two = build_rect_mesh(2, 2, 1.0, 1.0);
  CHECK(two.num_vertices() == 9);
  CHECK(two.num_cells() == 8);
  CHECK(two.boundary_edges().size() == 8);

  const Mesh m = build_rect_mesh(7, 3, 2.0, 0.5);
  CHECK(m.num_vertices() == 8 * 4);
  CHECK(m.num_cells() == 2 * 7 * 3);
  CHECK(m.boundary_edges().size() == 2 * (7 + 3));
}

TEST_CASE("h_max of a uniform grid") {
  const Mesh m = build_rect_mesh(64, 64, 1.0, 1.0);
  CHECK(m.h_max() == doctest::Approx(std::sqrt(2.0) / 64).epsilon(1e-14));
}

TEST_CASE("invalid rectangle parameters") {
  CHECK(code_of([] { build_rect_mesh(0, 2, 1.0, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { build_rect_mesh(2, 2, 0.0, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { build_rect_mesh(2, 2, 1.0, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("mesh invariants") {
  const Mesh m = build_rect_mesh(9, 5, 1.5, 0.7, {-0.2, 0.3});
  double total = 0.0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    CHECK(m.cell_area(c) > 0.0);
    total += m.cell_area(c);
  }
  CHECK(std::abs(total - 1.5 * 0.7) <= 1e-12 * 1.05);
  CHECK(std::abs(m.area() - 1.05) <= 1e-12);

  for (const auto& e : m.boundary_edges()) {
    CHECK(std::abs(e.normal.norm() - 1.0) < 1e-14);
    CHECK(e.normal.dot(e.midpoint - m.cell_centroid(e.cell)) > 0.0);
  }
  // Closed loop: each edge starts where the previous ended.
  const auto edges = m.boundary_edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    CHECK(edges[k].vertices[1] == edges[(k + 1) % edges.size()].vertices[0]);
  }
  CHECK(m.perimeter() == doctest::Approx(2 * (1.5 + 0.7)).epsilon(1e-14));

  // Conforming: every interior edge is shared by exactly two cells.
  std::map<std::pair<Index, Index>, int> count;
  for (const auto& c : m.cells()) {
    for (int k = 0; k < 3; ++k) {
      const Index a = c[k];
      const Index b = c[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::size_t boundary = 0;
  for (const auto& [edge, n] : count) {
    CHECK((n == 1 || n == 2));
    if (n == 1) ++boundary;
  }
  CHECK(boundary == edges.size());
  // Euler characteristic of a disk.
  CHECK(static_cast<long>(m.num_vertices()) - static_cast<long>(count.size()) + m.num_cells() == 1);
}

TEST_CASE("malformed meshes are rejected") {
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(code_of([&] { Mesh(square, {{0, 2, 1}, {0, 3, 2}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { Mesh(square, {{0, 1, 7}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { Mesh(square, {}); }) == ErrorCode::InvalidArgument);
  // Two overlapping cells covering the same triangle.
  CHECK(code_of([&] { Mesh(square, {{0, 1, 2}, {0, 1, 2}}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ball overlap") {
  SUBCASE("ball containing the domain gives full cells") {
    const Mesh m = build_rect_mesh(8, 8, 1.0, 1.0);
    const auto w = cell_measure_in_ball(m, {{0.5, 0.5}, 2.0});
    for (Index c = 0; c < m.num_cells(); ++c) CHECK(w[c] == doctest::Approx(m.cell_area(c)).epsilon(1e-14));
  }
  SUBCASE("quarter disk area at 128x128") {
    const Mesh m = build_rect_mesh(128, 128, 1.0, 1.0);
    const auto w = cell_measure_in_ball(m, {{0.5, 0.5}, 0.25});
    double total = 0.0;
    for (double x : w) total += x;
    const double exact = std::numbers::pi * 0.0625;
    CHECK(std::abs(total - exact) / exact < 5e-3);
  }
  SUBCASE("vanishing radius") {
    const Mesh m = build_rect_mesh(16, 16, 1.0, 1.0);
    double previous = 1.0;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
      double total = 0.0;
      for (double x : cell_measure_in_ball(m, {{0.43, 0.51}, r})) total += x;
      CHECK(total <= previous);
      previous = total;
    }
    CHECK(previous < 1e-6);
  }
  SUBCASE("refinement of the subdivision reduces the error") {
    const Mesh m = build_rect_mesh(16, 16, 1.0, 1.0);
    const Ball b{{0.47, 0.52}, 0.3};
    const double exact = std::numbers::pi * 0.09;
    double err_coarse = 0.0;
    double err_fine = 0.0;
    for (int levels : {1, 5}) {
      double total = 0.0;
      for (double x : cell_measure_in_ball(m, b, levels)) total += x;
      (levels == 1 ? err_coarse : err_fine) = std::abs(total - exact);
    }
    CHECK(err_fine < err_coarse);
    CHECK(err_fine / exact < 2e-3);
  }
  SUBCASE("clipped to the mesh") {
    const Mesh m = build_rect_mesh(64, 64, 1.0, 1.0);
    double total = 0.0;
    for (double x : cell_measure_in_ball(m, {{0.0, 0.0}, 0.5})) total += x;
    const double exact = std::numbers::pi * 0.25 / 4.0;
    CHECK(std::abs(total - exact) / exact < 1e-2);
  }
}

TEST_CASE("boundary integrals") {
  const Mesh m = build_rect_mesh(10, 10, 1.0, 1.0);
  const auto edges = m.boundary_edges();
  std::vector<double> ones(edges.size(), 1.0);
  CHECK(boundary_integral(m, std::span<const double>(ones)) == doctest::Approx(4.0).epsilon(1e-14));

  std::vector<double> xs;
  for (const auto& e : edges) xs.push_back(e.midpoint.x());
  CHECK(boundary_integral(m, std::span<const double>(xs)) == doctest::Approx(2.0).epsilon(1e-14));

  std::vector<double> zeros(edges.size(), 0.0);
  CHECK(boundary_integral(m, std::span<const double>(zeros)) == 0.0);

  std::vector<complex> z(edges.size(), complex(0.0, 2.0));
  CHECK(std::abs(boundary_integral(m, std::span<const complex>(z)) - complex(0.0, 8.0)) < 1e-13);

  std::vector<double> short_values(edges.size() - 1, 1.0);
  CHECK(code_of([&] { boundary_integral(m, std::span<const double>(short_values)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("discrete Gauss theorem") {
  const Mesh m = build_rect_mesh(12, 7, 1.3, 0.9);
  const Vec2 q(0.7, -1.9);
  std::vector<double> volume(m.num_vertices(), 0.0);
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto& g = m.shape_gradients(c);
    for (int a = 0; a < 3; ++a) volume[m.cells()[c][a]] += m.cell_area(c) * g.row(a).dot(q);
  }
  std::vector<double> flux(m.num_vertices(), 0.0);
  for (const auto& e : m.boundary_edges()) {
    for (Index v : e.vertices) flux[v] += 0.5 * e.length * q.dot(e.normal);
  }
  double scale = 0.0;
  for (double f : flux) scale = std::max(scale, std::abs(f));
  for (Index v = 0; v < m.num_vertices(); ++v) CHECK(std::abs(volume[v] - flux[v]) <= 1e-12 * scale);

  // A piecewise-constant field has zero total against the partition of unity.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double total = 0.0;
  double magnitude = 0.0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    const Vec2 qc(u(rng), u(rng));
    const auto& g = m.shape_gradients(c);
    for (int a = 0; a < 3; ++a) {
      total += m.cell_area(c) * g.row(a).dot(qc);
      magnitude += std::abs(m.cell_area(c) * g.row(a).dot(qc));
    }
  }
  CHECK(std::abs(total) <= 1e-12 * magnitude);
}

TEST_CASE("shape gradients reproduce linear functions") {
  const Mesh m = build_rect_mesh(3, 4, 1.0, 2.0);
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto& g = m.shape_gradients(c);
    Vec2 grad = Vec2::Zero();
    for (int a = 0; a < 3; ++a) {
      const Vec2& p = m.vertices()[m.cells()[c][a]];
      grad += (2.0 * p.x() - 3.0 * p.y()) * g.row(a).transpose();
    }
    CHECK((grad - Vec2(2.0, -3.0)).norm() < 1e-12);
  }
}

TEST_CASE("geometry queries") {
  const Mesh m = build_rect_mesh(4, 4, 2.0, 1.0, {1.0, -1.0});
  CHECK(m.contains({2.0, -0.5}));
  CHECK_FALSE(m.contains({0.5, -0.5}));
  CHECK(m.distance_to_boundary({2.0, -0.5}) == doctest::Approx(0.5));
  CHECK(m.distance_to_boundary({1.25, -0.5}) == doctest::Approx(0.25));
  CHECK(m.diameter() == doctest::Approx(std::sqrt(5.0)));
  double mass = 0.0;
  for (double w : m.vertex_mass()) mass += w;
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mesh csv export") {
  const Mesh m = build_rect_mesh(1, 1, 1.0, 1.0);
  std::ostringstream v;
  write_vertices_csv(m, v);
  CHECK(v.str().rfind("id,x,y\n0,0,0\n1,1,0\n", 0) == 0);
  std::ostringstream c;
  write_cells_csv(m, c);
  const std::string cells = c.str();
  CHECK(cells.rfind("id,v0,v1,v2\n", 0) == 0);
  CHECK(std::count(cells.begin(), cells.end(), '\n') == 3);
}
