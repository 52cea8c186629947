#include "cclab/mesh.hpp"

#include "cclab/csv.hpp"
#include "cclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

namespace cclab {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (vertices_.empty() || cells_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "mesh needs at least one cell");
  }
  for (const Cell& c : cells_) {
    for (Index v : c) {
      if (v < 0 || v >= num_vertices()) {
        throw Error(ErrorCode::InvalidArgument, "cell references vertex out of range");
      }
    }
  }
  build_geometry();
  build_boundary();
}

void Mesh::build_geometry() {
  const auto nc = cells_.size();
  areas_.resize(nc);
  centroids_.resize(nc);
  gradients_.resize(nc);
  vertex_mass_.assign(vertices_.size(), 0.0);

  bbox_min_ = bbox_max_ = vertices_.front();
  for (const Vec2& v : vertices_) {
    bbox_min_ = bbox_min_.cwiseMin(v);
    bbox_max_ = bbox_max_.cwiseMax(v);
  }

  for (std::size_t c = 0; c < nc; ++c) {
    const Vec2& p0 = vertices_[cells_[c][0]];
    const Vec2& p1 = vertices_[cells_[c][1]];
    const Vec2& p2 = vertices_[cells_[c][2]];
    const double twice_area = cross(p1 - p0, p2 - p0);
    if (!(twice_area > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "cell " + std::to_string(c) + " has non-positive signed area");
    }
    areas_[c] = 0.5 * twice_area;
    centroids_[c] = (p0 + p1 + p2) / 3.0;
    // grad(lambda_i) = rot(opposite edge) / (2A)
    const std::array<Vec2, 3> p{p0, p1, p2};
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = p[(i + 1) % 3];
      const Vec2& b = p[(i + 2) % 3];
      gradients_[c](i, 0) = (a.y() - b.y()) / twice_area;
      gradients_[c](i, 1) = (b.x() - a.x()) / twice_area;
    }
    for (int i = 0; i < 3; ++i) {
      vertex_mass_[cells_[c][i]] += areas_[c] / 3.0;
      h_max_ = std::max(h_max_, (p[i] - p[(i + 1) % 3]).norm());
    }
  }
  // Pairwise summation would change bits with cell order; plain ordered sum.
  total_area_ = std::accumulate(areas_.begin(), areas_.end(), 0.0);
}

void Mesh::build_boundary() {
  // Directed edge (a,b) -> owning cell. An interior edge appears once in each
  // direction; a boundary edge only in its counter-clockwise direction.
  std::map<std::pair<Index, Index>, Index> directed;
  for (Index c = 0; c < num_cells(); ++c) {
    for (int i = 0; i < 3; ++i) {
      const Index a = cells_[c][i];
      const Index b = cells_[c][(i + 1) % 3];
      if (!directed.emplace(std::make_pair(a, b), c).second) {
        throw Error(ErrorCode::InvalidArgument, "non-conforming mesh: edge shared with same orientation");
      }
    }
  }

  std::map<Index, std::pair<Index, Index>> next;  // start vertex -> (end vertex, cell)
  for (const auto& [edge, cell] : directed) {
    const auto [a, b] = edge;
    const auto twin = directed.find({b, a});
    if (twin != directed.end()) {
      if (a < b) adjacency_.push_back({cell, twin->second});
      continue;
    }
    if (!next.emplace(a, std::make_pair(b, cell)).second) {
      throw Error(ErrorCode::InvalidArgument, "non-manifold boundary at vertex " + std::to_string(a));
    }
  }
  std::sort(adjacency_.begin(), adjacency_.end());

  // Chain directed boundary edges into closed loops, starting each loop at
  // the smallest unvisited vertex so the order is independent of cell order.
  std::map<Index, bool> visited;
  for (const auto& [start, unused] : next) visited[start] = false;
  double enclosed = 0.0;
  for (const auto& [start, unused] : next) {
    if (visited[start]) continue;
    Index a = start;
    do {
      const auto it = next.find(a);
      if (it == next.end()) {
        throw Error(ErrorCode::InvalidArgument, "boundary edges do not form closed loops");
      }
      visited[a] = true;
      const auto [b, cell] = it->second;
      const Vec2& pa = vertices_[a];
      const Vec2& pb = vertices_[b];
      const Vec2 d = pb - pa;
      BoundaryEdge e;
      e.vertices = {a, b};
      e.cell = cell;
      e.length = d.norm();
      e.midpoint = 0.5 * (pa + pb);
      e.normal = Vec2(d.y(), -d.x()) / e.length;
      boundary_.push_back(e);
      enclosed += 0.5 * cross(pa, pb);
      a = b;
    } while (a != start);
  }
  if (std::abs(enclosed - total_area_) > 1e-10 * total_area_) {
    throw Error(ErrorCode::InvalidArgument, "cells overlap or leave holes: boundary area mismatch");
  }
}

double Mesh::perimeter() const {
  double sum = 0.0;
  for (const auto& e : boundary_) sum += e.length;
  return sum;
}

bool Mesh::contains(const Vec2& p) const {
  int winding = 0;
  for (const auto& e : boundary_) {
    const Vec2& a = vertices_[e.vertices[0]];
    const Vec2& b = vertices_[e.vertices[1]];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross(b - a, p - a) > 0.0) ++winding;
    } else if (b.y() <= p.y() && cross(b - a, p - a) < 0.0) {
      --winding;
    }
  }
  return winding != 0;
}

double Mesh::distance_to_boundary(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : boundary_) {
    best = std::min(best, segment_distance(p, vertices_[e.vertices[0]], vertices_[e.vertices[1]]));
  }
  return best;
}

Mesh build_rect_mesh(int nx, int ny, double width, double height, Vec2 origin) {
  if (nx < 1 || ny < 1 || !(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rectangle mesh needs positive cell counts and dimensions");
  }
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      vertices.emplace_back(origin.x() + width * i / nx, origin.y() + height * j / ny);
    }
  }
  std::vector<Mesh::Cell> cells;
  cells.reserve(2 * static_cast<std::size_t>(nx) * ny);
  const auto id = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(vertices), std::move(cells));
}

namespace {

double subdivided_overlap(const Vec2& a, const Vec2& b, const Vec2& c, const Ball& ball, int level) {
  if (level == 0) {
    const Vec2 centroid = (a + b + c) / 3.0;
    if ((centroid - ball.center).squaredNorm() > ball.radius * ball.radius) return 0.0;
    return 0.5 * std::abs(cross(b - a, c - a));
  }
  const Vec2 ab = 0.5 * (a + b);
  const Vec2 bc = 0.5 * (b + c);
  const Vec2 ca = 0.5 * (c + a);
  return subdivided_overlap(a, ab, ca, ball, level - 1) + subdivided_overlap(ab, b, bc, ball, level - 1) +
         subdivided_overlap(ca, bc, c, ball, level - 1) + subdivided_overlap(ab, bc, ca, ball, level - 1);
}

}  // namespace

std::vector<double> cell_measure_in_ball(const Mesh& mesh, const Ball& ball, int levels) {
  if (levels < 0) throw Error(ErrorCode::InvalidArgument, "subdivision level must be non-negative");
  std::vector<double> overlap(mesh.num_cells(), 0.0);
  if (!(ball.radius > 0.0)) return overlap;
  const double r2 = ball.radius * ball.radius;
  const auto verts = mesh.vertices();
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells()[c];
    const Vec2& a = verts[cell[0]];
    const Vec2& b = verts[cell[1]];
    const Vec2& d = verts[cell[2]];
    const bool all_inside = (a - ball.center).squaredNorm() <= r2 && (b - ball.center).squaredNorm() <= r2 &&
                            (d - ball.center).squaredNorm() <= r2;
    if (all_inside) {
      overlap[c] = mesh.cell_area(c);
      continue;
    }
    // The centroid-to-vertex radius bounds the cell; skip cells clearly apart.
    const Vec2& g = mesh.cell_centroid(c);
    const double reach = std::max({(a - g).norm(), (b - g).norm(), (d - g).norm()});
    if ((g - ball.center).norm() > ball.radius + reach) continue;
    overlap[c] = subdivided_overlap(a, b, d, ball, levels);
  }
  return overlap;
}

double boundary_integral(const Mesh& mesh, std::span<const double> edge_values) {
  if (edge_values.size() != mesh.boundary_edges().size()) {
    throw Error(ErrorCode::InvalidArgument, "one value per boundary edge expected");
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < edge_values.size(); ++e) sum += edge_values[e] * mesh.boundary_edges()[e].length;
  return sum;
}

complex boundary_integral(const Mesh& mesh, std::span<const complex> edge_values) {
  if (edge_values.size() != mesh.boundary_edges().size()) {
    throw Error(ErrorCode::InvalidArgument, "one value per boundary edge expected");
  }
  complex sum = 0.0;
  for (std::size_t e = 0; e < edge_values.size(); ++e) sum += edge_values[e] * mesh.boundary_edges()[e].length;
  return sum;
}

void write_vertices_csv(const Mesh& mesh, std::ostream& out) {
  out << "id,x,y\n";
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    out << v << ',' << fmt17(mesh.vertices()[v].x()) << ',' << fmt17(mesh.vertices()[v].y()) << '\n';
  }
}

void write_cells_csv(const Mesh& mesh, std::ostream& out) {
  out << "id,v0,v1,v2\n";
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells()[c];
    out << c << ',' << cell[0] << ',' << cell[1] << ',' << cell[2] << '\n';
  }
}

}  // namespace cclab
