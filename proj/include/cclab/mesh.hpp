#pragma once

#include "cclab/linalg.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cclab {

using Index = std::int32_t;

struct Ball {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
};

/// A boundary edge traversed counter-clockwise with respect to its cell,
/// so the outward normal is the edge direction rotated clockwise.
struct BoundaryEdge {
  std::array<Index, 2> vertices;
  Index cell;
  double length;
  Vec2 midpoint;
  Vec2 normal;
};

/// Conforming triangulation of a planar domain.
///
/// Cells are stored counter-clockwise; a clockwise cell is rejected rather
/// than silently flipped. Boundary edges are ordered into closed loops.
/// Immutable after construction.
class Mesh {
 public:
  using Cell = std::array<Index, 3>;

  Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const BoundaryEdge> boundary_edges() const { return boundary_; }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }

  double cell_area(Index c) const { return areas_[c]; }
  const Vec2& cell_centroid(Index c) const { return centroids_[c]; }
  /// Rows are the constant gradients of the three barycentric hat functions.
  const Eigen::Matrix<double, 3, 2>& shape_gradients(Index c) const { return gradients_[c]; }

  /// Pairs of cells sharing an interior edge.
  std::span<const std::array<Index, 2>> cell_adjacency() const { return adjacency_; }

  /// Integral of each hat function over the domain.
  std::span<const double> vertex_mass() const { return vertex_mass_; }

  double area() const { return total_area_; }
  double h_max() const { return h_max_; }
  double perimeter() const;
  Vec2 bbox_min() const { return bbox_min_; }
  Vec2 bbox_max() const { return bbox_max_; }
  double diameter() const { return (bbox_max_ - bbox_min_).norm(); }

  /// Point-in-domain test by winding number over the boundary loops.
  bool contains(const Vec2& p) const;
  /// Euclidean distance from p to the nearest boundary edge.
  double distance_to_boundary(const Vec2& p) const;

 private:
  void build_geometry();
  void build_boundary();

  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  std::vector<double> areas_;
  std::vector<Vec2> centroids_;
  std::vector<Eigen::Matrix<double, 3, 2>> gradients_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<std::array<Index, 2>> adjacency_;
  std::vector<double> vertex_mass_;
  double total_area_ = 0.0;
  double h_max_ = 0.0;
  Vec2 bbox_min_{0.0, 0.0};
  Vec2 bbox_max_{0.0, 0.0};
};

/// Uniform triangulation of [x0, x0+width] x [y0, y0+height]; each grid
/// rectangle is split along its lower-left to upper-right diagonal.
Mesh build_rect_mesh(int nx, int ny, double width, double height, Vec2 origin = {0.0, 0.0});

/// Area of each cell intersected with the ball, by dyadic subdivision of the
/// cells cut by the circle (centroid inside-test at the finest level).
std::vector<double> cell_measure_in_ball(const Mesh& mesh, const Ball& ball, int levels = 4);

/// Line integral over the boundary of edge-wise constant data.
double boundary_integral(const Mesh& mesh, std::span<const double> edge_values);
complex boundary_integral(const Mesh& mesh, std::span<const complex> edge_values);

void write_vertices_csv(const Mesh& mesh, std::ostream& out);
void write_cells_csv(const Mesh& mesh, std::ostream& out);

}  // namespace cclab
