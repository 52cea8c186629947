#pragma once

#include "cclab/linalg.hpp"

#include <string>
#include <variant>
#include <vector>

namespace cclab {

struct Disk {
  Vec2 center{0.5, 0.5};
  double radius = 0.1;
};

struct Ellipse {
  Vec2 center{0.5, 0.5};
  double semi_major = 0.1;
  double semi_minor = 0.05;
  double angle = 0.0;  // radians, major axis against the x axis
};

/// Simple polygon, vertices in counter-clockwise order.
struct Polygon {
  std::vector<Vec2> vertices;
};

using Shape = std::variant<Disk, Ellipse, Polygon>;

/// Geometric description of the inclusion D.
class Inclusion {
 public:
  explicit Inclusion(Shape shape);

  const Shape& shape() const { return shape_; }
  std::string kind() const;

  bool contains(const Vec2& p) const;
  /// Distance from p to the boundary of D when p is inside, negative outside.
  double depth(const Vec2& p) const;
  /// Exact area from the shape formula.
  double area() const;
  /// Area of D_l = {x in D : dist(x, boundary D) > l}. Exact for disks,
  /// grid quadrature on the depth function otherwise.
  double eroded_area(double l) const;
  /// Points on the boundary; polygons return their vertices.
  std::vector<Vec2> boundary_points(int samples = 2048) const;
  Vec2 bbox_min() const { return bbox_min_; }
  Vec2 bbox_max() const { return bbox_max_; }

 private:
  Shape shape_;
  std::vector<Vec2> outline_;  // closed polyline used for non-disk distances
  Vec2 bbox_min_;
  Vec2 bbox_max_;
};

}  // namespace cclab
