#include "cclab/inclusion.hpp"

#include "cclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cclab {

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double polyline_distance(const Vec2& p, const std::vector<Vec2>& closed) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < closed.size(); ++k) {
    best = std::min(best, segment_distance(p, closed[k], closed[(k + 1) % closed.size()]));
  }
  return best;
}

bool polygon_contains(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      inside = !inside;
    }
  }
  return inside;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Inclusion::Inclusion(Shape shape) : shape_(std::move(shape)) {
  std::visit(overloaded{
                 [](const Disk& d) {
                   if (!(d.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
                 },
                 [](const Ellipse& e) {
                   if (!(e.semi_major > 0.0) || !(e.semi_minor > 0.0)) {
                     throw Error(ErrorCode::InvalidArgument, "ellipse semi-axes must be positive");
                   }
                 },
                 [](const Polygon& p) {
                   if (p.vertices.size() < 3) throw Error(ErrorCode::InvalidArgument, "polygon needs 3 vertices");
                 },
             },
             shape_);
  if (const auto* poly = std::get_if<Polygon>(&shape_)) {
    outline_ = poly->vertices;
    double signed_area = 0.0;
    for (std::size_t k = 0; k < outline_.size(); ++k) {
      const Vec2& a = outline_[k];
      const Vec2& b = outline_[(k + 1) % outline_.size()];
      signed_area += 0.5 * (a.x() * b.y() - a.y() * b.x());
    }
    if (signed_area < 0.0) std::reverse(outline_.begin(), outline_.end());
    std::get<Polygon>(shape_).vertices = outline_;
  } else if (std::holds_alternative<Ellipse>(shape_)) {
    outline_ = boundary_points(1024);
  }
  const auto pts = boundary_points(256);
  bbox_min_ = bbox_max_ = pts.front();
  for (const Vec2& p : pts) {
    bbox_min_ = bbox_min_.cwiseMin(p);
    bbox_max_ = bbox_max_.cwiseMax(p);
  }
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    // Exact extents of a rotated ellipse.
    const double c = std::cos(e->angle);
    const double s = std::sin(e->angle);
    const Vec2 half(std::hypot(e->semi_major * c, e->semi_minor * s), std::hypot(e->semi_major * s, e->semi_minor * c));
    bbox_min_ = e->center - half;
    bbox_max_ = e->center + half;
  } else if (const auto* d = std::get_if<Disk>(&shape_)) {
    bbox_min_ = d->center - Vec2::Constant(d->radius);
    bbox_max_ = d->center + Vec2::Constant(d->radius);
  }
}

std::string Inclusion::kind() const {
  return std::visit(overloaded{[](const Disk&) { return std::string("disk"); },
                               [](const Ellipse&) { return std::string("ellipse"); },
                               [](const Polygon&) { return std::string("polygon"); }},
                    shape_);
}

bool Inclusion::contains(const Vec2& p) const {
  return std::visit(overloaded{
                        [&](const Disk& d) { return (p - d.center).squaredNorm() <= d.radius * d.radius; },
                        [&](const Ellipse& e) {
                          const double c = std::cos(e.angle);
                          const double s = std::sin(e.angle);
                          const Vec2 q = p - e.center;
                          const double u = (c * q.x() + s * q.y()) / e.semi_major;
                          const double v = (-s * q.x() + c * q.y()) / e.semi_minor;
                          return u * u + v * v <= 1.0;
                        },
                        [&](const Polygon& poly) { return polygon_contains(poly.vertices, p); },
                    },
                    shape_);
}

double Inclusion::depth(const Vec2& p) const {
  if (const auto* d = std::get_if<Disk>(&shape_)) return d->radius - (p - d->center).norm();
  const double dist = polyline_distance(p, outline_);
  return contains(p) ? dist : -dist;
}

double Inclusion::area() const {
  return std::visit(overloaded{
                        [](const Disk& d) { return std::numbers::pi * d.radius * d.radius; },
                        [](const Ellipse& e) { return std::numbers::pi * e.semi_major * e.semi_minor; },
                        [](const Polygon& poly) {
                          double a = 0.0;
                          const auto& v = poly.vertices;
                          for (std::size_t k = 0; k < v.size(); ++k) {
                            const Vec2& p = v[k];
                            const Vec2& q = v[(k + 1) % v.size()];
                            a += 0.5 * (p.x() * q.y() - p.y() * q.x());
                          }
                          return a;
                        },
                    },
                    shape_);
}

double Inclusion::eroded_area(double l) const {
  if (l <= 0.0) return area();
  if (const auto* d = std::get_if<Disk>(&shape_)) {
    const double r = std::max(0.0, d->radius - l);
    return std::numbers::pi * r * r;
  }
  constexpr int n = 200;
  const Vec2 span = bbox_max_ - bbox_min_;
  const double cell = span.x() * span.y() / (n * n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 p = bbox_min_ + Vec2(span.x() * (i + 0.5) / n, span.y() * (j + 0.5) / n);
      if (contains(p) && depth(p) > l) sum += cell;
    }
  }
  return sum;
}

std::vector<Vec2> Inclusion::boundary_points(int samples) const {
  return std::visit(overloaded{
                        [&](const Disk& d) {
                          std::vector<Vec2> pts(samples);
                          for (int k = 0; k < samples; ++k) {
                            const double t = 2.0 * std::numbers::pi * k / samples;
                            pts[k] = d.center + d.radius * Vec2(std::cos(t), std::sin(t));
                          }
                          return pts;
                        },
                        [&](const Ellipse& e) {
                          std::vector<Vec2> pts(samples);
                          const double c = std::cos(e.angle);
                          const double s = std::sin(e.angle);
                          for (int k = 0; k < samples; ++k) {
                            const double t = 2.0 * std::numbers::pi * k / samples;
                            const double u = e.semi_major * std::cos(t);
                            const double v = e.semi_minor * std::sin(t);
                            pts[k] = e.center + Vec2(c * u - s * v, s * u + c * v);
                          }
                          return pts;
                        },
                        [](const Polygon& poly) { return poly.vertices; },
                    },
                    shape_);
}

}  // namespace cclab
