#pragma once

#include <span>
#include <vector>

namespace mlid::phases {

using Point = std::vector<double>;

// Axis-aligned box [lo, hi].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double width(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  bool contains(std::span<const double> p, double slack = 0.0) const;
  Box expanded(double margin) const;

  static Box interval(double lo, double hi) { return Box{{lo}, {hi}}; }
  static Box cube(int dim, double lo, double hi);
};

// Convex set used as the hull of a density's support. Kinds: box, Euclidean
// ball, and (in the plane) a polygon with counter-clockwise vertices.
class ConvexRegion {
 public:
  enum class Kind { kBox, kBall, kPolygon };

  static ConvexRegion box(Box b);
  static ConvexRegion ball(Point center, double radius);
  // Hull of a planar point cloud (Andrew's monotone chain). In dimension 1
  // this is the enclosing interval; in dimension >= 3 the bounding box is
  // used instead of the exact hull.
  static ConvexRegion hull_of(const std::vector<Point>& points, int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Box& bounding_box() const { return bbox_; }
  const std::vector<Point>& vertices() const { return vertices_; }

  bool contains(std::span<const double> p, double tol = 1e-12) const;
  // Nearest point of the region (the point itself when inside).
  Point project(std::span<const double> p) const;

  // Points of a uniform grid with `per_axis` nodes per axis over the bounding
  // box that lie in the region; boundary nodes of the box are included, and
  // the centre (or a vertex) is added if the filter leaves nothing.
  std::vector<Point> grid_points(int per_axis) const;

 private:
  Kind kind_ = Kind::kBox;
  int dim_ = 0;
  Box bbox_;
  Point center_;
  double radius_ = 0.0;
  std::vector<Point> vertices_;
};

}  // namespace mlid::phases
