#include "mlid/phases/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlid/common/error.hpp"

namespace mlid::phases {

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= width(a);
  return v;
}

bool Box::contains(std::span<const double> p, double slack) const {
  for (int a = 0; a < dim(); ++a)
    if (p[a] < lo[a] - slack || p[a] > hi[a] + slack) return false;
  return true;
}

Box Box::expanded(double margin) const {
  Box out = *this;
  for (int a = 0; a < dim(); ++a) {
    out.lo[a] -= margin;
    out.hi[a] += margin;
  }
  return out;
}

Box Box::cube(int dim, double lo, double hi) {
  return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

Point nearest_on_segment(const Point& a, const Point& b, std::span<const double> p) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return {a[0] + s * dx, a[1] + s * dy};
}

Box bounding_box_of(const std::vector<Point>& points, int dim) {
  Box b{std::vector<double>(dim, std::numeric_limits<double>::infinity()),
        std::vector<double>(dim, -std::numeric_limits<double>::infinity())};
  for (const auto& p : points) {
    for (int a = 0; a < dim; ++a) {
      b.lo[a] = std::min(b.lo[a], p[a]);
      b.hi[a] = std::max(b.hi[a], p[a]);
    }
  }
  return b;
}

}  // namespace

ConvexRegion ConvexRegion::box(Box b) {
  ConvexRegion r;
  r.kind_ = Kind::kBox;
  r.dim_ = b.dim();
  r.bbox_ = std::move(b);
  return r;
}

ConvexRegion ConvexRegion::ball(Point center, double radius) {
  require(radius >= 0, ErrorCode::kInvalidArgument, "negative ball radius");
  ConvexRegion r;
  r.kind_ = Kind::kBall;
  r.dim_ = static_cast<int>(center.size());
  r.bbox_ = Box{center, center}.expanded(radius);
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

ConvexRegion ConvexRegion::hull_of(const std::vector<Point>& points, int dim) {
  require(!points.empty(), ErrorCode::kEmptySupport, "hull of an empty point set");
  const Box bbox = bounding_box_of(points, dim);
  if (dim != 2) return box(bbox);

  std::vector<Point> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return box(bbox);
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return box(bbox);

  ConvexRegion r;
  r.kind_ = Kind::kPolygon;
  r.dim_ = 2;
  r.bbox_ = bbox;
  r.vertices_ = std::move(hull);
  return r;
}

bool ConvexRegion::contains(std::span<const double> p, double tol) const {
  require(p.size() == static_cast<std::size_t>(dim_), ErrorCode::kDimensionMismatch,
          "point dimension differs from region dimension");
  switch (kind_) {
    case Kind::kBox:
      return bbox_.contains(p, tol);
    case Kind::kBall: {
      double d2 = 0.0;
      for (int a = 0; a < dim_; ++a) d2 += (p[a] - center_[a]) * (p[a] - center_[a]);
      return std::sqrt(d2) <= radius_ + tol;
    }
    case Kind::kPolygon: {
      const Point q{p[0], p[1]};
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % vertices_.size()];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (cross(a, b, q) < -tol * len) return false;
      }
      return true;
    }
  }
  return false;
}

Point ConvexRegion::project(std::span<const double> p) const {
  Point out(p.begin(), p.end());
  switch (kind_) {
    case Kind::kBox:
      for (int a = 0; a < dim_; ++a) out[a] = std::clamp(out[a], bbox_.lo[a], bbox_.hi[a]);
      return out;
    case Kind::kBall: {
      double d2 = 0.0;
      for (int a = 0; a < dim_; ++a) d2 += (p[a] - center_[a]) * (p[a] - center_[a]);
      const double d = std::sqrt(d2);
      if (d <= radius_) return out;
      for (int a = 0; a < dim_; ++a) out[a] = center_[a] + (p[a] - center_[a]) * radius_ / d;
      return out;
    }
    case Kind::kPolygon: {
      if (contains(p, 0.0)) return out;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point q = nearest_on_segment(vertices_[i], vertices_[(i + 1) % vertices_.size()], p);
        const double d = std::hypot(q[0] - p[0], q[1] - p[1]);
        if (d < best) {
          best = d;
          out = q;
        }
      }
      return out;
    }
  }
  return out;
}

std::vector<Point> ConvexRegion::grid_points(int per_axis) const {
  require(per_axis >= 1, ErrorCode::kInvalidArgument, "grid needs at least one point per axis");
  std::vector<Point> out;
  std::vector<int> idx(dim_, 0);
  Point p(dim_);
  while (true) {
    for (int a = 0; a < dim_; ++a) {
      const double s = per_axis == 1 ? 0.5 : static_cast<double>(idx[a]) / (per_axis - 1);
      p[a] = bbox_.lo[a] + s * bbox_.width(a);
    }
    if (contains(p, 1e-12)) out.push_back(p);
    int a = 0;
    while (a < dim_ && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == dim_) break;
  }
  if (out.empty()) {
    if (kind_ == Kind::kBall) out.push_back(center_);
    else if (kind_ == Kind::kPolygon) out.push_back(vertices_.front());
    else out.push_back(bbox_.lo);
  }
  return out;
}

}  // namespace mlid::phases
