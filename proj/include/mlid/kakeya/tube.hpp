#pragma once

#include <vector>

#include "mlid/phases/region.hpp"

namespace mlid::kakeya {

using phases::Point;

// Unit-volume (n-1)-dimensional cross-section: a box with the given side
// lengths (product 1) along the frame vectors, or a centred ball.
struct CrossSection {
  enum class Kind { kBox, kBall };
  Kind kind = Kind::kBox;
  std::vector<double> sides;  // box only
  double radius = 0.0;        // ball only

  static CrossSection box(std::vector<double> sides);
  static CrossSection unit_box(int m) { return box(std::vector<double>(m, 1.0)); }
  static CrossSection unit_ball(int m);

  int dim() const;
  double volume() const;
  bool contains(const std::vector<double>& u) const;
};

// Doubly infinite cylinder {offset + s e + sum_i u_i frame_i : u in C}.
struct Tube {
  Point direction;
  std::vector<Point> frame;
  CrossSection cross_section;
  Point offset;

  int dim() const { return static_cast<int>(direction.size()); }

  // Validates |e| = 1, an orthonormal frame of e-perp and unit volume, all to
  // 1e-12.
  static Tube make(Point direction, std::vector<Point> frame, CrossSection cross_section, Point offset);
  // Normalises e and completes it to a frame (Gram-Schmidt against the
  // coordinate axes).
  static Tube along(Point direction, CrossSection cross_section, Point offset);
  // Tube along coordinate axis `axis`, frame = the other axes in order.
  static Tube axis(int n, int axis, CrossSection cross_section, Point offset);

  // Frame coordinates of x - offset.
  std::vector<double> cross_coordinates(const Point& x) const;
  // Along-axis coordinate of x - offset.
  double axial_coordinate(const Point& x) const;

  // Applies the orthogonal matrix q (row-major, n x n) to direction, frame
  // and offset.
  Tube rotated(const std::vector<double>& q) const;
};

bool tube_contains(const Tube& tube, const Point& x);

// |det(e(T_1), ..., e(T_n))|.
double wedge_magnitude(const std::vector<Tube>& tubes);

// Seeded random orthogonal n x n matrix (QR of a Gaussian matrix), row-major.
std::vector<double> random_rotation(int n, unsigned long long seed);

}  // namespace mlid::kakeya
