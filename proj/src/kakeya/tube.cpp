#include "mlid/kakeya/tube.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mlid/common/error.hpp"
#include "mlid/common/rng.hpp"

namespace mlid::kakeya {
namespace {

double dot(const Point& a, const Point& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

constexpr double kTol = 1e-12;

}  // namespace

CrossSection CrossSection::box(std::vector<double> sides) {
  CrossSection c;
  c.kind = Kind::kBox;
  c.sides = std::move(sides);
  return c;
}

CrossSection CrossSection::unit_ball(int m) {
  CrossSection c;
  c.kind = Kind::kBall;
  c.sides.assign(m, 0.0);
  c.radius = std::pow(std::tgamma(0.5 * m + 1.0) / std::pow(std::numbers::pi, 0.5 * m), 1.0 / m);
  return c;
}

int CrossSection::dim() const { return static_cast<int>(sides.size()); }

double CrossSection::volume() const {
  if (kind == Kind::kBall) {
    const int m = dim();
    return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0) * std::pow(radius, m);
  }
  return std::accumulate(sides.begin(), sides.end(), 1.0, std::multiplies<>());
}

bool CrossSection::contains(const std::vector<double>& u) const {
  if (kind == Kind::kBall) return dot(u, u) <= radius * radius;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) > 0.5 * sides[i]) return false;
  return true;
}

Tube Tube::make(Point direction, std::vector<Point> frame, CrossSection cross_section, Point offset) {
  const std::size_t n = direction.size();
  require(n >= 2 && offset.size() == n && frame.size() == n - 1 && cross_section.dim() == static_cast<int>(n - 1),
          ErrorCode::kDimensionMismatch, "tube needs a direction, n-1 frame vectors and an (n-1)-dim cross-section in R^n");
  require(std::abs(dot(direction, direction) - 1.0) <= kTol, ErrorCode::kInvalidArgument, "tube direction is not a unit vector");
  for (std::size_t i = 0; i < frame.size(); ++i) {
    require(frame[i].size() == n, ErrorCode::kDimensionMismatch, "frame vector dimension differs from the direction");
    require(std::abs(dot(frame[i], direction)) <= kTol, ErrorCode::kInvalidArgument, "frame is not orthogonal to the direction");
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const double want = i == k ? 1.0 : 0.0;
      require(std::abs(dot(frame[i], frame[k]) - want) <= kTol, ErrorCode::kInvalidArgument, "frame is not orthonormal");
    }
  }
  require(std::abs(cross_section.volume() - 1.0) <= kTol, ErrorCode::kInvalidArgument,
          "cross-section volume is " + std::to_string(cross_section.volume()) + ", not 1");
  return Tube{std::move(direction), std::move(frame), std::move(cross_section), std::move(offset)};
}

Tube Tube::along(Point direction, CrossSection cross_section, Point offset) {
  const std::size_t n = direction.size();
  const double len = std::sqrt(dot(direction, direction));
  require(len > 0, ErrorCode::kInvalidArgument, "tube direction is zero");
  for (auto& v : direction) v /= len;
  std::vector<Point> basis{direction};
  for (std::size_t a = 0; a < n && basis.size() < n; ++a) {
    Point v(n, 0.0);
    v[a] = 1.0;
    // Two passes of Gram-Schmidt for orthogonality at rounding level.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
      }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-6) continue;
    for (auto& x : v) x /= norm;
    basis.push_back(v);
  }
  return make(direction, std::vector<Point>(basis.begin() + 1, basis.end()), std::move(cross_section), std::move(offset));
}

Tube Tube::axis(int n, int axis, CrossSection cross_section, Point offset) {
  require(axis >= 0 && axis < n, ErrorCode::kInvalidArgument, "axis out of range");
  Point e(n, 0.0);
  e[axis] = 1.0;
  std::vector<Point> frame;
  for (int a = 0; a < n; ++a) {
    if (a == axis) continue;
    Point f(n, 0.0);
    f[a] = 1.0;
    frame.push_back(f);
  }
  return make(e, frame, std::move(cross_section), std::move(offset));
}

std::vector<double> Tube::cross_coordinates(const Point& x) const {
  Point y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - offset[i];
  std::vector<double> u(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) u[i] = dot(frame[i], y);
  return u;
}

double Tube::axial_coordinate(const Point& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += direction[i] * (x[i] - offset[i]);
  return s;
}

Tube Tube::rotated(const std::vector<double>& q) const {
  const int n = dim();
  require(q.size() == static_cast<std::size_t>(n) * n, ErrorCode::kDimensionMismatch, "rotation must be n x n");
  auto apply = [&](const Point& v) {
    Point out(n, 0.0);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out[r] += q[r * n + c] * v[c];
    return out;
  };
  Tube t = *this;
  t.direction = apply(direction);
  for (auto& f : t.frame) f = apply(f);
  t.offset = apply(offset);
  return t;
}

bool tube_contains(const Tube& tube, const Point& x) {
  require(x.size() == tube.direction.size(), ErrorCode::kDimensionMismatch, "point dimension differs from the tube");
  return tube.cross_section.contains(tube.cross_coordinates(x));
}

double wedge_magnitude(const std::vector<Tube>& tubes) {
  const int n = static_cast<int>(tubes.size());
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    require(tubes[j].dim() == n, ErrorCode::kDimensionMismatch, "n tubes in R^n are required for a wedge");
    for (int r = 0; r < n; ++r) m(r, j) = tubes[j].direction[r];
  }
  return std::abs(m.partialPivLu().determinant());
}

std::vector<double> random_rotation(int n, unsigned long long seed) {
  CounterRng rng(seed, 0x726f74);
  Eigen::MatrixXd g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < n; ++c)
    if (rr(c, c) < 0) q.col(c) *= -1.0;
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[r * n + c] = q(r, c);
  return out;
}

}  // namespace mlid::kakeya
