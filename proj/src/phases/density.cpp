#include "mlid/phases/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/common/quadrature.hpp"

namespace mlid::phases {
namespace {

double catmull_rom(double t) {
  t = std::abs(t);
  if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

void check_point(const Density& d, std::span<const double> xi) {
  require(xi.size() == static_cast<std::size_t>(d.dim()), ErrorCode::kDimensionMismatch,
          "density evaluated at a point of the wrong dimension");
}

}  // namespace

Density::Density(int dim, Box support, ConvexRegion hull, Profile profile, bool known_zero)
    : dim_(dim), box_(std::move(support)), hull_(std::move(hull)), profile_(std::move(profile)), known_zero_(known_zero) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "density dimension must be positive");
  require(box_.dim() == dim && hull_.dim() == dim, ErrorCode::kDimensionMismatch,
          "density support and hull must match the density dimension");
  for (int a = 0; a < dim; ++a)
    require(box_.hi[a] >= box_.lo[a], ErrorCode::kInvalidArgument, "density support box is inverted");
}

Density Density::gaussian(Point center, double stddev, Complex amplitude, double truncation) {
  require(stddev > 0, ErrorCode::kInvalidArgument, "gaussian standard deviation must be positive");
  const int dim = static_cast<int>(center.size());
  Box box = Box{center, center}.expanded(truncation * stddev);
  const double inv = 1.0 / (2.0 * stddev * stddev);
  auto profile = [center, inv, amplitude, box](std::span<const double> xi) -> Complex {
    if (!box.contains(xi)) return 0.0;
    double r2 = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) r2 += (xi[a] - center[a]) * (xi[a] - center[a]);
    return amplitude * std::exp(-r2 * inv);
  };
  return Density(dim, box, ConvexRegion::box(box), profile, amplitude == 0.0);
}

Density Density::indicator(Box box) {
  const int dim = box.dim();
  auto profile = [box](std::span<const double> xi) -> Complex { return box.contains(xi) ? 1.0 : 0.0; };
  return Density(dim, box, ConvexRegion::box(box), profile);
}

Density Density::bump(Point center, double radius) {
  require(radius > 0, ErrorCode::kInvalidArgument, "bump radius must be positive");
  const int dim = static_cast<int>(center.size());
  const Box box = Box{center, center}.expanded(radius);
  auto profile = [center, radius](std::span<const double> xi) -> Complex {
    double r2 = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) r2 += (xi[a] - center[a]) * (xi[a] - center[a]);
    const double s = r2 / (radius * radius);
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s));
  };
  return Density(dim, box, ConvexRegion::ball(center, radius), profile);
}

Density Density::sampled(SampleGrid grid) {
  const int dim = grid.box.dim();
  require(grid.shape.size() == static_cast<std::size_t>(dim), ErrorCode::kDimensionMismatch,
          "sample grid shape differs from box dimension");
  std::size_t total = 1;
  for (int s : grid.shape) {
    require(s >= 2, ErrorCode::kInvalidArgument, "sample grid needs at least 2 nodes per axis");
    total *= static_cast<std::size_t>(s);
  }
  require(grid.values.size() == total, ErrorCode::kDimensionMismatch, "sample count differs from grid shape");
  for (const auto& v : grid.values)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorCode::kNonFinite, "non-finite density sample");

  // The interpolant of a nonzero node reaches two cells in every direction.
  std::vector<Point> reach;
  std::vector<int> idx(dim, 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (int a = 0; a < dim; ++a) {
      idx[a] = static_cast<int>(rem % grid.shape[a]);
      rem /= grid.shape[a];
    }
    if (grid.values[i] == 0.0) continue;
    for (unsigned corner = 0; corner < (1u << dim); ++corner) {
      Point p(dim);
      for (int a = 0; a < dim; ++a) {
        const double h = grid.spacing(a);
        const double offset = (corner >> a) & 1u ? 2.0 : -2.0;
        p[a] = std::clamp(grid.box.lo[a] + (idx[a] + offset) * h, grid.box.lo[a], grid.box.hi[a]);
      }
      reach.push_back(std::move(p));
    }
  }
  const bool zero = reach.empty();
  ConvexRegion hull = zero ? ConvexRegion::box(grid.box) : ConvexRegion::hull_of(reach, dim);
  Box box = grid.box;

  auto data = std::make_shared<const SampleGrid>(std::move(grid));
  auto profile = [data, dim](std::span<const double> xi) -> Complex {
    const SampleGrid& g = *data;
    if (!g.box.contains(xi)) return 0.0;
    std::vector<int> base(dim);
    std::vector<std::array<double, 4>> w(dim);
    for (int a = 0; a < dim; ++a) {
      const double u = (xi[a] - g.box.lo[a]) / g.spacing(a);
      base[a] = static_cast<int>(std::floor(u)) - 1;
      for (int k = 0; k < 4; ++k) w[a][k] = catmull_rom(u - (base[a] + k));
    }
    Complex total = 0.0;
    const int stencil = 1 << (2 * dim);
    for (int s = 0; s < stencil; ++s) {
      double weight = 1.0;
      std::size_t flat = 0, stride = 1;
      bool inside = true;
      for (int a = 0; a < dim; ++a) {
        const int k = (s >> (2 * a)) & 3;
        const int node = base[a] + k;
        if (node < 0 || node >= g.shape[a]) {
          inside = false;
          break;
        }
        weight *= w[a][k];
        flat += static_cast<std::size_t>(node) * stride;
        stride *= g.shape[a];
      }
      if (inside && weight != 0.0) total += weight * g.values[flat];
    }
    return total;
  };
  return Density(dim, box, hull, profile, zero);
}

Density Density::zero(int dim) {
  const Box box = Box::cube(dim, 0.0, 0.0);
  return Density(dim, box, ConvexRegion::box(box), [](std::span<const double>) { return Complex(0.0); }, true);
}

Density Density::modulated(std::span<const double> a) const {
  require(a.size() == static_cast<std::size_t>(dim_), ErrorCode::kDimensionMismatch, "modulation vector dimension");
  Point freq(a.begin(), a.end());
  auto inner = profile_;
  auto profile = [inner, freq](std::span<const double> xi) -> Complex {
    double phase = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) phase += freq[k] * xi[k];
    return std::polar(1.0, phase) * inner(xi);
  };
  return Density(dim_, box_, hull_, profile, known_zero_);
}

Density Density::shifted(std::span<const double> xi0) const {
  require(xi0.size() == static_cast<std::size_t>(dim_), ErrorCode::kDimensionMismatch, "shift vector dimension");
  Point s(xi0.begin(), xi0.end());
  Box box = box_;
  for (int a = 0; a < dim_; ++a) {
    box.lo[a] += s[a];
    box.hi[a] += s[a];
  }
  ConvexRegion hull = ConvexRegion::box(box);
  if (hull_.kind() == ConvexRegion::Kind::kBall) {
    Point c(dim_);
    for (int a = 0; a < dim_; ++a) c[a] = 0.5 * (box.lo[a] + box.hi[a]);
    hull = ConvexRegion::ball(c, 0.5 * box.width(0));
  } else if (hull_.kind() == ConvexRegion::Kind::kPolygon) {
    std::vector<Point> vs = hull_.vertices();
    for (auto& v : vs)
      for (int a = 0; a < dim_; ++a) v[a] += s[a];
    hull = ConvexRegion::hull_of(vs, dim_);
  }
  auto inner = profile_;
  auto profile = [inner, s](std::span<const double> xi) -> Complex {
    thread_local std::vector<double> u;
    u.assign(xi.begin(), xi.end());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] -= s[k];
    return inner(u);
  };
  return Density(dim_, box, hull, profile, known_zero_);
}

Density Density::reflected() const {
  Box box = box_;
  for (int a = 0; a < dim_; ++a) {
    box.lo[a] = -box_.hi[a];
    box.hi[a] = -box_.lo[a];
  }
  ConvexRegion hull = ConvexRegion::box(box);
  if (hull_.kind() == ConvexRegion::Kind::kBall) {
    Point c(dim_);
    for (int a = 0; a < dim_; ++a) c[a] = 0.5 * (box.lo[a] + box.hi[a]);
    hull = ConvexRegion::ball(c, 0.5 * box.width(0));
  } else if (hull_.kind() == ConvexRegion::Kind::kPolygon) {
    std::vector<Point> vs = hull_.vertices();
    for (auto& v : vs)
      for (auto& c : v) c = -c;
    hull = ConvexRegion::hull_of(vs, dim_);
  }
  auto inner = profile_;
  auto profile = [inner](std::span<const double> xi) -> Complex {
    thread_local std::vector<double> u;
    u.assign(xi.begin(), xi.end());
    for (auto& v : u) v = -v;
    return inner(u);
  };
  return Density(dim_, box, hull, profile, known_zero_);
}

Density Density::scaled(Complex c) const {
  auto inner = profile_;
  auto profile = [inner, c](std::span<const double> xi) -> Complex { return c * inner(xi); };
  return Density(dim_, box_, hull_, profile, known_zero_ || c == 0.0);
}

Density Density::multiplied(std::function<double(std::span<const double>)> w) const {
  auto inner = profile_;
  auto profile = [inner, w](std::span<const double> xi) -> Complex { return w(xi) * inner(xi); };
  return Density(dim_, box_, hull_, profile, known_zero_);
}

Complex Density::operator()(std::span<const double> xi) const {
  check_point(*this, xi);
  if (known_zero_) return 0.0;
  return profile_(xi);
}

double Density::l2_norm_squared(int panels_per_axis, int nodes_per_panel) const {
  if (known_zero_) return 0.0;
  std::vector<QuadratureRule1D> axes;
  for (int a = 0; a < dim_; ++a)
    axes.push_back(composite_gauss_legendre(box_.lo[a], box_.hi[a], panels_per_axis, nodes_per_panel));
  const TensorRule rule = tensor_product(axes);
  std::vector<double> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i)
    terms[i] = rule.weights[i] * std::norm(profile_(std::span<const double>(rule.point(i), dim_)));
  return pairwise_sum(terms);
}

SampleGrid Density::materialize(const std::vector<int>& shape) const {
  require(shape.size() == static_cast<std::size_t>(dim_), ErrorCode::kDimensionMismatch, "grid shape dimension");
  SampleGrid g{box_, shape, {}};
  std::size_t total = 1;
  for (int s : shape) {
    require(s >= 2, ErrorCode::kInvalidArgument, "grid needs at least 2 nodes per axis");
    total *= static_cast<std::size_t>(s);
  }
  g.values.resize(total);
  Point p(dim_);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (int a = 0; a < dim_; ++a) {
      const int k = static_cast<int>(rem % shape[a]);
      rem /= shape[a];
      p[a] = box_.lo[a] + k * g.spacing(a);
    }
    g.values[i] = (*this)(p);
  }
  return g;
}

bool boundary_vanishes(const SampleGrid& grid, double tol) {
  const int dim = grid.box.dim();
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    std::size_t rem = i;
    bool on_boundary = false;
    for (int a = 0; a < dim; ++a) {
      const int k = static_cast<int>(rem % grid.shape[a]);
      rem /= grid.shape[a];
      if (k == 0 || k == grid.shape[a] - 1) on_boundary = true;
    }
    if (on_boundary && std::abs(grid.values[i]) > tol) return false;
  }
  return true;
}

Density density_from_surface_function(const PhaseFunction& phase, SurfaceFunction f, Box box) {
  require(phase.dim() == box.dim(), ErrorCode::kDimensionMismatch, "phase and box dimensions differ");
  const int dim = box.dim();
  auto profile = [phase, f, box](std::span<const double> xi) -> Complex {
    if (!box.contains(xi)) return 0.0;
    thread_local std::vector<double> grad;
    grad.resize(xi.size());
    phase.gradient(xi, grad);
    double s = 1.0;
    for (double g : grad) s += g * g;
    return std::sqrt(s) * f(xi, phase.value(xi));
  };
  return Density(dim, box, ConvexRegion::box(box), profile);
}

Complex surface_value_from_density(const PhaseFunction& phase, const Density& g, std::span<const double> xi) {
  const std::vector<double> grad = phase.gradient(xi);
  double s = 1.0;
  for (double v : grad) s += v * v;
  return g(xi) / std::sqrt(s);
}

}  // namespace mlid::phases
