#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "mlid/phases/phase_function.hpp"
#include "mlid/phases/region.hpp"

namespace mlid::phases {

using Complex = std::complex<double>;

// Complex samples on the uniform grid lo + i*(hi-lo)/(shape-1) per axis,
// first axis fastest.
struct SampleGrid {
  Box box;
  std::vector<int> shape;
  std::vector<Complex> values;

  double spacing(int axis) const { return box.width(axis) / (shape[axis] - 1); }
};

// Compactly supported complex density on R^d. Closed-form profiles are kept
// analytic so quadrature rules see the exact function; sampled densities are
// interpolated by tensor Catmull-Rom cubics.
class Density {
 public:
  using Profile = std::function<Complex(std::span<const double>)>;

  Density(int dim, Box support, ConvexRegion hull, Profile profile, bool known_zero = false);

  // amplitude * exp(-|xi - center|^2 / (2 s^2)), cut off outside the box of
  // half-width truncation*s.
  static Density gaussian(Point center, double stddev, Complex amplitude = 1.0, double truncation = 8.0);
  static Density indicator(Box box);
  // exp(1 - 1/(1 - |xi - c|^2/r^2)) inside the ball, 0 outside.
  static Density bump(Point center, double radius);
  static Density sampled(SampleGrid grid);
  static Density zero(int dim);

  Density modulated(std::span<const double> a) const;  // e^{i a.xi} g(xi)
  Density shifted(std::span<const double> xi0) const;  // g(xi - xi0)
  Density reflected() const;                           // g(-xi)
  Density scaled(Complex c) const;                     // c g(xi)
  Density multiplied(std::function<double(std::span<const double>)> w) const;

  int dim() const { return dim_; }
  const Box& box() const { return box_; }
  const ConvexRegion& hull() const { return hull_; }
  bool known_zero() const { return known_zero_; }

  Complex operator()(std::span<const double> xi) const;
  Complex at(double xi) const { return (*this)(std::span<const double>(&xi, 1)); }

  // Squared L2 norm by composite Gauss-Legendre over the support box.
  double l2_norm_squared(int panels_per_axis = 64, int nodes_per_panel = 8) const;

  SampleGrid materialize(const std::vector<int>& shape) const;

 private:
  int dim_;
  Box box_;
  ConvexRegion hull_;
  Profile profile_;
  bool known_zero_;
};

// True when every sample on the outer layer of the grid is at most tol in
// modulus (the compact-support convention for sampled data).
bool boundary_vanishes(const SampleGrid& grid, double tol = 0.0);

// g(xi) = (1 + |grad phi(xi)|^2)^{1/2} f(xi, phi(xi)), so that Eg is the
// Fourier transform of f times surface measure on the graph of phi.
using SurfaceFunction = std::function<Complex(std::span<const double> xi, double height)>;
Density density_from_surface_function(const PhaseFunction& phase, SurfaceFunction f, Box box);
// Pointwise inverse: f(xi, phi(xi)) = g(xi) / (1 + |grad phi(xi)|^2)^{1/2}.
Complex surface_value_from_density(const PhaseFunction& phase, const Density& g, std::span<const double> xi);

}  // namespace mlid::phases
