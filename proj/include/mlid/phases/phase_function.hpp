#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlid/phases/polynomial.hpp"
#include "mlid/phases/region.hpp"

namespace boost::math::interpolators {
template <class Real>
class cardinal_cubic_b_spline;
}

namespace mlid::phases {

// Smooth phi: R^{d} -> R (d = n-1) with gradient. The stored base function is
// composed with optional sign flips, value = out * base(in * xi), which is how
// reflected copies are represented without changing kind.
class PhaseFunction {
 public:
  enum class Kind { kParaboloid, kPolynomial, kTabulated1D };

  static PhaseFunction paraboloid(int dim);
  static PhaseFunction polynomial(Polynomial p);
  // Cubic B-spline through values[i] at lo + i*step; the derivative is that of
  // the interpolant.
  static PhaseFunction tabulated(double lo, double step, std::vector<double> values);

  // xi -> -phi(-xi). With g(xi) -> g(-xi) this maps Eg(x) to Eg(-x).
  PhaseFunction reflected() const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  // True only for +|xi|^2 (either input sign).
  bool is_paraboloid() const { return kind_ == Kind::kParaboloid && out_sign_ > 0; }
  // Region where the phase may be evaluated (unbounded when empty).
  const std::optional<Box>& domain() const { return domain_; }
  const Polynomial* base_polynomial() const { return kind_ == Kind::kPolynomial ? &poly_ : nullptr; }

  double value(std::span<const double> xi) const;
  void gradient(std::span<const double> xi, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> xi) const;

  // One-variable fast paths (dim() == 1).
  double value1(double xi) const;
  double derivative1(double xi) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::kParaboloid;
  int dim_ = 0;
  double in_sign_ = 1.0;
  double out_sign_ = 1.0;
  Polynomial poly_;
  std::shared_ptr<const boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
  std::optional<Box> domain_;
};

}  // namespace mlid::phases
