#include "mlid/phases/phase_function.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <cmath>

#include "mlid/common/error.hpp"

namespace mlid::phases {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

PhaseFunction PhaseFunction::paraboloid(int dim) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "phase dimension must be positive");
  PhaseFunction f;
  f.kind_ = Kind::kParaboloid;
  f.dim_ = dim;
  return f;
}

PhaseFunction PhaseFunction::polynomial(Polynomial p) {
  PhaseFunction f;
  f.kind_ = Kind::kPolynomial;
  f.dim_ = p.dim();
  f.poly_ = std::move(p);
  return f;
}

PhaseFunction PhaseFunction::tabulated(double lo, double step, std::vector<double> values) {
  require(values.size() >= 4, ErrorCode::kInvalidArgument, "tabulated phase needs at least 4 samples");
  require(step > 0, ErrorCode::kInvalidArgument, "tabulated phase step must be positive");
  for (double v : values) require(std::isfinite(v), ErrorCode::kNonFinite, "tabulated phase sample is not finite");
  PhaseFunction f;
  f.kind_ = Kind::kTabulated1D;
  f.dim_ = 1;
  f.spline_ = std::make_shared<const Spline>(values.begin(), values.end(), lo, step);
  f.domain_ = Box::interval(lo, lo + step * static_cast<double>(values.size() - 1));
  return f;
}

PhaseFunction PhaseFunction::reflected() const {
  PhaseFunction f = *this;
  f.in_sign_ = -in_sign_;
  f.out_sign_ = -out_sign_;
  if (domain_) {
    Box b = *domain_;
    for (int a = 0; a < b.dim(); ++a) {
      b.lo[a] = -domain_->hi[a];
      b.hi[a] = -domain_->lo[a];
    }
    f.domain_ = b;
  }
  return f;
}

double PhaseFunction::value1(double xi) const {
  const double u = in_sign_ * xi;
  switch (kind_) {
    case Kind::kParaboloid:
      return out_sign_ * u * u;
    case Kind::kPolynomial:
      return out_sign_ * poly_.value(std::span<const double>(&u, 1));
    case Kind::kTabulated1D:
      return out_sign_ * (*spline_)(u);
  }
  return 0.0;
}

double PhaseFunction::derivative1(double xi) const {
  const double u = in_sign_ * xi;
  const double s = in_sign_ * out_sign_;
  switch (kind_) {
    case Kind::kParaboloid:
      return s * 2.0 * u;
    case Kind::kPolynomial: {
      double g = 0.0;
      poly_.gradient(std::span<const double>(&u, 1), std::span<double>(&g, 1));
      return s * g;
    }
    case Kind::kTabulated1D:
      return s * spline_->prime(u);
  }
  return 0.0;
}

double PhaseFunction::value(std::span<const double> xi) const {
  require(xi.size() == static_cast<std::size_t>(dim_), ErrorCode::kDimensionMismatch,
          "phase evaluated at a point of the wrong dimension");
  if (dim_ == 1) return value1(xi[0]);
  if (kind_ == Kind::kParaboloid) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return out_sign_ * s;
  }
  thread_local std::vector<double> u;
  u.assign(xi.begin(), xi.end());
  for (auto& v : u) v *= in_sign_;
  return out_sign_ * poly_.value(u);
}

void PhaseFunction::gradient(std::span<const double> xi, std::span<double> out) const {
  require(xi.size() == static_cast<std::size_t>(dim_) && out.size() == xi.size(), ErrorCode::kDimensionMismatch,
          "phase gradient requested with mismatched dimensions");
  if (dim_ == 1) {
    out[0] = derivative1(xi[0]);
    return;
  }
  const double s = in_sign_ * out_sign_;
  if (kind_ == Kind::kParaboloid) {
    for (int a = 0; a < dim_; ++a) out[a] = s * 2.0 * in_sign_ * xi[a];
    return;
  }
  thread_local std::vector<double> u;
  u.assign(xi.begin(), xi.end());
  for (auto& v : u) v *= in_sign_;
  poly_.gradient(u, out);
  for (auto& v : out) v *= s;
}

std::vector<double> PhaseFunction::gradient(std::span<const double> xi) const {
  std::vector<double> out(xi.size());
  gradient(xi, out);
  return out;
}

std::string PhaseFunction::describe() const {
  std::string base;
  switch (kind_) {
    case Kind::kParaboloid:
      base = "paraboloid";
      break;
    case Kind::kPolynomial:
      base = "polynomial";
      break;
    case Kind::kTabulated1D:
      base = "tabulated";
      break;
  }
  if (in_sign_ < 0 || out_sign_ < 0) base += "(reflected)";
  return base;
}

}  // namespace mlid::phases
