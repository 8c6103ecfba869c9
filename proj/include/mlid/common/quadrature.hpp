#pragma once

#include <cstddef>
#include <vector>

namespace mlid {

struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// m-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_m).
const QuadratureRule1D& gauss_legendre(int m);

// Composite Gauss-Legendre on [lo, hi] with `panels` equal panels of m nodes.
QuadratureRule1D composite_gauss_legendre(double lo, double hi, int panels, int m);

// Tensor-product rule over a box; nodes are stored point-major
// (node i occupies coords[i*dim .. i*dim+dim)).
struct TensorRule {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
};

TensorRule tensor_product(const std::vector<QuadratureRule1D>& axes);

}  // namespace mlid
