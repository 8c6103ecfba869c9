#include "mlid/common/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "mlid/common/error.hpp"

namespace mlid {
namespace {

QuadratureRule1D compute_gauss_legendre(int m) {
  QuadratureRule1D rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[m - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const QuadratureRule1D& gauss_legendre(int m) {
  require(m >= 1 && m <= 256, ErrorCode::kInvalidArgument,
          "Gauss-Legendre order must be in [1, 256], got " + std::to_string(m));
  static std::mutex mutex;
  static std::map<int, QuadratureRule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gauss_legendre(m)).first;
  return it->second;
}

QuadratureRule1D composite_gauss_legendre(double lo, double hi, int panels, int m) {
  require(panels >= 1, ErrorCode::kInvalidArgument, "panel count must be positive");
  const QuadratureRule1D& base = gauss_legendre(m);
  QuadratureRule1D rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * m);
  rule.weights.reserve(static_cast<std::size_t>(panels) * m);
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double mid = a + 0.5 * width;
    for (int i = 0; i < m; ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

TensorRule tensor_product(const std::vector<QuadratureRule1D>& axes) {
  TensorRule rule;
  rule.dim = axes.size();
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.size();
  if (axes.empty()) {
    rule.weights.assign(1, 1.0);
    return rule;
  }
  rule.coords.resize(total * rule.dim);
  rule.weights.resize(total);
  std::vector<std::size_t> idx(rule.dim, 0);
  for (std::size_t n = 0; n < total; ++n) {
    double w = 1.0;
    for (std::size_t d = 0; d < rule.dim; ++d) {
      rule.coords[n * rule.dim + d] = axes[d].nodes[idx[d]];
      w *= axes[d].weights[idx[d]];
    }
    rule.weights[n] = w;
    for (std::size_t d = rule.dim; d-- > 0;) {
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
    }
  }
  return rule;
}

}  // namespace mlid
