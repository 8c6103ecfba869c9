#include "mlid/oscint/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlid/common/error.hpp"
#include "mlid/lincore/block_det.hpp"
#include "mlid/lincore/kvector.hpp"

namespace mlid::oscint {
namespace {

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

std::vector<double> joined(std::span<const double> x, std::span<const double> xi) {
  std::vector<double> v(x.begin(), x.end());
  v.insert(v.end(), xi.begin(), xi.end());
  return v;
}

Point uniform_in(const Box& b, CounterRng& rng) {
  Point p(b.dim());
  for (int a = 0; a < b.dim(); ++a) p[a] = rng.uniform(b.lo[a], b.hi[a]);
  return p;
}

Point dual_of_columns(const lincore::Matrix<double>& m) {
  if (m.cols() == 0) return {1.0};
  return lincore::dual_vector(lincore::wedge_columns(m));
}

double det_of_columns(const std::vector<Point>& cols) {
  const std::size_t n = cols.size();
  lincore::Matrix<double> m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < n; ++r) m(r, j) = cols[j][r];
  return lincore::determinant(m);
}

}  // namespace

double Cutoff::operator()(std::span<const double> p) const {
  require(p.size() == static_cast<std::size_t>(box.dim()), ErrorCode::kDimensionMismatch,
          "cutoff evaluated at a point of the wrong dimension");
  double v = 1.0;
  for (int a = 0; a < box.dim(); ++a) {
    if (p[a] < box.lo[a] || p[a] > box.hi[a]) return 0.0;
    if (taper > 0) v *= smooth_step((p[a] - box.lo[a]) / taper) * smooth_step((box.hi[a] - p[a]) / taper);
  }
  return v;
}

void OscPhase::validate() const {
  require(n >= 2, ErrorCode::kInvalidArgument, "phase needs n >= 2");
  require(phi.dim() == 2 * n - 1, ErrorCode::kDimensionMismatch, "phase polynomial must have 2n-1 variables");
  require(x_cutoff.box.dim() == n && xi_cutoff.box.dim() == n - 1, ErrorCode::kDimensionMismatch,
          "cutoff boxes must live in R^n and R^{n-1}");
  for (const Cutoff* c : {&x_cutoff, &xi_cutoff}) {
    require(c->taper >= 0, ErrorCode::kInvalidArgument, "cutoff taper must be nonnegative");
    for (int a = 0; a < c->box.dim(); ++a)
      require(c->box.width(a) >= 2 * c->taper, ErrorCode::kInvalidArgument, "cutoff taper exceeds half the box width");
  }
}

double OscPhase::value(std::span<const double> x, std::span<const double> xi) const {
  return phi.value(joined(x, xi));
}

double OscPhase::psi(std::span<const double> x, std::span<const double> xi) const {
  return x_cutoff(x) * xi_cutoff(xi);
}

lincore::Matrix<double> OscPhase::mixed_hessian(std::span<const double> x, std::span<const double> xi) const {
  require(x.size() == static_cast<std::size_t>(n) && xi.size() == static_cast<std::size_t>(n - 1),
          ErrorCode::kDimensionMismatch, "phase evaluated at a point of the wrong dimension");
  const auto p = joined(x, xi);
  lincore::Matrix<double> m(n, n - 1);
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n - 1; ++l) m(a, l) = phi.second_partial(p, a, n + l);
  return m;
}

lincore::Matrix<double> OscPhase::mixed_hessian_fd(std::span<const double> x, std::span<const double> xi,
                                                   double h) const {
  auto p = joined(x, xi);
  lincore::Matrix<double> m(n, n - 1);
  auto at = [&](int a, double da, int b, double db) {
    auto q = p;
    q[a] += da;
    q[b] += db;
    return phi.value(q);
  };
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n - 1; ++l) {
      const int b = n + l;
      m(a, l) = (at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h)) / (4 * h * h);
    }
  return m;
}

OscPhase extension_phase(const Polynomial& height, Cutoff x_cutoff, Cutoff xi_cutoff) {
  const int d = height.dim();
  const int n = d + 1;
  std::vector<phases::Monomial> terms;
  for (int a = 0; a < d; ++a) {
    std::vector<int> e(2 * n - 1, 0);
    e[a] = 1;
    e[n + a] = 1;
    terms.push_back({e, 1.0});
  }
  for (const auto& t : height.terms()) {
    std::vector<int> e(2 * n - 1, 0);
    e[n - 1] = 1;
    std::copy(t.exponents.begin(), t.exponents.end(), e.begin() + n);
    terms.push_back({e, t.coeff});
  }
  OscPhase p{n, Polynomial(2 * n - 1, std::move(terms)), std::move(x_cutoff), std::move(xi_cutoff)};
  p.validate();
  return p;
}

OscPhase random_phase(int n, CounterRng& rng, int extra) {
  require(n >= 2, ErrorCode::kInvalidArgument, "phase needs n >= 2");
  const int vars = 2 * n - 1;
  std::vector<phases::Monomial> terms;
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n - 1; ++l) {
      std::vector<int> e(vars, 0);
      e[a] = 1;
      e[n + l] = 1;
      terms.push_back({e, rng.uniform(-1.0, 1.0)});
    }
  for (int k = 0; k < extra; ++k) {
    std::vector<int> e(vars, 0);
    const int degree = static_cast<int>(rng.integer(2, 3));
    for (int i = 0; i < degree; ++i) ++e[rng.integer(0, vars - 1)];
    terms.push_back({e, rng.uniform(-1.0, 1.0)});
  }
  OscPhase p{n, Polynomial(vars, std::move(terms)), Cutoff{Box::cube(n, -1.0, 1.0), 0.0},
             Cutoff{Box::cube(n - 1, -1.0, 1.0), 0.0}};
  p.validate();
  return p;
}

double mixed_partials_gap(const OscPhase& p, int samples, std::uint64_t seed) {
  p.validate();
  CounterRng rng(seed, 0x6d6978);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point x = uniform_in(p.x_cutoff.box, rng);
    const Point xi = uniform_in(p.xi_cutoff.box, rng);
    const auto a = p.mixed_hessian(x, xi);
    const auto b = p.mixed_hessian_fd(x, xi);
    double scale = 0.0, gap = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) {
        scale = std::max(scale, std::abs(a(r, c)));
        gap = std::max(gap, std::abs(a(r, c) - b(r, c)));
      }
    worst = std::max(worst, gap / std::max(scale, 1.0));
  }
  return worst;
}

Point x_field(const OscPhase& p, std::span<const double> x, std::span<const double> xi) {
  return dual_of_columns(p.mixed_hessian(x, xi));
}

Point x_field_fd(const OscPhase& p, std::span<const double> x, std::span<const double> xi, double h) {
  return dual_of_columns(p.mixed_hessian_fd(x, xi, h));
}

double transversality_det(const std::vector<OscPhase>& phases, const std::vector<Point>& x,
                          const std::vector<Point>& xi) {
  const std::size_t n = phases.size();
  require(n >= 2 && x.size() == n && xi.size() == n, ErrorCode::kDimensionMismatch,
          "transversality needs n phases and n points");
  std::vector<Point> cols;
  for (std::size_t j = 0; j < n; ++j) {
    require(phases[j].n == static_cast<int>(n), ErrorCode::kDimensionMismatch, "n phases on R^n are required");
    cols.push_back(x_field(phases[j], x[j], xi[j]));
  }
  return det_of_columns(cols);
}

double min_transversality(const std::vector<OscPhase>& phases, std::size_t samples, std::uint64_t seed,
                          const std::vector<Box>& xi_boxes) {
  const std::size_t n = phases.size();
  require(xi_boxes.empty() || xi_boxes.size() == n, ErrorCode::kDimensionMismatch, "one xi box per phase");
  CounterRng rng(seed, 0x747276);
  double worst = std::numeric_limits<double>::infinity();
  std::vector<Point> x(n), xi(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = uniform_in(phases[j].x_cutoff.box, rng);
      xi[j] = uniform_in(xi_boxes.empty() ? phases[j].xi_cutoff.box : xi_boxes[j], rng);
    }
    worst = std::min(worst, std::abs(transversality_det(phases, x, xi)));
  }
  return worst;
}

HessPsiDet hess_psi_det(const std::vector<OscPhase>& phases, const std::vector<Point>& x,
                        const std::vector<Point>& xi) {
  const int n = static_cast<int>(phases.size());
  require(n >= 2 && x.size() == static_cast<std::size_t>(n - 1) && xi.size() == static_cast<std::size_t>(n),
          ErrorCode::kDimensionMismatch, "Psi needs n phases, n-1 points x_i and n frequencies xi_j");
  for (const auto& p : phases) {
    p.validate();
    require(p.n == n, ErrorCode::kDimensionMismatch, "n phases on R^n are required");
  }
  for (const auto& v : x) require(v.size() == static_cast<std::size_t>(n), ErrorCode::kDimensionMismatch, "x_i in R^n");
  for (const auto& v : xi)
    require(v.size() == static_cast<std::size_t>(n - 1), ErrorCode::kDimensionMismatch, "xi_j in R^{n-1}");

  Point last(n, 0.0);
  for (const auto& v : x)
    for (int a = 0; a < n; ++a) last[a] -= v[a];

  // Row (i, a) is x_i's a-th coordinate, column (j, l) is xi_j's l-th one.
  // Psi depends on x_i through Phi_i and, with a minus sign, through Phi_n.
  const int side = n * (n - 1);
  HessPsiDet out{lincore::Matrix<double>(side, side)};
  std::vector<lincore::Matrix<double>> blocks;
  for (int j = 0; j < n - 1; ++j) blocks.push_back(phases[j].mixed_hessian(x[j], xi[j]));
  const auto tail = phases[n - 1].mixed_hessian(last, xi[n - 1]);
  for (int i = 0; i < n - 1; ++i)
    for (int a = 0; a < n; ++a)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n - 1; ++l) {
          double v = 0.0;
          if (j == n - 1) {
            v = -tail(a, l);
          } else if (j == i) {
            v = blocks[i](a, l);
          }
          out.hessian(i * n + a, j * (n - 1) + l) = v;
        }
  out.dense = lincore::determinant(out.hessian);

  std::vector<Point> cols;
  for (int j = 0; j < n - 1; ++j) cols.push_back(x_field(phases[j], x[j], xi[j]));
  cols.push_back(x_field(phases[n - 1], last, xi[n - 1]));
  out.formula = lincore::hess_sign(n) * det_of_columns(cols);

  double hadamard = 1.0;
  for (int c = 0; c < side; ++c) {
    double norm = 0.0;
    for (int r = 0; r < side; ++r) norm += out.hessian(r, c) * out.hessian(r, c);
    hadamard *= std::sqrt(norm);
  }
  const double gap = std::abs(out.dense - out.formula);
  const double allowed = 1e-8 * std::max(std::abs(out.dense), std::abs(out.formula)) +
                         64 * std::numeric_limits<double>::epsilon() * hadamard;
  require(gap <= allowed, ErrorCode::kInvariantViolation,
          "det Hess Psi is " + std::to_string(out.dense) + " by elimination but " + std::to_string(out.formula) +
              " from the X fields");
  return out;
}

}  // namespace mlid::oscint
