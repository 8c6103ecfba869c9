#include "mlid/integrals/identity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/common/quadrature.hpp"

namespace mlid::integrals {
namespace {

using extension::ExtensionOperator;
using extension::FourierConvention;
using extension::NodeSet;
using phases::Complex;
using phases::Point;

bool any_zero(const IdentityExperiment& exp) {
  return std::any_of(exp.densities.begin(), exp.densities.end(), [](const Density& g) { return g.known_zero(); });
}

struct FactorNodes {
  std::vector<double> xi;       // point-major, dim d
  std::vector<double> mass;     // w_i |g(xi_i)|^2
  std::vector<double> columns;  // (1; grad phi) per node, length n
};

FactorNodes factor_nodes(const PhaseFunction& phase, const Density& g, int panels, int m, int n) {
  const int d = n - 1;
  std::vector<QuadratureRule1D> axes;
  for (int a = 0; a < d; ++a) axes.push_back(composite_gauss_legendre(g.box().lo[a], g.box().hi[a], panels, m));
  const TensorRule rule = tensor_product(axes);
  FactorNodes f;
  f.xi = rule.coords;
  f.mass.resize(rule.size());
  f.columns.resize(rule.size() * n);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    std::span<const double> p(rule.point(i), d);
    f.mass[i] = rule.weights[i] * std::norm(g(p));
    double* c = f.columns.data() + i * n;
    c[0] = 1.0;
    phase.gradient(p, std::span<double>(c + 1, d));
  }
  return f;
}

double rhs_sum(const IdentityExperiment& exp, int panels, int m) {
  const int n = exp.n();
  std::vector<FactorNodes> factors;
  for (int j = 0; j < n; ++j) factors.push_back(factor_nodes(exp.phases[j], exp.densities[j], panels, m, n));
  const double exponent = 1.0 - 2.0 * exp.sigma;
  const double factor = exp.paraboloid_matrix_form ? extension::default_convention().paraboloid_matrix_factor(n) : 1.0;

  auto partial = parallel_map(factors[0].mass.size(), exp.workers, [&](std::size_t i0) {
    std::vector<std::size_t> idx(n, 0);
    idx[0] = i0;
    std::vector<double> mat(static_cast<std::size_t>(n) * n);
    std::vector<double> terms;
    while (true) {
      double prod = 1.0;
      for (int j = 0; j < n; ++j) prod *= factors[j].mass[idx[j]];
      if (prod != 0.0) {
        double term = prod;
        if (exponent != 0.0) {
          for (int j = 0; j < n; ++j) {
            const double* c = factors[j].columns.data() + idx[j] * n;
            for (int r = 0; r < n; ++r) mat[r * n + j] = c[r];
          }
          const double w = std::abs(phases::small_determinant(mat.data(), n) * factor);
          term = prod / std::pow(w, exponent);
          require(std::isfinite(term), ErrorCode::kNonFinite,
                  "weighted integrand is not finite (weight " + std::to_string(w) + ")");
        }
        terms.push_back(term);
      }
      int j = 1;
      while (j < n && ++idx[j] == factors[j].mass.size()) idx[j++] = 0;
      if (j == n) break;
    }
    return pairwise_sum(terms);
  });
  return pairwise_sum(partial);
}

// Chebyshev-Lobatto barycentric interpolation on [lo, hi].
struct ChebyshevBasis {
  std::vector<double> nodes;
  std::vector<double> beta;

  ChebyshevBasis(double lo, double hi, int r) : nodes(r), beta(r) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int q = 0; q < r; ++q) {
      nodes[q] = r == 1 ? mid : mid + half * std::cos(std::numbers::pi * q / (r - 1));
      beta[q] = (q % 2 == 0 ? 1.0 : -1.0) * (q == 0 || q == r - 1 ? 0.5 : 1.0);
    }
  }

  std::vector<double> basis(double x) const {
    const int r = static_cast<int>(nodes.size());
    std::vector<double> l(r, 0.0);
    if (r == 1) {
      l[0] = 1.0;
      return l;
    }
    double denom = 0.0;
    for (int q = 0; q < r; ++q) {
      if (x == nodes[q]) {
        std::fill(l.begin(), l.end(), 0.0);
        l[q] = 1.0;
        return l;
      }
      l[q] = beta[q] / (x - nodes[q]);
      denom += l[q];
    }
    for (auto& v : l) v /= denom;
    return l;
  }
};

// |weight(xi_1, xi_2)|^sigma ~ sum_q K(xi_1, c_q) l_q(xi_2); smallest power of
// two rank meeting the tolerance on a check grid.
ChebyshevBasis separate_kernel(const IdentityExperiment& exp, int& rank) {
  const auto& b1 = exp.densities[0].box();
  const auto& b2 = exp.densities[1].box();
  if (exp.sigma == 0.0) {
    rank = 1;
    return ChebyshevBasis(b2.lo[0], b2.hi[0], 1);
  }
  auto kernel = [&](double x1, double x2) {
    return std::pow(std::abs(identity_weight(exp, {Point{x1}, Point{x2}})), exp.sigma);
  };
  constexpr int kCheck1 = 17, kCheck2 = 67;
  for (int r = 4; r <= std::max(4, exp.lhs.max_rank); r *= 2) {
    ChebyshevBasis cheb(b2.lo[0], b2.hi[0], r);
    double worst = 0.0, peak = 0.0;
    for (int a = 0; a < kCheck1; ++a) {
      const double x1 = b1.lo[0] + b1.width(0) * a / (kCheck1 - 1);
      std::vector<double> kq(r);
      for (int q = 0; q < r; ++q) kq[q] = kernel(x1, cheb.nodes[q]);
      for (int b = 0; b < kCheck2; ++b) {
        const double x2 = b2.lo[0] + b2.width(0) * (b + 0.5) / kCheck2;
        const auto l = cheb.basis(x2);
        double approx = 0.0;
        for (int q = 0; q < r; ++q) approx += kq[q] * l[q];
        const double exact = kernel(x1, x2);
        worst = std::max(worst, std::abs(approx - exact));
        peak = std::max(peak, std::abs(exact));
      }
    }
    require(std::isfinite(worst), ErrorCode::kNonFinite, "weight power is not finite on the support boxes");
    if (worst <= exp.lhs.rank_tolerance * std::max(peak, 1e-300)) {
      rank = r;
      return cheb;
    }
  }
  throw Error(ErrorCode::kQuadratureBudget, "|weight|^sigma is not separable to tolerance within rank " +
                                                std::to_string(exp.lhs.max_rank) + "; is the weight vanishing on the supports?");
}

double phase_range(const NodeSet& nodes) {
  if (nodes.size() == 0) return 0.0;
  const auto [lo, hi] = std::minmax_element(nodes.phase_values.begin(), nodes.phase_values.end());
  return *hi - *lo;
}

// Shared trapezoid engine. Integrand |sum_q A_q(p) B_q(z + s p)|^2 over disks
// centred at z/2; A_q = E_1 applied to g_1 K(., c_q), B_q = E_2 applied to g_2 l_q.
LhsResult bilinear_grid(const IdentityExperiment& exp, std::array<double, 2> z, double s, const FourierConvention& conv) {
  validate(exp);
  require(exp.n() == 2, ErrorCode::kInvalidArgument,
          "the deterministic subspace integral is implemented for n = 2 only");
  require(exp.r1 > 0 && exp.r2 > exp.r1, ErrorCode::kInvalidArgument, "truncation radii must satisfy 0 < r1 < r2");
  LhsResult res;
  if (any_zero(exp)) return res;
  res.support = enforce_support_condition(exp);

  const double c_x = 0.5 * z[0], c_t = 0.5 * z[1];
  const double shift = std::hypot(c_x, c_t);
  const double reff1 = exp.r1 + shift, reff2 = exp.r2 + shift;
  const double b = std::abs(conv.frequency_scale);

  const std::vector<double> ext_a{(std::abs(c_x) + reff2) * b};
  const double text_a = (std::abs(c_t) + reff2) * b;
  const std::vector<double> ext_b{(std::abs(z[0] + s * c_x) + reff2) * b};
  const double text_b = (std::abs(z[1] + s * c_t) + reff2) * b;
  const NodeSet n1 = extension::oscillation_rule(exp.phases[0], exp.densities[0].box(), ext_a, text_a, exp.lhs.extension);
  const NodeSet n2 = extension::oscillation_rule(exp.phases[1], exp.densities[1].box(), ext_b, text_b, exp.lhs.extension);

  int rank = 1;
  const ChebyshevBasis cheb = separate_kernel(exp, rank);
  std::vector<ExtensionOperator> ops_a, ops_b;
  for (int q = 0; q < rank; ++q) {
    std::vector<Complex> a1(n1.size()), a2(n2.size());
    for (std::size_t i = 0; i < n1.size(); ++i) {
      const double x1 = n1.xi[i];
      const double k =
          exp.sigma == 0.0 ? 1.0 : std::pow(std::abs(identity_weight(exp, {Point{x1}, Point{cheb.nodes[q]}})), exp.sigma);
      a1[i] = n1.weights[i] * exp.densities[0].at(x1) * k;
    }
    for (std::size_t i = 0; i < n2.size(); ++i) {
      const double x2 = n2.xi[i];
      a2[i] = n2.weights[i] * exp.densities[1].at(x2) * cheb.basis(x2)[q];
    }
    ops_a.emplace_back(n1, std::move(a1), conv);
    ops_b.emplace_back(n2, std::move(a2), conv);
  }

  // |T|^2 has spectrum in [-B_x, B_x] x [-B_t, B_t]; the trapezoid rule on
  // R^2 is exact for steps below 2pi/B.
  const double band_x = (exp.densities[0].box().width(0) + exp.densities[1].box().width(0)) * b;
  const double band_t = 1.02 * (phase_range(n1) + phase_range(n2)) * b;
  const double hx = exp.lhs.step_fraction * 2.0 * std::numbers::pi / band_x;
  const double ht = band_t > 0 ? exp.lhs.step_fraction * 2.0 * std::numbers::pi / band_t : hx;
  const long rows = static_cast<long>(std::floor(reff2 / ht));

  struct RowSums {
    double s1 = 0, s2 = 0, coarse = 0;
    std::size_t points = 0;
  };
  auto partial = parallel_map(static_cast<std::size_t>(2 * rows + 1), exp.workers, [&](std::size_t row) {
    const long k = static_cast<long>(row) - rows;
    const double dt = k * ht;
    const long m = static_cast<long>(std::floor(std::sqrt(std::max(0.0, reff2 * reff2 - dt * dt)) / hx));
    const std::size_t count = static_cast<std::size_t>(2 * m + 1);
    std::vector<Complex> total(count, 0.0), va(count), vb(count);
    const double xa = c_x - m * hx, ta = c_t + dt;
    const double xb = z[0] + s * xa, tb = z[1] + s * ta;
    for (int q = 0; q < rank; ++q) {
      ops_a[q].line(std::span<const double>(&xa, 1), 0, hx, count, ta, va.data());
      ops_b[q].line(std::span<const double>(&xb, 1), 0, s * hx, count, tb, vb.data());
      for (std::size_t i = 0; i < count; ++i) total[i] += va[i] * vb[i];
    }
    std::vector<double> all, inner, coarse;
    all.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const long off = static_cast<long>(i) - m;
      const double f = std::norm(total[i]);
      all.push_back(f);
      const double dx = off * hx;
      if (dx * dx + dt * dt <= reff1 * reff1) inner.push_back(f);
      if (k % 2 == 0 && off % 2 == 0) coarse.push_back(f);
    }
    return RowSums{pairwise_sum(inner), pairwise_sum(all), pairwise_sum(coarse), count};
  });
  std::vector<double> s1, s2, sc;
  for (const auto& r : partial) {
    s1.push_back(r.s1);
    s2.push_back(r.s2);
    sc.push_back(r.coarse);
    res.grid_points += r.points;
  }
  const double cell = hx * ht;
  res.value_r1 = cell * pairwise_sum(s1);
  res.value_r2 = cell * pairwise_sum(s2);
  const double coarse = 4.0 * cell * pairwise_sum(sc);
  res.quadrature_error = std::abs(res.value_r2 - coarse);
  res.value = (reff2 * res.value_r2 - reff1 * res.value_r1) / (reff2 - reff1);
  res.tail_estimate = std::abs(res.value - res.value_r2);
  res.rank = rank;
  res.step_x = hx;
  res.step_t = ht;
  require(std::isfinite(res.value), ErrorCode::kNonFinite, "subspace integral is not finite");
  if (res.tail_estimate > exp.lhs.tail_tolerance * std::abs(res.value)) {
    throw Error(ErrorCode::kTailModelRejected,
                "tail estimate " + std::to_string(res.tail_estimate) + " exceeds " +
                    std::to_string(exp.lhs.tail_tolerance) + " of the value " + std::to_string(res.value) +
                    " (R1 = " + std::to_string(exp.r1) + ", R2 = " + std::to_string(exp.r2) + "); increase the radii");
  }
  return res;
}

}  // namespace

void validate(const IdentityExperiment& exp) {
  const int n = exp.n();
  require(n >= 2, ErrorCode::kInvalidArgument, "an identity needs at least two factors");
  require(exp.densities.size() == exp.phases.size(), ErrorCode::kDimensionMismatch,
          "one density per phase is required");
  for (int j = 0; j < n; ++j) {
    require(exp.phases[j].dim() == n - 1 && exp.densities[j].dim() == n - 1, ErrorCode::kDimensionMismatch,
            "factor " + std::to_string(j) + " must live on R^" + std::to_string(n - 1));
  }
  require(std::isfinite(exp.sigma), ErrorCode::kNonFinite, "sigma must be finite");
  if (exp.paraboloid_matrix_form) {
    require(std::all_of(exp.phases.begin(), exp.phases.end(), [](const PhaseFunction& p) { return p.is_paraboloid(); }),
            ErrorCode::kInvalidArgument, "the matrix form applies to paraboloid phases only");
  }
}

bool support_condition_required(const IdentityExperiment& exp) {
  if (exp.sigma <= 0.0) return true;
  return !std::all_of(exp.phases.begin(), exp.phases.end(), [](const PhaseFunction& p) { return p.is_paraboloid(); });
}

std::optional<phases::SupportReport> enforce_support_condition(const IdentityExperiment& exp) {
  validate(exp);
  if (any_zero(exp) || !support_condition_required(exp)) return std::nullopt;
  phases::SupportScanOptions opts = exp.support;
  if (opts.workers == 0) opts.workers = exp.workers;
  phases::SupportReport report = phases::check_support_condition(exp.phases, exp.densities, opts);
  if (exp.paraboloid_matrix_form) {
    const double f = extension::default_convention().paraboloid_matrix_factor(exp.n());
    report.min_abs_det *= f;
    report.coarse_min *= f;
  }
  if (report.min_abs_det < exp.support_threshold) {
    std::string where;
    for (const auto& p : report.witness) {
      where += where.empty() ? "(" : ", (";
      for (std::size_t a = 0; a < p.size(); ++a) where += (a ? "," : "") + std::to_string(p[a]);
      where += ")";
    }
    throw Error(ErrorCode::kSupportCondition, "transversality weight reaches " + std::to_string(report.min_abs_det) +
                                                  " on the convex hulls of the supports, at " + where);
  }
  return report;
}

double identity_weight(const IdentityExperiment& exp, const std::vector<Point>& points) {
  const double w = phases::transversality_weight(exp.phases, points);
  return exp.paraboloid_matrix_form ? w * extension::default_convention().paraboloid_matrix_factor(exp.n()) : w;
}

double identity_constant(const IdentityExperiment& exp, const FourierConvention& conv) {
  const double c = conv.identity_constant(exp.n());
  return exp.paraboloid_matrix_form ? c * conv.paraboloid_matrix_factor(exp.n()) : c;
}

RhsResult rhs_weighted_integral(const IdentityExperiment& exp, const FourierConvention& conv) {
  validate(exp);
  RhsResult res;
  if (any_zero(exp)) return res;
  res.support = enforce_support_condition(exp);
  const int n = exp.n();
  const int dims = n * (n - 1);
  int panels = std::max(1, exp.rhs.panels);
  const int m = std::max(1, exp.rhs.nodes_per_panel);
  auto count = [&](int p) { return std::pow(static_cast<long double>(p) * m, dims); };
  while (panels > 1 && count(panels) > static_cast<long double>(exp.rhs.node_cap)) panels /= 2;
  require(count(panels) <= static_cast<long double>(exp.rhs.node_cap), ErrorCode::kQuadratureBudget,
          "right-hand side rule exceeds the node cap even with one panel per axis");
  const double c = identity_constant(exp, conv);
  const double fine = c * rhs_sum(exp, panels, m);
  const double rough = c * rhs_sum(exp, std::max(1, panels / 2), panels > 1 ? m : std::max(1, m / 2));
  res.value = fine;
  res.error_estimate = std::abs(fine - rough);
  res.nodes = static_cast<std::size_t>(count(panels));
  return res;
}

LhsResult lhs_subspace_integral(const IdentityExperiment& exp, const FourierConvention& conv) {
  return bilinear_grid(exp, {0.0, 0.0}, -1.0, conv);
}

LhsResult convolution_at(const IdentityExperiment& exp, std::array<double, 2> z, const FourierConvention& conv) {
  require(exp.sigma == 0.0, ErrorCode::kInvalidArgument, "the convolution form exists for sigma = 0 only");
  return bilinear_grid(exp, z, -1.0, conv);
}

LhsResult product_form_integral(const IdentityExperiment& exp, const FourierConvention& conv) {
  require(exp.sigma == 0.0, ErrorCode::kInvalidArgument, "the product form exists for sigma = 0 only");
  return bilinear_grid(exp, {0.0, 0.0}, 1.0, conv);
}

}  // namespace mlid::integrals
