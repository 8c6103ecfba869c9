#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mlid/extension/convention.hpp"
#include "mlid/extension/extension.hpp"
#include "mlid/phases/density.hpp"
#include "mlid/phases/phase_function.hpp"
#include "mlid/phases/support.hpp"

namespace mlid::integrals {

using phases::Density;
using phases::PhaseFunction;

struct RhsQuadrature {
  int panels = 64;
  int nodes_per_panel = 8;
  // Cap on the product rule over (R^{n-1})^n; panels shrink to fit.
  std::size_t node_cap = std::size_t{1} << 24;
};

struct LhsQuadrature {
  // Grid step as a fraction of the aliasing limit 2pi/B of the integrand's
  // band. Below 1/2 so that the every-other-node subgrid is alias-free too.
  double step_fraction = 0.45;
  // Tail estimate allowed, relative to the extrapolated value.
  double tail_tolerance = 0.1;
  // Accuracy of the separable expansion of |weight|^sigma.
  double rank_tolerance = 1e-7;
  int max_rank = 64;
  extension::QuadratureOptions extension;
};

struct IdentityExperiment {
  std::vector<PhaseFunction> phases;
  std::vector<Density> densities;
  double sigma = 0.0;
  double r1 = 40.0;
  double r2 = 80.0;
  // Paraboloid only: measure the weight as det(1 ... 1; xi_1 ... xi_n) and
  // carry the factor 2^{-(n-1)} into the constant.
  bool paraboloid_matrix_form = false;
  // Smallest |weight| accepted over the hull product.
  double support_threshold = 1e-8;
  phases::SupportScanOptions support;
  RhsQuadrature rhs;
  LhsQuadrature lhs;
  int workers = 0;

  int n() const { return static_cast<int>(phases.size()); }
};

// Shape checks shared by every operation.
void validate(const IdentityExperiment& exp);

// Whether the convex-hull condition gates this experiment: always for
// sigma <= 0, and for sigma > 0 unless every phase is the paraboloid.
bool support_condition_required(const IdentityExperiment& exp);

// Runs the hull scan when required and throws kSupportCondition below the
// threshold. Empty when no scan was needed (or a density is identically 0).
std::optional<phases::SupportReport> enforce_support_condition(const IdentityExperiment& exp);

// The weight entering both sides: the transversality determinant, or the
// (1; xi) determinant in paraboloid matrix form.
double identity_weight(const IdentityExperiment& exp, const std::vector<phases::Point>& points);

// Constant in front of the right-hand side.
double identity_constant(const IdentityExperiment& exp,
                         const extension::FourierConvention& conv = extension::default_convention());

struct RhsResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t nodes = 0;
  std::optional<phases::SupportReport> support;
};

// C * int prod |g_j(xi_j)|^2 / |weight|^{1-2 sigma} over the product of the
// support boxes, by tensor Gauss-Legendre (interior nodes only). The error
// estimate compares against the rule with half the panels.
RhsResult rhs_weighted_integral(const IdentityExperiment& exp,
                                const extension::FourierConvention& conv = extension::default_convention());

struct LhsResult {
  double value = 0.0;  // extrapolated to R = infinity
  double tail_estimate = 0.0;
  double quadrature_error = 0.0;
  double value_r1 = 0.0;
  double value_r2 = 0.0;
  int rank = 0;
  std::size_t grid_points = 0;
  double step_x = 0.0;
  double step_t = 0.0;
  std::optional<phases::SupportReport> support;
};

// int_{|x| <= R} |T_sigma(g_1, g_2)(x, -x)|^2 dx for n = 2 on a band-limited
// trapezoid grid, at R = r1 and r2, extrapolated under an O(1/R) tail.
// Throws kTailModelRejected when the tail exceeds the tolerance.
LhsResult lhs_subspace_integral(const IdentityExperiment& exp,
                                const extension::FourierConvention& conv = extension::default_convention());

// (|E_1 g_1|^2 * |E_2 g_2|^2)(z) for n = 2, sigma = 0, by the same rule on
// disks centred at z/2.
LhsResult convolution_at(const IdentityExperiment& exp, std::array<double, 2> z,
                         const extension::FourierConvention& conv = extension::default_convention());

// int |E_1 g_1(x)|^2 |E_2 g_2(x)|^2 dx for n = 2, sigma = 0.
LhsResult product_form_integral(const IdentityExperiment& exp,
                                const extension::FourierConvention& conv = extension::default_convention());

}  // namespace mlid::integrals
