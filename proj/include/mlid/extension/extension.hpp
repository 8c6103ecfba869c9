#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "mlid/extension/convention.hpp"
#include "mlid/phases/density.hpp"
#include "mlid/phases/phase_function.hpp"

namespace mlid::extension {

using phases::Complex;
using phases::Density;
using phases::PhaseFunction;

// x = (x', x_n) with x' in R^{n-1}; x_n plays the role of time.
struct SpacetimePoint {
  std::vector<double> x;
  double t = 0.0;
};

struct QuadratureOptions {
  int nodes_per_panel = 8;
  // Largest phase change allowed across one panel.
  double max_phase_per_panel = std::numbers::pi / 4;
  int min_panels = 16;
  std::size_t node_cap = std::size_t{1} << 22;
  int workers = 0;
};

// Tensor Gauss-Legendre nodes over a density's support box with the phase
// values cached.
struct NodeSet {
  int dim = 0;
  std::vector<double> xi;  // point-major
  std::vector<double> weights;
  std::vector<double> phase_values;
  std::vector<int> panels;  // per axis

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const { return {xi.data() + i * dim, static_cast<std::size_t>(dim)}; }
};

// Per-axis bound on |d/dxi_a phi| over the box (dense sampling, 10% margin).
std::vector<double> gradient_bounds(const PhaseFunction& phase, const phases::Box& box);

// Panel counts so that, for every |x'_a| <= x_extent[a] and |t| <= t_extent,
// the phase x'.xi + t phi(xi) changes by at most max_phase_per_panel across a
// panel. panel_scale multiplies the count (used for refinement estimates).
NodeSet oscillation_rule(const PhaseFunction& phase, const phases::Box& box, std::span<const double> x_extent,
                         double t_extent, const QuadratureOptions& options = {}, int panel_scale = 1);

struct ExtensionValue {
  Complex value;
  double error_estimate = 0.0;
  std::size_t nodes = 0;
};

// Eg(x) by the oscillation-resolving rule, with |I_P - I_2P| as error estimate
// (I_{P/2} when the doubled rule would exceed the node cap).
ExtensionValue eval_E(const PhaseFunction& phase, const Density& g, const SpacetimePoint& x,
                      const QuadratureOptions& options = {}, const FourierConvention& conv = default_convention());

// Eg precomputed on a fixed rule, for sweeps over many x within given extents.
class ExtensionOperator {
 public:
  ExtensionOperator(const PhaseFunction& phase, const Density& g, std::span<const double> x_extent, double t_extent,
                    const QuadratureOptions& options = {}, const FourierConvention& conv = default_convention());
  // Arbitrary amplitudes a_i = w_i * h(xi_i) on a given rule.
  ExtensionOperator(NodeSet nodes, std::vector<Complex> amplitudes, const FourierConvention& conv = default_convention());

  std::size_t size() const { return nodes_.size(); }
  const NodeSet& nodes() const { return nodes_; }

  Complex operator()(std::span<const double> x, double t) const;
  // Values at x0 + k*step*e_axis, k = 0..count-1, all at time t.
  void line(std::span<const double> x0, int axis, double step, std::size_t count, double t, Complex* out) const;

 private:
  NodeSet nodes_;
  std::vector<Complex> amplitudes_;
  double scale_;
};

struct TsigmaOptions {
  QuadratureOptions quadrature;
  bool estimate_error = true;
};

// T_sigma(g_1..g_n)(x_1..x_n): tensor quadrature over (R^{n-1})^n of
// |det(1; grad phi_j)|^sigma prod_j e^{i(x_j'.xi_j + t_j phi_j)} g_j(xi_j).
ExtensionValue eval_Tsigma(const std::vector<PhaseFunction>& phases, const std::vector<Density>& densities,
                           const std::vector<SpacetimePoint>& points, double sigma, const TsigmaOptions& options = {},
                           const FourierConvention& conv = default_convention());

// u(x,t) = (2pi)^{-d} E f^(x,t) with the paraboloid phase, i.e. the solution
// of i u_t = Laplacian u with u(0) = f, given f^ as a density.
ExtensionValue schrodinger_u(const Density& fhat, std::span<const double> x, double t,
                             const QuadratureOptions& options = {}, const FourierConvention& conv = default_convention());

// Density whose values are the Fourier transform of f (by quadrature on
// demand) restricted to the given frequency box.
Density fourier_transform(const Density& f, const phases::Box& frequency_box, const QuadratureOptions& options = {},
                          const FourierConvention& conv = default_convention());

}  // namespace mlid::extension
