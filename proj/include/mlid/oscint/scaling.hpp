#pragma once

#include <cstdint>
#include <vector>

#include "mlid/extension/extension.hpp"
#include "mlid/oscint/phase.hpp"
#include "mlid/phases/density.hpp"

namespace mlid::oscint {

using extension::ExtensionValue;
using extension::QuadratureOptions;
using phases::Complex;
using phases::Density;

// T_lambda f(x) = int e^{i lambda Phi(x, xi)} psi(x, xi) f(xi) dxi; 0 when x
// is outside the x cutoff box. Composite Gauss-Legendre over the density box
// cut to the xi cutoff box, panels sized by lambda |grad_xi Phi|; the error
// estimate compares against twice the panels.
ExtensionValue eval_Tlambda(const OscPhase& p, const Density& f, double lambda, std::span<const double> x,
                            const QuadratureOptions& options = {});

struct ScalingOptions {
  QuadratureOptions quadrature{8, 2.0, 4, std::size_t{1} << 20, 0};
  // x panels have width kappa / (lambda B_a), B_a bounding the x_a-bandwidth
  // of |T_1 f_1(x)|^2 |T_2 f_2(-x)|^2.
  double kappa = 8.0;
  // Nested boxes around the centre of the x domain start at half-width
  // start_scale / lambda and double until the added shell contributes at
  // most stop_tolerance of the total or the domain is exhausted.
  double start_scale = 4.0;
  double stop_tolerance = 1e-5;
  int max_levels = 16;
  // Multiplies both the x panel count and the xi panel count.
  int refine = 1;
  // Factor e^{i lambda Phi} over the x axes when Phi is a sum of
  // single-coordinate x-monomials times xi-polynomials.
  bool separable_fast_path = true;
  double transversality_bound = 1e-3;
  std::size_t transversality_samples = 10'000;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct ScalingPoint {
  double lambda = 0.0;
  double lhs = 0.0;
  // lambda^2 lhs / (||f_1||^2 ||f_2||^2)
  double normalized = 0.0;
  double truncation = 0.0;  // last shell increment, 0 when the domain is exhausted
  double radius = 0.0;
  std::size_t x_nodes = 0;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double slope = 0.0;  // least squares of log lhs against log lambda
  bool degenerate = false;
  double ratio_spread = 0.0;  // max / min of normalized
  double transversality_min = 0.0;
};

// LHS(lambda) = int_{R^2} |T_{1,lambda} f_1(x)|^2 |T_{2,lambda} f_2(-x)|^2 dx for
// n = 2. Throws kNonTransversal when the sampled transversality minimum is
// below the bound, kTailModelRejected when the nested boxes keep growing
// without settling. A zero density gives LHS = 0 and a degenerate fit.
ScalingResult scaling_experiment(const std::vector<OscPhase>& phases, const std::vector<Density>& densities,
                                 const std::vector<double>& lambdas, const ScalingOptions& options = {});

double lhs_at(const std::vector<OscPhase>& phases, const std::vector<Density>& densities, double lambda,
              const ScalingOptions& options, ScalingPoint* point = nullptr);

struct ScalingPreset {
  std::vector<OscPhase> phases;
  std::vector<Density> densities;
};

// Phi_j(x, xi) = x_1 xi + x_2 xi^2 with the x cutoff equal to 1 on [-1, 1]^2
// and vanishing outside [-1.5, 1.5]^2; f_1, f_2 are bumps of radius 1 centred
// at 1.5 and -1.5, and each xi cutoff is the indicator of its bump's support.
ScalingPreset scaling_preset();

}  // namespace mlid::oscint
