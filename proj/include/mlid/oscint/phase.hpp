#pragma once

#include <cstdint>
#include <vector>

#include "mlid/common/rng.hpp"
#include "mlid/lincore/matrix.hpp"
#include "mlid/phases/polynomial.hpp"
#include "mlid/phases/region.hpp"

namespace mlid::oscint {

using phases::Box;
using phases::Point;
using phases::Polynomial;

// Product of smooth steps: 1 on the box shrunk by `taper` on every side,
// 0 outside the box, C-infinity in between. taper = 0 gives the indicator.
struct Cutoff {
  Box box;
  double taper = 0.0;

  double operator()(std::span<const double> p) const;
};

// Phi(x, xi) on R^n x R^{n-1} as a polynomial in the variables
// (x_1..x_n, xi_1..xi_{n-1}), with the cutoff psi(x, xi) = psi_x(x) psi_xi(xi).
struct OscPhase {
  int n = 0;
  Polynomial phi;
  Cutoff x_cutoff;
  Cutoff xi_cutoff;

  void validate() const;
  double value(std::span<const double> x, std::span<const double> xi) const;
  double psi(std::span<const double> x, std::span<const double> xi) const;
  // d^2 Phi / (dx_a dxi_l), as an n x (n-1) matrix.
  lincore::Matrix<double> mixed_hessian(std::span<const double> x, std::span<const double> xi) const;
  // The same by central differences of Phi with step h.
  lincore::Matrix<double> mixed_hessian_fd(std::span<const double> x, std::span<const double> xi,
                                           double h = 1e-4) const;
};

// x . Sigma(xi) with Sigma(xi) = (xi, h(xi)); h is a polynomial in n-1
// variables.
OscPhase extension_phase(const Polynomial& height, Cutoff x_cutoff, Cutoff xi_cutoff);

// Seeded polynomial phase of total degree <= 3: every x_a xi_l with a
// coefficient in [-1, 1] plus `extra` random cubic or quadratic monomials.
// Cutoff boxes are [-1, 1].
OscPhase random_phase(int n, CounterRng& rng, int extra = 6);

// Largest relative gap between analytic and finite-difference mixed partials
// over seeded points of the cutoff support.
double mixed_partials_gap(const OscPhase& p, int samples = 64, std::uint64_t seed = 1);

// Hodge dual of the wedge of the columns d/dxi_l grad_x Phi, as a vector.
Point x_field(const OscPhase& p, std::span<const double> x, std::span<const double> xi);
Point x_field_fd(const OscPhase& p, std::span<const double> x, std::span<const double> xi, double h = 1e-4);

// det(X(Phi_1)(x_1, xi_1), ..., X(Phi_n)(x_n, xi_n)).
double transversality_det(const std::vector<OscPhase>& phases, const std::vector<Point>& x,
                          const std::vector<Point>& xi);

// Min of |transversality_det| over seeded samples with (x_j, xi_j) uniform on
// the cutoff boxes; xi_boxes, when given, replace the xi cutoff boxes.
double min_transversality(const std::vector<OscPhase>& phases, std::size_t samples, std::uint64_t seed,
                          const std::vector<Box>& xi_boxes = {});

struct HessPsiDet {
  lincore::Matrix<double> hessian;  // d^2 Psi / (dx dxi), x-blocks as rows
  double dense = 0.0;
  double formula = 0.0;
};

// Psi(x, xi) = Phi_1(x_1, xi_1) + ... + Phi_{n-1}(x_{n-1}, xi_{n-1})
//              + Phi_n(-x_1 - ... - x_{n-1}, xi_n).
// Returns det of its mixed Hessian by elimination and as
// hess_sign(n) det(X(Phi_1)(x_1, xi_1), ..., X(Phi_n)(-sum x, xi_n)); throws
// kInvariantViolation when they differ by more than 1e-8 relative (plus a
// rounding floor proportional to the Hadamard bound of the matrix).
HessPsiDet hess_psi_det(const std::vector<OscPhase>& phases, const std::vector<Point>& x,
                        const std::vector<Point>& xi);

}  // namespace mlid::oscint
