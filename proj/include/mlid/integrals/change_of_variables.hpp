#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mlid/integrals/identity.hpp"

namespace mlid::integrals {

// t_j(xi) = phi_j(eta_j + xi) - phi_n(xi), j = 1..n-1: the map that turns the
// restricted extension product into a Fourier transform.
std::vector<double> subspace_time_map(const std::vector<PhaseFunction>& phases, const std::vector<phases::Point>& etas,
                                      std::span<const double> xi);

struct JacobianCheck {
  double analytic = 0.0;  // 2^{n-1} det(eta_1 ... eta_{n-1})
  double numeric = 0.0;   // central differences of the paraboloid time map
};

JacobianCheck paraboloid_jacobian_check(int n, const std::vector<phases::Point>& etas, const phases::Point& xi_n);

struct InjectivityOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int shards = 64;
  double flag_below = 1e-10;
  // Scan the hull condition first (as the injectivity argument assumes it).
  bool require_support = true;
  int workers = 0;
};

struct InjectivityReport {
  double min_ratio = 0.0;
  std::vector<phases::Point> witness;  // the pair attaining the minimum
  std::size_t pairs = 0;
  std::size_t rejected = 0;  // draws outside the support of G_eta
  bool counterexample = false;
};

// Samples pairs xi != xi' with xi, eta_j + xi in the hulls of the supports
// and reports min |t(xi) - t(xi')| / |xi - xi'|; a minimum below flag_below
// is reported as a counterexample.
InjectivityReport injectivity_probe(const IdentityExperiment& exp, const std::vector<phases::Point>& etas,
                                    const InjectivityOptions& options = {});

}  // namespace mlid::integrals
