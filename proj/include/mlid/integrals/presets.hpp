#pragma once

#include "mlid/integrals/identity.hpp"

namespace mlid::integrals {

// Two pieces of the parabola xi^2 carrying Gaussians of width 1/16 centred
// at +1 and -1 (supports [1/2, 3/2] and [-3/2, -1/2]).
IdentityExperiment parabola_pair(double sigma);

// Tabulated curves xi^2 + xi^4/4 and cosh(xi) (cubic splines on [-3, 3])
// carrying the same Gaussians.
IdentityExperiment tabulated_pair(double sigma);

// Tabulated phase sampled from f on [lo, hi] with the given step.
PhaseFunction tabulate(double (*f)(double), double lo, double hi, double step);

}  // namespace mlid::integrals
