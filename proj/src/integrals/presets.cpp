#include "mlid/integrals/presets.hpp"

#include <cmath>

namespace mlid::integrals {
namespace {

double quartic(double x) { return x * x + 0.25 * x * x * x * x; }
double hyperbolic(double x) { return std::cosh(x); }

IdentityExperiment gaussian_pair(std::vector<PhaseFunction> phases, double sigma) {
  IdentityExperiment exp;
  exp.phases = std::move(phases);
  exp.densities = {Density::gaussian({1.0}, 1.0 / 16), Density::gaussian({-1.0}, 1.0 / 16)};
  exp.sigma = sigma;
  return exp;
}

}  // namespace

PhaseFunction tabulate(double (*f)(double), double lo, double hi, double step) {
  const int count = static_cast<int>(std::lround((hi - lo) / step)) + 1;
  std::vector<double> values(count);
  for (int i = 0; i < count; ++i) values[i] = f(lo + i * step);
  return PhaseFunction::tabulated(lo, step, std::move(values));
}

IdentityExperiment parabola_pair(double sigma) {
  return gaussian_pair({PhaseFunction::paraboloid(1), PhaseFunction::paraboloid(1)}, sigma);
}

IdentityExperiment tabulated_pair(double sigma) {
  return gaussian_pair({tabulate(quartic, -3.0, 3.0, 1.0 / 64), tabulate(hyperbolic, -3.0, 3.0, 1.0 / 64)}, sigma);
}

}  // namespace mlid::integrals
