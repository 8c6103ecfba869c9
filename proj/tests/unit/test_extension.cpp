#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlid/common/error.hpp"
#include "mlid/common/rng.hpp"
#include "mlid/extension/extension.hpp"
#include "mlid/extension/spectral.hpp"

using namespace mlid;
using namespace mlid::extension;
using phases::Box;
using phases::Point;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// int e^{i t xi^2 - xi^2/2} dxi = sqrt(2 pi) (1 - 2 i t)^{-1/2}
Complex gaussian_extension_oracle(double t) { return std::sqrt(2 * kPi) / std::sqrt(Complex(1.0, -2.0 * t)); }

// Free Schrodinger solution with u(0) = e^{-x^2/2}.
Complex gaussian_solution(double x, double t) {
  const Complex a(1.0, -2.0 * t);
  return std::exp(-x * x / (2.0 * a)) / std::sqrt(a);
}

Density unit_gaussian_hat() { return Density::gaussian({0.0}, 1.0, std::sqrt(2 * kPi)); }

}  // namespace

TEST(Convention, DerivedConstantsMatchClosedForms) {
  const auto checks = verify_default_constants();
  EXPECT_FALSE(checks.empty());
  const auto& c = default_convention();
  EXPECT_NEAR(c.identity_constant(2), std::pow(2 * kPi, 2), 1e-12);
  EXPECT_NEAR(c.ot_constant(1), 0.5, 1e-15);
  EXPECT_EQ(c.fingerprint().size(), 16u);
  FourierConvention other;
  other.frequency_scale = 2 * kPi;
  EXPECT_NE(other.fingerprint(), c.fingerprint());
  EXPECT_NEAR(other.identity_constant(2), 1.0, 1e-12);
}

TEST(EvalE, IndicatorAtOriginIsLength) {
  const auto g = Density::indicator(Box::interval(-1, 1));
  for (const auto& phase : {PhaseFunction::paraboloid(1), PhaseFunction::paraboloid(1).reflected()}) {
    const auto v = eval_E(phase, g, {{0.0}, 0.0});
    EXPECT_NEAR(std::abs(v.value - 2.0), 0.0, 1e-14);
  }
}

TEST(EvalE, IndicatorSincOracle) {
  const auto g = Density::indicator(Box::interval(-1, 1));
  for (double x : {0.3, 1.0, 7.5, 50.0, 333.0}) {
    const auto v = eval_E(PhaseFunction::paraboloid(1), g, {{x}, 0.0});
    EXPECT_NEAR(std::abs(v.value - 2.0 * std::sin(x) / x), 0.0, 1e-13) << x;
    EXPECT_LT(v.error_estimate, 1e-10);
  }
}

TEST(EvalE, GaussianTimeOracle) {
  const auto g = Density::gaussian({0.0}, 1.0);
  for (double t : {0.0, 0.5, 3.0, 20.0, 150.0}) {
    const auto v = eval_E(PhaseFunction::paraboloid(1), g, {{0.0}, t});
    const Complex exact = gaussian_extension_oracle(t);
    EXPECT_LT(std::abs(v.value - exact), 1e-12 * std::abs(exact) + 1e-13) << t;
    EXPECT_LE(std::abs(v.value - exact), std::max(10 * v.error_estimate, 1e-12)) << t;
  }
}

TEST(EvalE, TwoDimensionalGaussianFactorises) {
  const auto g = Density::gaussian({0.0, 0.0}, 1.0);
  const double t = 0.7;
  const auto v = eval_E(PhaseFunction::paraboloid(2), g, {{0.0, 0.0}, t});
  const Complex exact = gaussian_extension_oracle(t) * gaussian_extension_oracle(t);
  EXPECT_LT(std::abs(v.value - exact), 1e-11);
}

TEST(EvalE, BudgetErrorNamesPanels) {
  const auto g = Density::indicator(Box::interval(-1, 1));
  try {
    (void)eval_E(PhaseFunction::paraboloid(1), g, {{1e9}, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kQuadratureBudget);
    EXPECT_NE(std::string(e.what()).find("panels"), std::string::npos);
  }
}

TEST(EvalE, ModulationTranslates) {
  const auto g = Density::gaussian({0.7}, 0.2);
  const double a[] = {2.5};
  const auto gm = g.modulated(a);
  const auto phase = PhaseFunction::polynomial(phases::Polynomial(1, {{{2}, 1.0}, {{3}, 0.3}}));
  for (double x : {-3.0, 0.0, 4.0}) {
    for (double t : {0.0, 1.5}) {
      const auto lhs = eval_E(phase, gm, {{x}, t});
      const auto rhs = eval_E(phase, g, {{x + 2.5}, t});
      EXPECT_LT(std::abs(lhs.value - rhs.value), 1e-12);
    }
  }
}

TEST(EvalE, GalileanCovarianceOnParaboloid) {
  const auto g = Density::bump({0.2}, 0.4);
  const double xi0[] = {0.9};
  const auto gs = g.shifted(xi0);
  const auto phase = PhaseFunction::paraboloid(1);
  for (double x : {-2.0, 0.5, 3.0}) {
    for (double t : {0.3, 2.0}) {
      const double shifted = std::abs(eval_E(phase, gs, {{x}, t}).value);
      const double moved = std::abs(eval_E(phase, g, {{x + 2 * t * xi0[0]}, t}).value);
      EXPECT_NEAR(shifted, moved, 1e-12);
    }
  }
}

TEST(ExtensionOperator, SweepsAgreeWithPointEvaluation) {
  const auto g = Density::gaussian({1.0}, 1.0 / 16);
  const auto phase = PhaseFunction::paraboloid(1);
  const double extent[] = {40.0};
  const ExtensionOperator op(phase, g, extent, 30.0);
  std::vector<Complex> row(200);
  const double x0[] = {-40.0};
  op.line(x0, 0, 0.4, row.size(), 12.0, row.data());
  for (std::size_t k : {0ul, 37ul, 64ul, 199ul}) {
    const double x = -40.0 + 0.4 * k;
    const auto ref = eval_E(phase, g, {{x}, 12.0});
    EXPECT_LT(std::abs(row[k] - ref.value), 1e-12);
    const double p[] = {x};
    EXPECT_LT(std::abs(op(p, 12.0) - ref.value), 1e-12);
  }
}

TEST(Tsigma, SigmaZeroIsTensorProduct) {
  const std::vector<PhaseFunction> ph = {PhaseFunction::paraboloid(1), PhaseFunction::paraboloid(1)};
  const std::vector<Density> g = {Density::gaussian({1.0}, 0.1), Density::bump({-1.0}, 0.4)};
  const std::vector<SpacetimePoint> x = {{{0.5}, 1.0}, {{-2.0}, 0.25}};
  const auto t = eval_Tsigma(ph, g, x, 0.0);
  const Complex prod = eval_E(ph[0], g[0], x[0]).value * eval_E(ph[1], g[1], x[1]).value;
  EXPECT_LT(std::abs(t.value - prod), 1e-8 * std::abs(prod));
}

TEST(Tsigma, ZeroFactorAndHomogeneity) {
  const std::vector<PhaseFunction> ph(2, PhaseFunction::paraboloid(1));
  const std::vector<SpacetimePoint> x = {{{0.5}, 1.0}, {{-0.5}, -1.0}};
  EXPECT_EQ(eval_Tsigma(ph, {Density::gaussian({1.0}, 0.1), Density::zero(1)}, x, 0.5).value, Complex(0.0));
  const std::vector<Density> g = {Density::gaussian({1.0}, 0.1), Density::gaussian({-1.0}, 0.1)};
  const Complex c1(2.0, -1.0), c2(0.0, 3.0);
  const auto base = eval_Tsigma(ph, g, x, 0.25);
  const auto scaled = eval_Tsigma(ph, {g[0].scaled(c1), g[1].scaled(c2)}, x, 0.25);
  EXPECT_LT(std::abs(scaled.value - c1 * c2 * base.value), 1e-12 * std::abs(scaled.value));
}

TEST(Tsigma, HalfPowerMatchesFourTimesRefinedReference) {
  const std::vector<PhaseFunction> ph(2, PhaseFunction::paraboloid(1));
  const std::vector<Density> g = {Density::indicator(Box::interval(0.5, 1.0)), Density::indicator(Box::interval(-1.0, -0.5))};
  const std::vector<SpacetimePoint> x = {{{0.0}, 0.0}, {{0.0}, 0.0}};
  TsigmaOptions coarse;
  const auto v = eval_Tsigma(ph, g, x, 0.5, coarse);
  TsigmaOptions fine;
  fine.quadrature.min_panels *= 4;
  fine.estimate_error = false;
  const auto ref = eval_Tsigma(ph, g, x, 0.5, fine);
  EXPECT_LT(std::abs(v.value - ref.value), 1e-12 * std::abs(ref.value));
  // int int sqrt(2(a - b)) over a in [1/2,1], b in [-1,-1/2]
  const double exact = std::sqrt(2.0) * (4.0 / 15.0) * (std::pow(2.0, 2.5) - 2.0 * std::pow(1.5, 2.5) + 1.0);
  EXPECT_NEAR(ref.value.real(), exact, 1e-12);
}

TEST(Schrodinger, InitialDataIsRecovered) {
  const auto fhat = unit_gaussian_hat();
  for (double x : {-2.0, 0.0, 0.7, 3.0}) {
    const double x1[] = {x};
    const auto u = schrodinger_u(fhat, x1, 0.0);
    EXPECT_LT(std::abs(u.value - std::exp(-x * x / 2)), 1e-6 * std::exp(-x * x / 2));
  }
}

TEST(Schrodinger, GaussianOracle) {
  const auto fhat = unit_gaussian_hat();
  for (double t : {0.1, 0.5, 2.0, 10.0}) {
    for (double x : {-3.0, 0.0, 1.2, 6.0}) {
      const double x1[] = {x};
      EXPECT_LT(std::abs(schrodinger_u(fhat, x1, t).value - gaussian_solution(x, t)), 1e-12) << x << " " << t;
    }
  }
}

TEST(Schrodinger, NumericalTransformOfInitialData) {
  const auto f = Density::gaussian({0.0}, 1.0);
  const auto fhat = fourier_transform(f, Box::interval(-9, 9));
  for (double xi : {0.0, 0.8, 2.5}) EXPECT_NEAR(std::abs(fhat.at(xi) - std::sqrt(2 * kPi) * std::exp(-xi * xi / 2)), 0.0, 1e-13);
  const double x1[] = {0.9};
  EXPECT_LT(std::abs(schrodinger_u(fhat, x1, 0.0).value - std::exp(-0.405)), 1e-6);
}

TEST(Schrodinger, Unitarity) {
  const auto fhat = unit_gaussian_hat();
  const double norm0 = std::sqrt(kPi);  // ||e^{-x^2/2}||^2
  for (double t : {0.5, 2.0}) {
    const double h = 0.05;
    double total = 0.0;
    for (int k = -800; k <= 800; ++k) {
      const double x1[] = {k * h};
      total += std::norm(schrodinger_u(fhat, x1, t).value) * h;
    }
    EXPECT_NEAR(total, norm0, 1e-6 * norm0) << t;
  }
}

TEST(Schrodinger, DiscreteResidualIsSecondOrder) {
  const auto fhat = unit_gaussian_hat();
  auto u = [&](double x, double t) {
    const double x1[] = {x};
    return schrodinger_u(fhat, x1, t).value;
  };
  auto residual = [&](double h) {
    double worst = 0.0;
    for (double x : {-1.0, 0.3, 1.5}) {
      const double t = 0.4;
      const Complex dt = (u(x, t + h) - u(x, t - h)) / (2 * h);
      const Complex lap = (u(x + h, t) - 2.0 * u(x, t) + u(x - h, t)) / (h * h);
      worst = std::max(worst, std::abs(kI * dt - lap));
    }
    return worst;
  };
  const double r1 = residual(0.02), r2 = residual(0.01);
  EXPECT_LT(r2, 1e-2);
  EXPECT_NEAR(r1 / r2, 4.0, 0.3);
}

namespace {

GridField sampled_field(double lo, double h, int n, const std::function<Complex(double)>& f) {
  GridField g{{n}, {h}, {lo}, {}};
  for (int k = 0; k < n; ++k) g.values.push_back(f(lo + k * h));
  return g;
}

}  // namespace

TEST(Multiplier, ZeroExponentIsIdentity) {
  const auto g = sampled_field(-20, 0.05, 800, [](double x) { return Complex(std::exp(-x * x), x * std::exp(-x * x)); });
  const auto out = apply_fractional_multiplier(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(out.values[i] - g.values[i]), 1e-14);
}

TEST(Multiplier, HalfPowersCompose) {
  const auto g = sampled_field(-20, 0.05, 800, [](double x) { return Complex(std::exp(-x * x)); });
  // Same periodic grid for all three so the discrete symbols compose exactly.
  const MultiplierOptions periodic{1.0, 1};
  const auto half = apply_fractional_multiplier(g, 0.5, periodic);
  const auto twice = apply_fractional_multiplier(half, 0.5, periodic);
  const auto once = apply_fractional_multiplier(g, 1.0, periodic);
  double peak = 0.0;
  for (const auto& v : once.values) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(twice.values[i] - once.values[i]), 1e-10 * peak);
}

TEST(Multiplier, PlaneWaveEigenfunction) {
  // The window spectrum sits inside xi > 0, where |xi| = xi, so
  // |D|(e^{ikx} w) = -i d/dx (e^{ikx} w) = e^{ikx} (k w - i w').
  const double k = 7.0;
  auto window = [](double x) { return std::exp(-x * x / 200.0); };
  const auto g = sampled_field(-100, 0.05, 4000, [&](double x) { return std::polar(window(x), k * x); });
  const auto out = apply_fractional_multiplier(g, 1.0);
  for (int i = 1800; i < 2200; i += 7) {
    const double x = -100 + 0.05 * i;
    const Complex expected = std::polar(1.0, k * x) * Complex(k * window(x), x / 100.0 * window(x));
    EXPECT_LT(std::abs(out.values[i] - expected), 1e-4 * k) << x;
  }
  // at the window centre the derivative term vanishes
  EXPECT_LT(std::abs(out.values[2000] - k * g.values[2000]), 1e-10);
}

TEST(Multiplier, InsufficientDecayIsStructured) {
  const auto g = sampled_field(-1, 0.05, 40, [](double) { return Complex(1.0); });
  try {
    (void)apply_fractional_multiplier(g, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientDecay);
  }
}

TEST(Multiplier, RhoSymbolInOneDimensionIsDifference) {
  const auto rho = rho_power(1, 1.0);
  const double k[] = {0.5, 2.0};
  EXPECT_DOUBLE_EQ(rho(k), 1.5);
}
