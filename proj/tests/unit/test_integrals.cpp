#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlid/common/error.hpp"
#include "mlid/common/rng.hpp"
#include "mlid/integrals/change_of_variables.hpp"
#include "mlid/integrals/identity.hpp"
#include "mlid/integrals/presets.hpp"
#include "mlid/integrals/space_time.hpp"

using namespace mlid;
using namespace mlid::integrals;
using phases::Box;
using phases::Point;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

IdentityExperiment indicator_pair(double sigma) {
  IdentityExperiment exp;
  exp.phases = {PhaseFunction::paraboloid(1), PhaseFunction::paraboloid(1)};
  exp.densities = {Density::indicator(Box::interval(0.5, 1.0)), Density::indicator(Box::interval(-1.0, -0.5))};
  exp.sigma = sigma;
  return exp;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kConfig;
}

}  // namespace

TEST(Rhs, ZeroWeightExponentGivesProductOfNorms) {
  const auto r = rhs_weighted_integral(indicator_pair(0.5));
  EXPECT_NEAR(r.value, kTwoPi * kTwoPi * 0.25, 1e-10);
}

TEST(Rhs, IndicatorsMatchClosedFormDoubleIntegral) {
  // int_{1/2}^{1} int_{-1}^{-1/2} da db / (a - b) = G(2) - 2 G(3/2) + G(1), G(u) = u ln u - u.
  auto G = [](double u) { return u * std::log(u) - u; };
  const double inner = G(2.0) - 2.0 * G(1.5) + G(1.0);
  const auto r = rhs_weighted_integral(indicator_pair(0.0));
  EXPECT_NEAR(r.value, kTwoPi * kTwoPi * 0.5 * inner, 1e-9);
  EXPECT_TRUE(r.support.has_value());
  EXPECT_NEAR(r.support->min_abs_det, 2.0, 1e-6);
}

TEST(Rhs, ZeroDensityGivesZero) {
  auto exp = indicator_pair(0.0);
  exp.densities[1] = Density::zero(1);
  EXPECT_EQ(rhs_weighted_integral(exp).value, 0.0);
  EXPECT_EQ(lhs_subspace_integral(exp).value, 0.0);
}

TEST(Rhs, SupportRuleDependsOnSigmaAndPhase) {
  auto exp = indicator_pair(0.0);
  exp.densities[1] = Density::indicator(Box::interval(0.25, 0.75));
  EXPECT_EQ(code_of([&] { rhs_weighted_integral(exp); }), ErrorCode::kSupportCondition);
  exp.sigma = -0.25;
  EXPECT_EQ(code_of([&] { rhs_weighted_integral(exp); }), ErrorCode::kSupportCondition);
  // The paraboloid with sigma >= 0 carries no support condition.
  exp.sigma = 0.5;
  EXPECT_FALSE(support_condition_required(exp));
  EXPECT_NEAR(rhs_weighted_integral(exp).value, kTwoPi * kTwoPi * 0.25, 1e-10);
  exp.phases[1] = tabulate([](double x) { return x * x; }, -2.0, 2.0, 1.0 / 64);
  EXPECT_TRUE(support_condition_required(exp));
  EXPECT_EQ(code_of([&] { rhs_weighted_integral(exp); }), ErrorCode::kSupportCondition);
}

TEST(Rhs, ContinuousInSigma) {
  auto exp = parabola_pair(0.25);
  const double mid = rhs_weighted_integral(exp).value;
  for (double ds : {-1e-4, 1e-4}) {
    exp.sigma = 0.25 + ds;
    EXPECT_LE(rel(rhs_weighted_integral(exp).value, mid), 1e-2);
  }
}

TEST(Rhs, MatrixFormAgreesAtSigmaZeroOnly) {
  auto general = indicator_pair(0.0);
  auto matrix = general;
  matrix.paraboloid_matrix_form = true;
  EXPECT_NEAR(rhs_weighted_integral(matrix).value, rhs_weighted_integral(general).value, 1e-10);
  general.sigma = matrix.sigma = 0.25;
  // |2 det|^{-1/2} against 2^{-1} |det|^{-1/2}.
  EXPECT_NEAR(rhs_weighted_integral(matrix).value / rhs_weighted_integral(general).value, std::sqrt(2.0) / 2.0, 1e-10);
  matrix.phases[0] = PhaseFunction::paraboloid(1).reflected();
  EXPECT_EQ(code_of([&] { rhs_weighted_integral(matrix); }), ErrorCode::kInvalidArgument);
}

TEST(Rhs, ThreeLinearProductOfNormsAtSigmaHalf) {
  IdentityExperiment exp;
  exp.phases.assign(3, PhaseFunction::paraboloid(2));
  exp.densities = {Density::indicator(Box{{0.0, 0.0}, {0.2, 0.2}}), Density::indicator(Box{{1.0, 0.0}, {1.2, 0.2}}),
                   Density::indicator(Box{{0.0, 1.0}, {0.2, 1.2}})};
  exp.sigma = 0.5;
  exp.rhs.node_cap = 1 << 20;
  const double norms = std::pow(0.04, 3);
  EXPECT_NEAR(rhs_weighted_integral(exp).value, std::pow(kTwoPi, 6) * norms, 1e-8 * std::pow(kTwoPi, 6) * norms);
}

TEST(Lhs, ParabolaPairMatchesRhsAtSigmaZero) {
  const auto exp = parabola_pair(0.0);
  const auto lhs = lhs_subspace_integral(exp);
  const auto rhs = rhs_weighted_integral(exp);
  EXPECT_LE(rel(lhs.value, rhs.value), 1e-2) << lhs.value << " vs " << rhs.value;
  EXPECT_LE(lhs.tail_estimate, 0.1 * lhs.value);
  EXPECT_LE(lhs.quadrature_error, 1e-6 * lhs.value);
  EXPECT_EQ(lhs.rank, 1);
}

TEST(Lhs, ParabolaPairMatchesRhsAtSigmaQuarter) {
  const auto exp = parabola_pair(0.25);
  const auto lhs = lhs_subspace_integral(exp);
  const auto rhs = rhs_weighted_integral(exp);
  EXPECT_LE(rel(lhs.value, rhs.value), 1e-2) << lhs.value << " vs " << rhs.value;
  EXPECT_GT(lhs.rank, 1);
}

TEST(Lhs, RefusesHigherDegreeDeterministically) {
  IdentityExperiment exp;
  exp.phases.assign(3, PhaseFunction::paraboloid(2));
  exp.densities = {Density::indicator(Box{{0.0, 0.0}, {0.2, 0.2}}), Density::indicator(Box{{1.0, 0.0}, {1.2, 0.2}}),
                   Density::indicator(Box{{0.0, 1.0}, {0.2, 1.2}})};
  EXPECT_EQ(code_of([&] { lhs_subspace_integral(exp); }), ErrorCode::kInvalidArgument);
}

TEST(Lhs, SmallRadiiRejectTheTailModel) {
  auto exp = parabola_pair(0.0);
  exp.r1 = 2.0;
  exp.r2 = 4.0;
  EXPECT_EQ(code_of([&] { lhs_subspace_integral(exp); }), ErrorCode::kTailModelRejected);
}

TEST(Lhs, IndependentOfWorkerCount) {
  auto exp = parabola_pair(0.0);
  exp.r1 = 20.0;
  exp.r2 = 40.0;
  exp.lhs.tail_tolerance = 1.0;
  exp.workers = 1;
  const double one = lhs_subspace_integral(exp).value_r2;
  exp.workers = 3;
  EXPECT_EQ(lhs_subspace_integral(exp).value_r2, one);
}

TEST(Convolution, OriginIsTheSubspaceIntegral) {
  const auto exp = parabola_pair(0.0);
  EXPECT_EQ(convolution_at(exp, {0.0, 0.0}).value, lhs_subspace_integral(exp).value);
}

TEST(Convolution, ConstantAcrossShifts) {
  const auto exp = parabola_pair(0.0);
  const double at0 = convolution_at(exp, {0.0, 0.0}).value;
  const double shifted = convolution_at(exp, {10.0, 5.0}).value;
  EXPECT_LE(rel(shifted, at0), 2e-2);
}

TEST(Convolution, ReflectionGivesTheProductForm) {
  const auto exp = parabola_pair(0.0);
  auto reflected = exp;
  reflected.phases[1] = exp.phases[1].reflected();
  reflected.densities[1] = exp.densities[1].reflected();
  const auto product = product_form_integral(reflected);
  EXPECT_LE(rel(product.value_r2, convolution_at(exp, {0.0, 0.0}).value_r2), 1e-9);
}

TEST(Convolution, NeedsSigmaZero) {
  const auto exp = parabola_pair(0.25);
  EXPECT_EQ(code_of([&] { convolution_at(exp, {1.0, 1.0}); }), ErrorCode::kInvalidArgument);
}

TEST(SpaceTime, GaussianSliceMatchesClosedForm) {
  // f = pi^{-1/4} e^{-x^2/2}: |u|^2 is a Gaussian of variance (1+4t^2)/2 and
  // int |D^{1/2} |u|^2|^2 dx = 1 / (pi (1 + 4 t^2)). The periodic grid sums
  // |k| |p^(k)|^2 across the kink at k = 0, an O(dk^2) error.
  const auto f = Density::gaussian({0.0}, 1.0, std::pow(std::numbers::pi, -0.25));
  for (double t : {0.0, 0.3, -2.0, 10.0, 150.0})
    EXPECT_NEAR(ot_time_slice(f, f, t), 1.0 / (std::numbers::pi * (1.0 + 4.0 * t * t)), 1e-7) << t;
}

TEST(SpaceTime, GaussianPairGivesHalf) {
  const auto f = Density::gaussian({0.0}, 1.0, std::pow(std::numbers::pi, -0.25));
  const auto r = ot_identity_lhs(f, f);
  EXPECT_NEAR(r.norm1, 1.0, 1e-12);
  EXPECT_LE(rel(r.value, 0.5 * r.norm1 * r.norm2), 1e-3) << r.value;
  EXPECT_GT(r.tail, 0.0);
}

TEST(SpaceTime, ModulatedPairGivesHalf) {
  const auto f = Density::gaussian({0.0}, 1.0, std::pow(std::numbers::pi, -0.25));
  const double a = 5.0;
  const auto g = f.modulated(std::span<const double>(&a, 1));
  const auto r = ot_identity_lhs(f, g);
  EXPECT_LE(rel(r.value, 0.5), 1e-3) << r.value;
}

TEST(SpaceTime, ZeroDatumAndShortHorizon) {
  const auto f = Density::gaussian({0.0}, 1.0, std::pow(std::numbers::pi, -0.25));
  EXPECT_EQ(ot_identity_lhs(f, Density::zero(1)).value, 0.0);
  SpaceTimeGrid grid;
  grid.t_max = 1.0;
  EXPECT_EQ(code_of([&] { ot_identity_lhs(f, f, grid); }), ErrorCode::kTailModelRejected);
}

TEST(SpaceTime, RoughDataRejected) {
  const auto box = Density::indicator(Box::interval(-1.0, 1.0));
  EXPECT_EQ(code_of([&] { ot_identity_lhs(box, box); }), ErrorCode::kInsufficientDecay);
}

TEST(Jacobian, UnitShiftsInThePlane) {
  const auto c = paraboloid_jacobian_check(3, {{1.0, 0.0}, {0.0, 1.0}}, {0.3, -0.7});
  EXPECT_DOUBLE_EQ(c.analytic, 4.0);
  EXPECT_NEAR(c.numeric, 4.0, 1e-8);
}

TEST(Jacobian, DependentShiftsVanish) {
  const auto c = paraboloid_jacobian_check(3, {{1.0, 2.0}, {2.0, 4.0}}, {0.1, 0.2});
  EXPECT_EQ(c.analytic, 0.0);
  EXPECT_NEAR(c.numeric, 0.0, 1e-8);
}

TEST(Jacobian, RandomShiftsAgreeWithDifferences) {
  CounterRng rng(7);
  for (int n = 3; n <= 5; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Point> etas(n - 1, Point(n - 1));
      Point xi(n - 1);
      for (auto& e : etas)
        for (auto& v : e) v = rng.uniform(-2.0, 2.0);
      for (auto& v : xi) v = rng.uniform(-2.0, 2.0);
      const auto c = paraboloid_jacobian_check(n, etas, xi);
      EXPECT_LE(std::abs(c.analytic - c.numeric), 1e-6 * std::abs(c.analytic)) << n;
    }
  }
}

TEST(Injectivity, AffineParaboloidMapBoundedBelow) {
  IdentityExperiment exp;
  exp.phases.assign(3, PhaseFunction::paraboloid(2));
  exp.densities = {Density::indicator(Box{{0.85, -0.15}, {1.15, 0.15}}),
                   Density::indicator(Box{{-0.15, 0.85}, {0.15, 1.15}}),
                   Density::indicator(Box{{-0.15, -0.15}, {0.15, 0.15}})};
  const std::vector<Point> etas{{1.0, 0.1}, {0.2, 1.0}};
  InjectivityOptions opts;
  opts.samples = 20000;
  const auto r = injectivity_probe(exp, etas, opts);
  // Smallest singular value of H = [[1, 0.1], [0.2, 1]] from the eigenvalues of H^T H.
  const double a = 1.0 + 0.04, b = 0.1 + 0.2, d = 0.01 + 1.0;
  const double smin = std::sqrt(0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b));
  EXPECT_FALSE(r.counterexample);
  EXPECT_GE(r.min_ratio, 2.0 * smin * (1 - 1e-12));
  EXPECT_EQ(r.pairs, 20000u);
}

TEST(Injectivity, SeparatedParabolaPiecesPositive) {
  const auto exp = parabola_pair(0.0);
  const auto r = injectivity_probe(exp, {{2.0}});
  EXPECT_EQ(r.pairs, 100000u);
  EXPECT_FALSE(r.counterexample);
  EXPECT_NEAR(r.min_ratio, 4.0, 1e-6);
}

TEST(Injectivity, TabulatedPairPositive) {
  const auto r = injectivity_probe(tabulated_pair(0.0), {{2.0}});
  EXPECT_FALSE(r.counterexample);
  EXPECT_GT(r.min_ratio, 0.5);
}

TEST(Injectivity, OverlappingSupportsFlagged) {
  IdentityExperiment exp;
  exp.phases = {PhaseFunction::paraboloid(1), PhaseFunction::paraboloid(1)};
  exp.densities = {Density::indicator(Box::interval(-1.0, 1.0)), Density::indicator(Box::interval(-1.0, 1.0))};
  InjectivityOptions opts;
  opts.samples = 1000;
  EXPECT_EQ(code_of([&] { injectivity_probe(exp, {{0.0}}, opts); }), ErrorCode::kSupportCondition);
  opts.require_support = false;
  const auto r = injectivity_probe(exp, {{0.0}}, opts);
  EXPECT_TRUE(r.counterexample);
  EXPECT_EQ(r.min_ratio, 0.0);
}
