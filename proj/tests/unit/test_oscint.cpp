#include <gtest/gtest.h>

#include <cmath>

#include "mlid/common/error.hpp"
#include "mlid/common/rng.hpp"
#include "mlid/extension/extension.hpp"
#include "mlid/integrals/identity.hpp"
#include "mlid/lincore/block_det.hpp"
#include "mlid/oscint/phase.hpp"
#include "mlid/oscint/scaling.hpp"

using namespace mlid;
using namespace mlid::oscint;

namespace {

Polynomial square() { return Polynomial(1, {{{2}, 1.0}}); }
Polynomial paraboloid2() { return Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}); }

OscPhase parabola_phase(Box xi_box, Box x_box = Box::cube(2, -10.0, 10.0)) {
  return extension_phase(square(), Cutoff{std::move(x_box), 0.0}, Cutoff{std::move(xi_box), 0.0});
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kConfig;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST(Cutoff, IndicatorAndSmoothPlateau) {
  const Cutoff ind{Box::interval(-1.0, 1.0), 0.0};
  const Cutoff smooth{Box::interval(-1.5, 1.5), 0.5};
  for (double x : {-1.0, 0.0, 0.99}) EXPECT_EQ(ind(std::span<const double>(&x, 1)), 1.0);
  for (double x : {-1.01, 2.0}) EXPECT_EQ(ind(std::span<const double>(&x, 1)), 0.0);
  for (double x : {-1.0, 0.0, 1.0}) EXPECT_EQ(smooth(std::span<const double>(&x, 1)), 1.0);
  double mid = 1.25;
  EXPECT_NEAR(smooth(std::span<const double>(&mid, 1)), 0.5, 1e-15);
  double edge = 1.5;
  EXPECT_EQ(smooth(std::span<const double>(&edge, 1)), 0.0);
}

TEST(OscPhase, MixedPartialsMatchFiniteDifferences) {
  CounterRng rng(21);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 5; ++k) EXPECT_LT(mixed_partials_gap(random_phase(n, rng), 32, k + 1), 1e-6) << n;
}

TEST(OscPhase, RejectsInconsistentShapes) {
  OscPhase p = parabola_phase(Box::interval(0.0, 1.0));
  p.phi = paraboloid2();
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kDimensionMismatch);
}

TEST(Tlambda, RecoversExtensionOperatorOnTheParabola) {
  const auto g = phases::Density::gaussian({0.3}, 0.2);
  const OscPhase p = parabola_phase(g.box());
  for (const auto& x : std::vector<Point>{{1.3, -0.7}, {0.0, 0.0}, {-4.0, 2.5}}) {
    const auto t = eval_Tlambda(p, g, 1.0, x);
    const auto e = extension::eval_E(phases::PhaseFunction::paraboloid(1), g, {{x[0]}, x[1]});
    EXPECT_LT(std::abs(t.value - e.value), 1e-10 * std::abs(e.value) + 1e-14);
  }
}

TEST(Tlambda, ZeroDensityAndOutsideTheBox) {
  const OscPhase p = parabola_phase(Box::interval(-1.0, 1.0), Box::cube(2, -1.0, 1.0));
  EXPECT_EQ(eval_Tlambda(p, phases::Density::zero(1), 10.0, Point{0.1, 0.2}).value, Complex(0.0));
  EXPECT_EQ(eval_Tlambda(p, phases::Density::bump({0.0}, 1.0), 10.0, Point{1.5, 0.2}).value, Complex(0.0));
  EXPECT_EQ(code_of([&] { eval_Tlambda(p, phases::Density::bump({0.0}, 1.0), 0.5, Point{0.0, 0.0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Tlambda, HomogeneityInLambdaPhi) {
  CounterRng rng(4);
  OscPhase p = random_phase(2, rng);
  OscPhase doubled = p;
  doubled.phi = p.phi.scaled(2.0);
  const auto f = phases::Density::bump({0.1}, 0.8);
  const Point x{0.3, -0.4};
  const auto a = eval_Tlambda(doubled, f, 1.0, x);
  const auto b = eval_Tlambda(p, f, 2.0, x);
  EXPECT_LT(std::abs(a.value - b.value), 1e-13);
}

TEST(Tlambda, QuadratureBudget) {
  const OscPhase p = parabola_phase(Box::interval(-1.0, 1.0));
  QuadratureOptions tight;
  tight.node_cap = 64;
  EXPECT_EQ(code_of([&] { eval_Tlambda(p, phases::Density::bump({0.0}, 1.0), 1e4, Point{5.0, 5.0}, tight); }),
            ErrorCode::kQuadratureBudget);
}

TEST(XField, NormalToTheParabola) {
  const OscPhase p = parabola_phase(Box::interval(-3.0, 3.0));
  for (double xi : {-2.0, -0.5, 0.0, 0.7, 2.5}) {
    const auto v = x_field(p, Point{0.4, -1.1}, Point{xi});
    EXPECT_DOUBLE_EQ(v[0], -2 * xi);
    EXPECT_DOUBLE_EQ(v[1], 1.0);
  }
}

TEST(XField, ParallelToTheNormalOfTheParaboloid) {
  const OscPhase p = extension_phase(paraboloid2(), Cutoff{Box::cube(3, -1.0, 1.0), 0.0}, Cutoff{Box::cube(2, -1.0, 1.0), 0.0});
  CounterRng rng(8);
  for (int k = 0; k < 20; ++k) {
    const Point xi{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto v = x_field(p, Point{0.1, 0.2, 0.3}, xi);
    const Point normal{-2 * xi[0], -2 * xi[1], 1.0};
    const double cross[3] = {v[1] * normal[2] - v[2] * normal[1], v[2] * normal[0] - v[0] * normal[2],
                             v[0] * normal[1] - v[1] * normal[0]};
    for (double c : cross) EXPECT_NEAR(c, 0.0, 1e-14);
    EXPECT_GT(v[2], 0.0);
  }
}

TEST(XField, LinearPhaseByHand) {
  // Phi = 3 x_1 xi - 2 x_2 xi: the column (3, -2) has dual (2, 3).
  const OscPhase p{2, Polynomial(3, {{{1, 0, 1}, 3.0}, {{0, 1, 1}, -2.0}}), Cutoff{Box::cube(2, -1.0, 1.0), 0.0},
                   Cutoff{Box::interval(-1.0, 1.0), 0.0}};
  for (double xi : {-0.5, 0.9}) {
    const auto v = x_field(p, Point{0.2, 0.7}, Point{xi});
    EXPECT_EQ(v, (Point{2.0, 3.0}));
  }
}

TEST(XField, ClosedFormAgreesWithFiniteDifferences) {
  CounterRng rng(13);
  for (int n = 2; n <= 4; ++n) {
    const OscPhase p = random_phase(n, rng, 10);
    for (int k = 0; k < 10; ++k) {
      Point x(n), xi(n - 1);
      for (auto& v : x) v = rng.uniform(-1, 1);
      for (auto& v : xi) v = rng.uniform(-1, 1);
      const auto a = x_field(p, x, xi);
      const auto b = x_field_fd(p, x, xi);
      double norm = 0, gap = 0;
      for (int i = 0; i < n; ++i) {
        norm = std::max(norm, std::abs(a[i]));
        gap = std::max(gap, std::abs(a[i] - b[i]));
      }
      EXPECT_LT(gap, 1e-5 * norm) << n;
    }
  }
}

TEST(Transversality, SeparatedParabolaPieces) {
  const std::vector<OscPhase> ph{parabola_phase(Box::interval(0.5, 2.5)), parabola_phase(Box::interval(-2.5, -0.5))};
  // det = 2 (xi_2 - xi_1), at least twice the gap of 1.
  const double m = min_transversality(ph, 10'000, 3);
  EXPECT_GE(m, 2.0);
  EXPECT_LT(m, 2.1);
  EXPECT_DOUBLE_EQ(transversality_det(ph, {{0.0, 0.0}, {1.0, 1.0}}, {{1.0}, {-1.0}}), -4.0);
}

TEST(Transversality, CoincidentPhasesAndPointsGiveZero) {
  const OscPhase p = parabola_phase(Box::interval(-1.0, 1.0));
  EXPECT_EQ(transversality_det({p, p}, {{0.1, 0.2}, {0.1, 0.2}}, {{0.3}, {0.3}}), 0.0);
}

TEST(Transversality, PerturbedParaboloidTripleStaysPositiveUnderRefinement) {
  Polynomial h(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{3, 0}, 0.1}, {{1, 1}, -0.05}});
  const Cutoff xc{Box::cube(3, -1.0, 1.0), 0.0};
  const std::vector<OscPhase> ph{
      extension_phase(h, xc, Cutoff{Box{{-0.2, -0.2}, {0.2, 0.2}}, 0.0}),
      extension_phase(h, xc, Cutoff{Box{{0.8, -0.2}, {1.2, 0.2}}, 0.0}),
      extension_phase(h, xc, Cutoff{Box{{-0.2, 0.8}, {0.2, 1.2}}, 0.0})};
  const double coarse = min_transversality(ph, 10'000, 5);
  const double fine = min_transversality(ph, 40'000, 6);
  EXPECT_GT(coarse, 0.0);
  EXPECT_GT(fine, 0.0);
  EXPECT_GT(fine / coarse, 0.8);
  EXPECT_LT(fine / coarse, 1.05);
}

TEST(HessPsi, TwoDimensionsCoincidesWithTheTransversalityQuantity) {
  CounterRng rng(2);
  for (int k = 0; k < 50; ++k) {
    const std::vector<OscPhase> ph{random_phase(2, rng), random_phase(2, rng)};
    const Point x1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Point xi1{rng.uniform(-1, 1)}, xi2{rng.uniform(-1, 1)};
    const auto h = hess_psi_det(ph, {x1}, {xi1, xi2});
    const double t = transversality_det(ph, {x1, {-x1[0], -x1[1]}}, {xi1, xi2});
    EXPECT_NEAR(h.dense, -t, 1e-13 * std::max(1.0, std::abs(t)));
  }
}

TEST(HessPsi, DenseAgreesWithFormulaForRandomPhases) {
  CounterRng rng(17);
  for (int n = 2; n <= 4; ++n)
    for (int k = 0; k < 40; ++k) {
      std::vector<OscPhase> ph;
      std::vector<Point> x(n - 1, Point(n)), xi(n, Point(n - 1));
      for (int j = 0; j < n; ++j) ph.push_back(random_phase(n, rng));
      for (auto& p : x)
        for (auto& v : p) v = rng.uniform(-1, 1);
      for (auto& p : xi)
        for (auto& v : p) v = rng.uniform(-1, 1);
      const auto h = hess_psi_det(ph, x, xi);
      EXPECT_EQ(h.hessian.rows(), static_cast<std::size_t>(n * (n - 1)));
      EXPECT_LT(rel(h.dense, h.formula), 1e-10) << n << " " << h.dense << " " << h.formula;
    }
}

TEST(HessPsi, CoplanarFieldsGiveZeroBothWays) {
  const OscPhase p =
      extension_phase(paraboloid2(), Cutoff{Box::cube(3, -1.0, 1.0), 0.0}, Cutoff{Box::cube(2, -1.0, 1.0), 0.0});
  const Point xi{0.3, -0.2};
  const auto h = hess_psi_det({p, p, p}, {{0.1, 0.2, 0.3}, {-0.4, 0.0, 0.5}}, {xi, xi, xi});
  EXPECT_NEAR(h.dense, 0.0, 1e-14);
  EXPECT_NEAR(h.formula, 0.0, 1e-14);
}

TEST(HessPsi, RejectsWrongShapes) {
  const OscPhase p = parabola_phase(Box::interval(-1.0, 1.0));
  EXPECT_EQ(code_of([&] { hess_psi_det({p, p}, {{0.0, 0.0}, {0.0, 0.0}}, {{0.0}, {0.0}}); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Scaling, SlopeMinusTwoAndRatioMatchesTheBilinearIdentity) {
  const auto preset = scaling_preset();
  const std::vector<double> lambdas{16, 32, 64, 128, 256};
  const auto r = scaling_experiment(preset.phases, preset.densities, lambdas);
  ASSERT_FALSE(r.degenerate);
  EXPECT_NEAR(r.slope, -2.0, 0.1);
  EXPECT_LT(r.ratio_spread, 2.0);
  EXPECT_GE(r.transversality_min, 2.0);
  for (std::size_t k = 1; k < r.points.size(); ++k) EXPECT_LE(r.points[k].lhs, 1.1 * r.points[k - 1].lhs);

  // Once lambda * plateau covers the integrand, lambda^2 LHS is the full
  // bilinear integral of E f_1, E f_2 over R^2, i.e. the weighted RHS.
  integrals::IdentityExperiment exp;
  exp.phases = {phases::PhaseFunction::paraboloid(1), phases::PhaseFunction::paraboloid(1)};
  exp.densities = preset.densities;
  const double rhs = integrals::rhs_weighted_integral(exp).value;
  for (const auto& p : r.points)
    if (p.lambda >= 64) {
      EXPECT_LT(rel(p.lambda * p.lambda * p.lhs, rhs), 1e-6) << p.lambda;
    }
}

TEST(Scaling, RefinementAndFastPathAgree) {
  const auto preset = scaling_preset();
  ScalingOptions base;
  const double a = lhs_at(preset.phases, preset.densities, 16.0, base);
  ScalingOptions refined = base;
  refined.refine = 2;
  EXPECT_LT(rel(a, lhs_at(preset.phases, preset.densities, 16.0, refined)), 1e-6);
  ScalingOptions general = base;
  general.separable_fast_path = false;
  EXPECT_LT(rel(a, lhs_at(preset.phases, preset.densities, 16.0, general)), 1e-12);
}

TEST(Scaling, ZeroDensityIsDegenerate) {
  auto preset = scaling_preset();
  preset.densities[1] = phases::Density::zero(1);
  const auto r = scaling_experiment(preset.phases, preset.densities, {16, 32});
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(std::isnan(r.slope));
  for (const auto& p : r.points) EXPECT_EQ(p.lhs, 0.0);
}

TEST(Scaling, RefusesNonTransversalPhasesAndOtherDimensions) {
  auto preset = scaling_preset();
  preset.phases[1] = preset.phases[0];
  preset.densities[1] = preset.densities[0];
  EXPECT_EQ(code_of([&] { scaling_experiment(preset.phases, preset.densities, {16, 32}); }), ErrorCode::kNonTransversal);
  CounterRng rng(1);
  std::vector<OscPhase> three{random_phase(3, rng), random_phase(3, rng), random_phase(3, rng)};
  const auto d = phases::Density::bump({0.0, 0.0}, 0.5);
  EXPECT_EQ(code_of([&] { scaling_experiment(three, {d, d, d}, {16, 32}); }), ErrorCode::kInvalidArgument);
}
