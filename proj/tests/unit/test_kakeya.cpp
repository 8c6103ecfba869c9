#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlid/common/error.hpp"
#include "mlid/common/rng.hpp"
#include "mlid/kakeya/convolution.hpp"
#include "mlid/kakeya/tube.hpp"

using namespace mlid;
using namespace mlid::kakeya;

namespace {

MonteCarloSpec quick(std::uint64_t seed = 3) {
  MonteCarloSpec s;
  s.samples = 400'000;
  s.shards = 16;
  s.seed = seed;
  return s;
}

std::vector<Tube> axis_tubes(int n) {
  std::vector<Tube> t;
  for (int a = 0; a < n; ++a) t.push_back(Tube::axis(n, a, CrossSection::unit_box(n - 1), Point(n, 0.0)));
  return t;
}

std::vector<Tube> strips(double theta) {
  return {Tube::along({1.0, 0.0}, CrossSection::unit_box(1), {0.0, 0.0}),
          Tube::along({std::cos(theta), std::sin(theta)}, CrossSection::unit_box(1), {0.3, -0.2})};
}

void expect_within_3se(const MonteCarloEstimate& e, double exact) {
  EXPECT_LE(std::abs(e.estimate - exact), 3.0 * e.standard_error) << e.estimate << " +- " << e.standard_error;
}

}  // namespace

TEST(Tube, ContainmentExamples) {
  const Tube t = Tube::axis(3, 0, CrossSection::unit_box(2), {0.0, 0.0, 0.0});
  EXPECT_TRUE(tube_contains(t, {100.0, 0.2, -0.3}));
  EXPECT_FALSE(tube_contains(t, {0.0, 0.8, 0.0}));
}

TEST(Tube, ContainmentInvariantUnderRotation) {
  const Tube t = Tube::along({1.0, 2.0, -0.5}, CrossSection::box({2.0, 0.5}), {0.1, 0.2, 0.3});
  const auto q = random_rotation(3, 11);
  const Tube r = t.rotated(q);
  CounterRng rng(5);
  for (int i = 0; i < 2000; ++i) {
    Point x{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    Point y(3, 0.0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) y[a] += q[a * 3 + b] * x[b];
    EXPECT_EQ(tube_contains(t, x), tube_contains(r, y));
  }
}

TEST(Tube, UnitVolumeCrossSections) {
  for (int m = 1; m <= 4; ++m) EXPECT_NEAR(CrossSection::unit_ball(m).volume(), 1.0, 1e-13);
  EXPECT_NEAR(CrossSection::unit_ball(1).radius, 0.5, 1e-15);
  EXPECT_THROW(Tube::axis(3, 0, CrossSection::box({1.0, 2.0}), {0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(Tube::make({1.0, 0.0}, {{1.0, 0.0}}, CrossSection::unit_box(1), {0.0, 0.0}), Error);
}

TEST(Wedge, ReciprocalExamples) {
  EXPECT_NEAR(wedge_rhs(axis_tubes(3)), 1.0, 1e-15);
  EXPECT_NEAR(wedge_rhs(strips(std::numbers::pi / 6)), 2.0, 1e-12);
  EXPECT_NEAR(wedge_rhs(strips(std::asin(1e-3))), 1000.0, 1e-6);
  EXPECT_THROW(wedge_rhs(strips(0.0)), Error);
}

TEST(Wedge, ConstantIsOneFromTheBoxCase) {
  for (int n = 2; n <= 5; ++n) EXPECT_EQ(kakeya_constant(n), 1.0);
  EXPECT_NO_THROW(verify_kakeya_constant());
}

TEST(ExactBoxes, ProductOfIntervalLengths) {
  auto t = axis_tubes(3);
  EXPECT_EQ(conv_exact_boxes(t, {0.0, 0.0, 0.0}), 1.0);
  t[1].offset = {0.0, 0.0, 0.25};
  EXPECT_EQ(conv_exact_boxes(t, {1.0, -2.0, 0.5}), 1.0);
  t[0] = Tube::axis(3, 0, CrossSection::box({2.0, 0.5}), {0.0, 0.0, 0.0});
  EXPECT_EQ(conv_exact_boxes(t, {0.0, 0.0, 0.0}), 1.0);
  try {
    conv_exact_boxes(strips(0.5), {0.0, 0.0});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonOrthogonal);
  }
}

TEST(ConvAt, OrthogonalStrips) {
  expect_within_3se(conv_at(axis_tubes(2), {3.0, -7.0}, quick()), 1.0);
}

TEST(ConvAt, StripsAtAnAngle) {
  const auto t = strips(std::numbers::pi / 6);
  const auto e = conv_at(t, {0.5, 0.5}, quick());
  expect_within_3se(e, 2.0);
  // The certified segment leaves the boundary slab empty at the first try.
  EXPECT_EQ(e.doublings, 0);
}

TEST(ConvAt, ThreeAxisTubesMatchExactOracle) {
  auto t = axis_tubes(3);
  t[2].offset = {0.25, 0.0, 0.0};
  expect_within_3se(conv_at(t, {0.0, 0.0, 0.0}, quick()), conv_exact_boxes(t, {0.0, 0.0, 0.0}));
}

TEST(ConvAt, BallAndBoxCrossSectionsAgree) {
  std::vector<Tube> boxes, balls;
  const std::vector<Point> dirs{{1.0, 0.2, 0.0}, {0.1, 1.0, 0.3}, {0.2, -0.1, 1.0}};
  for (const auto& d : dirs) {
    boxes.push_back(Tube::along(d, CrossSection::unit_box(2), {0.0, 0.0, 0.0}));
    balls.push_back(Tube::along(d, CrossSection::unit_ball(2), {0.0, 0.0, 0.0}));
  }
  const auto a = conv_at(boxes, {0.5, 0.0, -0.5}, quick(4));
  const auto b = conv_at(balls, {0.5, 0.0, -0.5}, quick(5));
  EXPECT_LE(std::abs(a.estimate - b.estimate), 3.0 * std::hypot(a.standard_error, b.standard_error));
  expect_within_3se(b, wedge_rhs(balls));
}

TEST(ConvAt, RotationInvariant) {
  const std::vector<Tube> t{Tube::along({1.0, 0.3, 0.0}, CrossSection::unit_box(2), {0.0, 0.0, 0.0}),
                            Tube::along({0.0, 1.0, 0.4}, CrossSection::unit_box(2), {0.0, 0.0, 0.0}),
                            Tube::along({0.5, 0.0, 1.0}, CrossSection::unit_box(2), {0.0, 0.0, 0.0})};
  const auto q = random_rotation(3, 9);
  std::vector<Tube> r;
  for (const auto& x : t) r.push_back(x.rotated(q));
  const Point z{1.0, 2.0, 3.0};
  Point qz(3, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) qz[a] += q[a * 3 + b] * z[b];
  const auto a = conv_at(t, z, quick(6));
  const auto b = conv_at(r, qz, quick(7));
  EXPECT_LE(std::abs(a.estimate - b.estimate), 3.0 * std::hypot(a.standard_error, b.standard_error));
}

TEST(ConvAt, SameResultForAnyWorkerCount) {
  auto spec = quick();
  spec.workers = 1;
  const auto a = conv_at(axis_tubes(3), {0.1, 0.2, 0.3}, spec);
  spec.workers = 4;
  const auto b = conv_at(axis_tubes(3), {0.1, 0.2, 0.3}, spec);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_EQ(a.estimate, b.estimate);
}

TEST(ConvAt, RefusesParallelTubes) {
  try {
    conv_at(strips(0.0), {0.0, 0.0}, quick());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonTransversal);
  }
}

TEST(FamilySums, SingleTupleReducesToConvAt) {
  const auto t = strips(std::numbers::pi / 3);
  const std::vector<TubeFamily> fam{{{t[0]}, {1.0}}, {{t[1]}, {1.0}}};
  const auto s = sigma_family_sums(fam, 0.0, quick());
  EXPECT_NEAR(s.rhs, wedge_rhs(t), 1e-12);
  EXPECT_LE(std::abs(s.lhs - s.rhs), 3.0 * s.lhs_stderr);
}

TEST(FamilySums, TwoByTwoFamiliesInThePlane) {
  const std::vector<TubeFamily> fam{
      {{Tube::along({1.0, 0.0}, CrossSection::unit_box(1), {0.0, 0.0}),
        Tube::along({1.0, 0.4}, CrossSection::unit_box(1), {0.0, 1.0})},
       {0.5, 2.0}},
      {{Tube::along({0.2, 1.0}, CrossSection::unit_box(1), {1.0, 0.0}),
        Tube::along({-0.5, 1.0}, CrossSection::unit_box(1), {0.0, 0.0})},
       {1.0, 0.75}}};
  for (double sigma : {0.0, 0.5}) {
    const auto s = sigma_family_sums(fam, sigma, quick());
    EXPECT_EQ(s.tuples, 4u);
    EXPECT_LE(std::abs(s.lhs - s.rhs), 3.0 * s.lhs_stderr) << sigma;
    if (sigma == 0.5) {
      EXPECT_NEAR(s.rhs, (0.5 + 2.0) * (1.0 + 0.75), 1e-12);
    }
  }
}
