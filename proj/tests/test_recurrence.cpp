#include <gtest/gtest.h>

#include <cmath>

#include "nuspec/errors.hpp"
#include "nuspec/recurrence.hpp"

using namespace nuspec;

TEST(TauBall, FixedPointReturnsImmediately) {
  const MapPtr d = make_map("doubling");
  EXPECT_EQ(tau_ball(*d, StartPoint(Point{0, 0}), 1e-3, 64).tau, 1);
  EXPECT_EQ(tau_ball(*make_map("diag23"), StartPoint(Point{0, 0}), 1e-3, 64).tau, 1);
}

TEST(TauBall, DoublingOracle) {
  // Rational oracle: first n with |2^n x - x| mod 1 < r (1 + 2^n).
  const RecurrenceSample s = tau_ball(*make_map("doubling"), StartPoint(Point{0.413, 0}), 0x1p-10, 64);
  EXPECT_EQ(s.tau, 6);
  EXPECT_EQ(s.method, ImageMethod::exact_image);
  EXPECT_FALSE(s.censored);
}

TEST(TauBall, Diag23OracleWithinBounds) {
  const MapPtr m = make_map("diag23");
  const double r = 1e-3;
  const RecurrenceSample s = tau_ball(*m, StartPoint(Point{0.413, 0.287}), r, 64);
  EXPECT_EQ(s.tau, 6);
  // Ceiling from full coverage of the slow factor.
  EXPECT_EQ(full_cover_bound(*m, r), 9);
  EXPECT_LE(s.tau, full_cover_bound(*m, r));
}

TEST(TauBall, NeverExceedsFullCoverCeiling) {
  const MapPtr m = make_map("diag23");
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const StartPoint x = sample_typical(*m, rng, 256);
    for (double r : {1e-2, 1e-3, 1e-4}) ASSERT_LE(tau_ball(*m, x, r, 128).tau, full_cover_bound(*m, r));
  }
}

TEST(TauBall, MonotoneInRadius) {
  const MapPtr d = make_map("doubling");
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const StartPoint x = sample_typical(*d, rng, 256);
    int prev = 0;
    for (double r : {0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4}) {
      const int t = tau_ball(*d, x, r, 128).tau;
      ASSERT_GE(t, prev);
      prev = t;
    }
  }
}

TEST(TauBall, GridAgreesWithExact) {
  const MapPtr d = make_map("doubling");
  Rng rng(24301);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const StartPoint x = sample_typical(*d, rng, 256);
    const double r = std::pow(10.0, -1.0 - 2.0 * uniform01(rng));
    const int exact = tau_ball(*d, x, r, 64, ImageMethod::exact_image).tau;
    const int grid = tau_ball(*d, StartPoint(x.point), r, 64, ImageMethod::grid_image, r / 128).tau;
    ASSERT_LE(std::abs(exact - grid), 1) << "pair " << i;
    mismatches += exact != grid;
  }
  // Disagreement is possible only when a return is tangent at grid scale.
  EXPECT_LE(mismatches, 2);
}

TEST(TauBall, Preconditions) {
  const MapPtr d = make_map("doubling");
  EXPECT_THROW(tau_ball(*d, StartPoint(Point{0.3, 0}), 0.0, 10), std::invalid_argument);
  EXPECT_THROW(tau_ball(*d, StartPoint(Point{0.3, 0}), 0.1, 0), std::invalid_argument);
  EXPECT_THROW(tau_ball(*make_map("chebyshev"), StartPoint(Point{0.3, 0}), 0.1, 10, ImageMethod::exact_image),
               std::invalid_argument);
  try {
    tau_ball(*d, StartPoint(Point{0.413, 0}), 1e-9, 3);
    FAIL() << "expected no_return";
  } catch (const DynamicsError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_return);
  }
}

TEST(RecurrenceExponent, DoublingSlopeNearInverseLyapunov) {
  const MapPtr d = make_map("doubling");
  Rng rng(24301);
  std::vector<StartPoint> centers;
  for (int i = 0; i < 12; ++i) centers.push_back(sample_typical(*d, rng, 256));
  const std::vector<double> radii{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
  const ExponentFit fit = recurrence_exponent(*d, centers, radii, 128, 1);
  ASSERT_TRUE(fit.upper_bound.has_value());
  EXPECT_NEAR(*fit.upper_bound, 1.0 / std::log(2.0), 1e-12);
  EXPECT_NEAR(fit.slope, 1.0 / std::log(2.0), 0.35);
  EXPECT_FALSE(fit.censoring_exceeded);
  EXPECT_EQ(fit.samples.size(), centers.size() * radii.size());

  const ExponentFit again = recurrence_exponent(*d, centers, radii, 128, 4);
  EXPECT_EQ(fit.slope, again.slope);
}

TEST(RecurrenceExponent, Preconditions) {
  const MapPtr d = make_map("doubling");
  std::vector<StartPoint> few(5, StartPoint(Point{0.3, 0}));
  const std::vector<double> radii{1e-2, 1e-3, 1e-4};
  EXPECT_THROW(recurrence_exponent(*d, few, radii), std::invalid_argument);
  std::vector<StartPoint> enough(10, StartPoint(Point{0.3, 0}));
  const std::vector<double> narrow{1e-2, 5e-3, 1e-3};
  EXPECT_THROW(recurrence_exponent(*d, enough, narrow), std::invalid_argument);
}
