#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nuspec/closing.hpp"
#include "nuspec/errors.hpp"

using namespace nuspec;

namespace {

// Independent re-check for doubling: p = W / (2^m - 1) in integers, x a dyadic double
// whose doublings are exact, compared step by step against the stored radii.
void recheck_doubling(const ClosingResult& r, double x) {
  const std::size_t m = r.words[0].size();
  ASSERT_LE(m, 62u);
  const std::uint64_t mod = (std::uint64_t{1} << m) - 1;
  std::uint64_t w = 0;
  for (std::uint8_t d : r.words[0]) w = 2 * w + d;
  ASSERT_NEAR(r.periodic_point.x, static_cast<double>(w) / static_cast<double>(mod), 1e-15);
  double xk = x;
  for (std::size_t k = 0; k <= r.n; ++k) {
    const double pk = static_cast<double>(w) / static_cast<double>(mod);
    ASSERT_LT(circle_distance(pk, xk), r.radii[k] * (1 + 1e-12)) << "step " << k;
    w = (2 * w) % mod;
    xk = 2.0 * xk;
    if (xk >= 1.0) xk -= 1.0;
  }
  EXPECT_LE(r.periodicity_residual, 1e-9);
}

double cos2pi(Point p) { return std::cos(2.0 * std::numbers::pi * p.x); }

}  // namespace

TEST(Closing, DoublingWitness) {
  const MapPtr d = make_map("doubling");
  const ClosingResult r = find_periodic_in_ball(d, Point{0.3, 0}, 3, 0.1, ClosingContext{});
  EXPECT_NEAR(r.periodic_point.x, 9.0 / 31.0, 1e-15);
  EXPECT_EQ(r.period, 5u);
  EXPECT_EQ(r.overshoot, 2);
  EXPECT_FALSE(r.short_period);
  EXPECT_TRUE(in_dynamical_ball(*d, {Point{0.3, 0}, 3, 0.1, std::nullopt}, r.periodic_point));
  recheck_doubling(r, 0.3);
  ASSERT_EQ(r.orbit.points.size(), 5u);
  EXPECT_NEAR(r.orbit.points[1].x, 18.0 / 31.0, 1e-15);
}

TEST(Closing, PeriodicCenterIsFlagged) {
  const MapPtr d = make_map("doubling");
  const StartPoint third(Point{1.0 / 3.0, 0}, CodedPoint{{DigitCode::periodic(2, {0, 1})}});
  const ClosingResult r = find_periodic_in_ball(d, third, 4, 0.01, ClosingContext{});
  EXPECT_NEAR(r.periodic_point.x, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.period, 2u);
  EXPECT_EQ(r.overshoot, -2);
  EXPECT_TRUE(r.short_period);
}

TEST(Closing, Diag23LatticeWitness) {
  // Oracle: exhaustive search over (i/(2^m-1), j/(3^m-1)) with rational iteration.
  const ClosingResult r = find_periodic_in_ball(make_map("diag23"), Point{0.3, 0.7}, 2, 0.1, ClosingContext{});
  EXPECT_NEAR(r.periodic_point.x, 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(r.periodic_point.y, 9.0 / 13.0, 1e-15);
  EXPECT_EQ(r.period, 3u);
  EXPECT_LE(r.period, r.target.period_cap);
  EXPECT_TRUE(in_dynamical_ball(*make_map("diag23"), {Point{0.3, 0.7}, 2, 0.1, std::nullopt}, r.periodic_point));
}

TEST(Closing, NonuniformConstantTwo) {
  // Oracle: enumeration with radii 0.025 finds 19/63 first (period 6).
  const MapPtr d = make_map("doubling");
  const ClosingResult r = find_periodic_nonuniform(d, Point{0.3, 0}, 3, 0.1, QProfile::constant(2.0), 0.1, ClosingContext{});
  EXPECT_NEAR(r.periodic_point.x, 19.0 / 63.0, 1e-15);
  EXPECT_EQ(r.period, 6u);
  EXPECT_LT(std::fabs(r.periodic_point.x - 0.3), 0.025 / 8.0);
  for (std::size_t k = 0; k <= 3; ++k) EXPECT_DOUBLE_EQ(r.radii[k], 0.025);
}

TEST(Closing, NonuniformRejectsFastVaryingQ) {
  EXPECT_THROW(find_periodic_nonuniform(make_map("doubling"), Point{0.3, 0}, 5, 0.1, QProfile::exponential(1.0), 0.2,
                                        ClosingContext{}),
               std::invalid_argument);
}

TEST(Closing, UnitQAgreesWithUniform) {
  const MapPtr d = make_map("doubling");
  Rng rng(24301);
  for (int i = 0; i < 100; ++i) {
    const StartPoint x = sample_typical(*d, rng, 4096);
    const std::size_t n = 2 + rng() % 40;
    const ClosingResult u = find_periodic_in_ball(d, x, n, 1e-2, ClosingContext{});
    const ClosingResult q = find_periodic_nonuniform(d, x, n, 1e-2, QProfile::constant(1.0), 0.1, ClosingContext{});
    ASSERT_EQ(u.periodic_point, q.periodic_point) << "trial " << i;
    ASSERT_EQ(u.period, q.period);
  }
}

TEST(Closing, ResultsRecheckIndependently) {
  const MapPtr d = make_map("doubling");
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const double x = std::ldexp(static_cast<double>(rng() >> 11), -53);
    const std::size_t n = 1 + rng() % 30;
    const double eps = 0.2 * uniform01(rng) + 1e-3;
    const ClosingResult r = find_periodic_in_ball(d, Point{x, 0}, n, eps, ClosingContext{});
    recheck_doubling(r, x);
    // Overshoot bound: covering offset plus the gap between bracketing hyperbolic times.
    EXPECT_LE(r.overshoot, static_cast<long>(r.target.cover_offset + r.target.upper - r.target.lower));
  }
}

TEST(Closing, RootRefinementStaysOnPeriodicLattice) {
  const MapPtr d = make_map("doubling");
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform01(rng);
    const std::size_t n = 1 + rng() % 12;
    const ClosingResult r = find_periodic_in_ball(d, Point{x, 0}, n, 0.05, ClosingContext{}, ClosingMethod::root_refinement);
    ASSERT_LE(r.search_period, 20u);
    const double scaled = r.periodic_point.x * static_cast<double>((1u << r.search_period) - 1);
    ASSERT_NEAR(scaled, std::round(scaled), 1e-6) << "trial " << i;
    const ClosingResult e = find_periodic_in_ball(d, Point{x, 0}, n, 0.05, ClosingContext{}, ClosingMethod::exact_enumeration);
    EXPECT_GE(r.search_period, e.search_period);
  }
}

TEST(Closing, SmoothMapsUseRootRefinement) {
  for (const char* id : {"chebyshev", "manneville-pomeau"}) {
    const MapPtr m = make_map(id);
    for (int i = 1; i <= 20; ++i) {
      const Point x{0.05 + 0.9 * quasi_random(i).x, 0};
      ClosingResult r;
      try {
        r = find_periodic_in_ball(m, x, 6, 0.05, ClosingContext{});
      } catch (const DynamicsError& e) {
        ASSERT_NE(e.kind(), ErrorKind::search_diverged) << id;
        continue;
      }
      EXPECT_EQ(r.method, ClosingMethod::root_refinement);
      EXPECT_LE(r.periodicity_residual, 1e-9);
      EXPECT_TRUE(in_dynamical_ball(*m, {x, 6, 0.05, std::nullopt}, r.periodic_point)) << id << " " << x.x;
      Point p = r.periodic_point;
      for (std::size_t k = 0; k < r.period; ++k) p = m->evaluate(p);
      EXPECT_LT(circle_distance(p.x, r.periodic_point.x), 1e-6);
    }
  }
}

TEST(Closing, TargetMonotoneInEta) {
  const MapPtr d = make_map("doubling");
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const StartPoint x = sample_typical(*d, rng, 4096);
    const std::size_t n = 8 + rng() % 100;
    std::size_t prev = 0;
    std::optional<long> prev_k;
    for (double eta : {0.025, 0.05, 0.1, 0.2, 0.4}) {
      const QProfile q = QProfile::exponential(eta);
      const TargetRule t = nonuniform_target(d, x, n, 1e-3, q, eta, ClosingContext{});
      EXPECT_GE(t.period_cap, prev);
      prev = t.period_cap;
      const ClosingResult r = find_periodic_nonuniform(d, x, n, 1e-3, q, eta, ClosingContext{});
      if (prev_k) {
        EXPECT_GE(r.overshoot, *prev_k);
      }
      prev_k = r.overshoot;
    }
  }
}

TEST(SpecificationSweep, DoublingOvershootStaysBounded) {
  const MapPtr d = make_map("doubling");
  Rng rng(24301);
  std::vector<StartPoint> s;
  for (int i = 0; i < 4; ++i) s.push_back(sample_typical(*d, rng, 8192));
  const std::vector<std::size_t> ns{8, 16, 32, 64, 128};
  const std::vector<double> etas{0.2, 0.1, 0.05};
  const SpecificationVerdict v = specification_sweep(d, s, ns, etas, 1e-3, ClosingContext{}, 1);
  ASSERT_EQ(v.trials.size(), 4u * 5u * 3u);
  for (const SweepTrial& t : v.trials) {
    ASSERT_TRUE(t.result.has_value()) << t.gap_reason;
    // N(1e-3) = 9 for doubling; the constant c0 is at most 3.
    EXPECT_LE(t.result->overshoot, 9 + 3);
  }
  EXPECT_THROW(specification_sweep(d, s, std::vector<std::size_t>{8, 16}, etas, 1e-3, ClosingContext{}), std::invalid_argument);
  EXPECT_THROW(specification_sweep(d, s, ns, std::vector<double>{0.1}, 1e-3, ClosingContext{}), std::invalid_argument);
}

TEST(SpecificationSweep, FlaggedCentersLeaveCurves) {
  const MapPtr d = make_map("doubling");
  const std::vector<StartPoint> s{StartPoint(Point{0, 0})};
  const std::vector<std::size_t> ns{8, 16, 32, 64, 128};
  const std::vector<double> etas{0.2, 0.1, 0.05};
  const SpecificationVerdict v = specification_sweep(d, s, ns, etas, 1e-3, ClosingContext{});
  for (const auto& curve : v.curves)
    for (const CurvePoint& cp : curve) {
      EXPECT_EQ(cp.flagged, 1u);
      EXPECT_TRUE(std::isnan(cp.max_ratio));
    }
}

TEST(SpecificationSweep, IndependentOfThreadCount) {
  const MapPtr d = make_map("doubling");
  Rng rng(8);
  std::vector<StartPoint> s;
  for (int i = 0; i < 3; ++i) s.push_back(sample_typical(*d, rng, 8192));
  const std::vector<std::size_t> ns{8, 16, 24, 32, 48};
  const std::vector<double> etas{0.2, 0.1, 0.05};
  const auto a = specification_sweep(d, s, ns, etas, 1e-3, ClosingContext{}, 1);
  const auto b = specification_sweep(d, s, ns, etas, 1e-3, ClosingContext{}, 4);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    ASSERT_EQ(a.trials[i].result.has_value(), b.trials[i].result.has_value());
    if (a.trials[i].result) {
      EXPECT_EQ(a.trials[i].result->periodic_point, b.trials[i].result->periodic_point);
    }
  }
}

TEST(SpecificationSweep, IntermittentCurvesDecrease) {
  const MapPtr mp = make_map("manneville-pomeau", 0.5);
  const Calibration cal = calibrate(mp, 24301);
  ClosingContext ctx;
  ctx.c = cal.c;
  ctx.ell = cal.ell;
  Rng rng(24301);
  std::vector<StartPoint> s;
  for (int i = 0; i < 8; ++i) s.push_back(sample_typical(*mp, rng, 0));
  const std::vector<std::size_t> ns{8, 16, 32, 64, 128};
  const std::vector<double> etas{0.2, 0.1, 0.05};
  const SpecificationVerdict v = specification_sweep(mp, s, ns, etas, 1e-3, ctx);
  for (const auto& curve : v.curves)
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].max_ratio, curve[i - 1].max_ratio);
  EXPECT_LE(v.limit_estimates[2], v.limit_estimates[0]);
}

TEST(Discrepancy, Examples) {
  const MapPtr d = make_map("doubling");
  const std::vector<Observable> cosine{{"cos2pix", cos2pi}};
  const std::vector<PeriodicOrbit> two{{{Point{1.0 / 3.0, 0}, Point{2.0 / 3.0, 0}}}};
  EXPECT_NEAR(periodic_measure_discrepancy(*d, two, cosine), 0.5, 1e-12);
  const std::vector<PeriodicOrbit> fixed{{{Point{0, 0}}}};
  EXPECT_NEAR(periodic_measure_discrepancy(*d, fixed, cosine), 1.0, 1e-12);
}

TEST(Harvest, SaturatesAtShortPeriod) {
  const MapPtr d = make_map("doubling");
  Rng rng(24301);
  const StartPoint x = sample_typical(*d, rng, 40'000);
  const auto orbits = harvest_periodic_orbits(d, x, 10, 32 * 1024);
  std::size_t points = 0;
  for (const auto& o : orbits) {
    points += o.points.size();
    EXPECT_EQ(10 % o.points.size(), 0u);
  }
  EXPECT_EQ(points, 1024u);
  // Necklace count: binary words of length 10 up to rotation.
  EXPECT_EQ(orbits.size(), 108u);
  const double disc = periodic_measure_discrepancy(*d, orbits, observable_library(PhaseSpace::circle));
  EXPECT_LT(disc, 2e-3);
}
