#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nuspec/errors.hpp"
#include "nuspec/hyperbolic_times.hpp"

using namespace nuspec;

namespace {

const double kHalfLog2 = std::log(2.0) / 2.0;

std::vector<std::size_t> iota_from_one(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

// Oracle: every (k, n) pair with exact summation, no slack.
std::vector<std::size_t> all_pairs(const std::vector<double>& a, double c) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    bool ok = true;
    long double s = 0.0L;
    for (std::size_t k = n; k-- > 0 && ok;) {
      s += a[k];
      ok = s <= -2.0L * c * static_cast<long double>(n - k);
    }
    if (ok) out.push_back(n);
  }
  return out;
}

}  // namespace

TEST(HyperbolicTimes, DoublingBoundaryEveryTime) {
  const OrbitRecord rec = compute_orbit(make_map("doubling"), Point{0.3, 0}, 20);
  EXPECT_EQ(exact_hyperbolic_times(rec, kHalfLog2), iota_from_one(20));
  EXPECT_TRUE(exact_hyperbolic_times(rec, 0.4).empty());
}

TEST(HyperbolicTimes, SyntheticSequences) {
  // Oracle values from the all-pairs check; (-1,-1,+1,-1) loses n = 4 at k = 2.
  const std::vector<double> a{-1, -1, 1, -1};
  EXPECT_EQ(all_pairs(a, 0.25), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(exact_hyperbolic_times(a, 0.25), (std::vector<std::size_t>{1, 2}));
  const std::vector<double> b{-1, -1, 0, -1};
  EXPECT_EQ(exact_hyperbolic_times(b, 0.25), (std::vector<std::size_t>{1, 2, 4}));
}

TEST(HyperbolicTimes, InfiniteEntriesBlockAndNanThrows) {
  const double inf = std::numeric_limits<double>::infinity();
  // A critical summand enters every backward sum that spans it, so nothing after it qualifies.
  EXPECT_EQ(exact_hyperbolic_times(std::vector<double>{-1, inf, -5, -5}, 0.25), std::vector<std::size_t>{1});
  EXPECT_THROW(exact_hyperbolic_times(std::vector<double>{-1, std::nan("")}, 0.25), std::invalid_argument);
}

TEST(HyperbolicTimes, MatchesBruteForceOnRandomSequences) {
  Rng rng(24301);
  std::normal_distribution<double> g(-0.3, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(1000);
    for (double& v : a) v = g(rng);
    ASSERT_EQ(exact_hyperbolic_times(a, 0.1), brute_force_hyperbolic_times(a, 0.1)) << "trial " << trial;
  }
}

TEST(HyperbolicTimes, MonotoneInC) {
  const OrbitRecord rec = compute_orbit(make_map("manneville-pomeau", 0.5), Point{0.7, 0}, 20'000);
  std::vector<std::size_t> prev = exact_hyperbolic_times(rec, 0.01);
  double prev_freq = hyperbolic_frequency(prev, rec.length);
  for (double c : {0.02, 0.05, 0.1, 0.2, 0.4}) {
    const auto cur = exact_hyperbolic_times(rec, c);
    EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) << c;
    const double freq = hyperbolic_frequency(cur, rec.length);
    EXPECT_LE(freq, prev_freq);
    prev = cur;
    prev_freq = freq;
  }
}

TEST(Pliss, Examples) {
  const std::vector<double> l2(10, std::log(2.0));
  EXPECT_EQ(pliss_times(l2, kHalfLog2, 0.6, 0.0).indices, iota_from_one(10));
  EXPECT_EQ(pliss_times(std::vector<double>{1, 1, 0, 1}, 0.5, 0.6, 0.0).indices, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_TRUE(pliss_times(std::vector<double>{-1, -1, -1}, 0.5, 0.6, -1.0).indices.empty());
  EXPECT_THROW(pliss_times(l2, 0.6, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(pliss_times(l2, 0.1, 0.5, 1.0), std::invalid_argument);
}

TEST(Pliss, SoundAgainstHyperbolicTimes) {
  const OrbitRecord rec = compute_orbit(make_map("chebyshev"), Point{0.2137, 0}, 20'000);
  std::vector<double> a(rec.log_inv_norms.size());
  std::transform(rec.log_inv_norms.begin(), rec.log_inv_norms.end(), a.begin(), [](double v) { return -v; });
  const double c = 0.1;
  const double lo = *std::min_element(a.begin(), a.end());
  const auto p = pliss_times(a, 2.0 * c, 2.0 * c + 0.1, lo).indices;
  const auto h = exact_hyperbolic_times(rec, c);
  EXPECT_TRUE(std::includes(h.begin(), h.end(), p.begin(), p.end()));
}

TEST(HyperbolicTimes, FrequencyExamples) {
  EXPECT_EQ(hyperbolic_frequency(iota_from_one(50), 50), 1.0);
  EXPECT_EQ(hyperbolic_frequency({}, 50), 0.0);
  const OrbitRecord rec = compute_orbit(make_map("doubling"), Point{0.3, 0}, 1000);
  EXPECT_EQ(hyperbolic_frequency(exact_hyperbolic_times(rec, kHalfLog2), 1000), 1.0);
}

TEST(Concatenation, NoViolationsFromExactScan) {
  const OrbitRecord d = compute_orbit(make_map("doubling"), Point{0.3, 0}, 500);
  EXPECT_TRUE(concatenation_check(d.log_inv_norms, kHalfLog2, exact_hyperbolic_times(d, kHalfLog2)).empty());
  const OrbitRecord m = compute_orbit(make_map("manneville-pomeau", 0.5), Point{0.7, 0}, 5000);
  EXPECT_TRUE(concatenation_check(m.log_inv_norms, 0.1, exact_hyperbolic_times(m, 0.1)).empty());
}

TEST(Concatenation, DetectsCorruptedIndexSet) {
  // Every time of the constant sequence qualifies, so {2, 3} misses 2 + 3 = 5.
  const std::vector<double> a(8, -1.0);
  const auto v = concatenation_check(a, 0.25, std::vector<std::size_t>{2, 3});
  const bool found = std::any_of(v.begin(), v.end(), [](const ConcatenationViolation& x) {
    return x.m == 2 && x.n == 3 && x.sum == 5;
  });
  EXPECT_TRUE(found);
}

TEST(Nonlacunarity, Examples) {
  const auto idx = iota_from_one(400);
  const GapReport r = nonlacunarity_statistics(idx);
  EXPECT_LE(r.tail_max, 4.0 / (3.0 * 400.0));
  std::vector<std::size_t> pow2;
  for (int k = 0; k < 20; ++k) pow2.push_back(std::size_t{1} << k);
  const GapReport lac = nonlacunarity_statistics(pow2);
  for (double q : lac.ratios) EXPECT_EQ(q, 1.0);
  EXPECT_EQ(lac.tail_max, 1.0);
  EXPECT_THROW(nonlacunarity_statistics(std::vector<std::size_t>{1, 2}), DynamicsError);
  const GapReport sq = nonlacunarity_statistics(idx, Gamma::parse("power:0.5"));
  EXPECT_EQ(sq.gamma_id, "power:0.5");
  EXPECT_NEAR(sq.ratios[3], 1.0 / 2.0, 1e-15);
}

TEST(ReturnAverage, DoublingAndIntermittent) {
  const OrbitRecord d = compute_orbit(make_map("doubling"), Point{0.3, 0}, 1000);
  EXPECT_EQ(first_time_return_average(d, kHalfLog2).average, 1.0);
  EXPECT_EQ(first_time_return_average(d, kHalfLog2 / 2.0).average, 1.0);
  EXPECT_THROW(first_time_return_average(d, 0.4), DynamicsError);
  const MapPtr mp = make_map("manneville-pomeau", 0.5);
  Rng rng(24301);
  const OrbitRecord m = compute_orbit(mp, sample_typical(*mp, rng, 0), 1'000'000);
  const ReturnAverage ra = first_time_return_average(m, 0.2);
  // Oracle: both sides from the raw index list.
  const auto idx = exact_hyperbolic_times(m, 0.2);
  EXPECT_DOUBLE_EQ(ra.inverse_frequency, 1e6 / static_cast<double>(idx.size()));
  EXPECT_LE(ra.average, ra.inverse_frequency + 0.05);
}

TEST(ChoosePower, Examples) {
  const MapPtr d = make_map("doubling");
  const std::vector<StartPoint> s{Point{0.3, 0}};
  EXPECT_EQ(choose_power(d, 0.1, s, 1000).ell, 1);
  EXPECT_EQ(choose_power(d, 0.17, s, 1000).ell, 1);
  EXPECT_THROW(choose_power(d, 0.2, s, 1000, 8), DynamicsError);

  const MapPtr mp = make_map("manneville-pomeau", 0.5);
  Rng rng(24301);
  std::vector<StartPoint> ms;
  for (int i = 0; i < 4; ++i) ms.push_back(sample_typical(*mp, rng, 0));
  const PowerChoice pc = choose_power(mp, 0.05, ms, 20'000);
  // Oracle: in one dimension the ell-step average equals the strided 1-step average.
  EXPECT_EQ(pc.ell, 1);
  EXPECT_LT(pc.averages[0], -0.2);
}

TEST(Calibration, DoublingResolvesToPointTwo) {
  const Calibration cal = calibrate(make_map("doubling"), 24301);
  EXPECT_EQ(cal.c, 0.2);
  EXPECT_EQ(cal.frequency, 1.0);
  EXPECT_EQ(cal.ell, 1);
  EXPECT_EQ(cal.c_power, 0.1);
}

TEST(Calibration, TriplingAllTimesHyperbolic) {
  const OrbitRecord rec = compute_orbit(make_map("tripling"), Point{0.3, 0}, 5000);
  EXPECT_EQ(exact_hyperbolic_times(rec, std::log(3.0) / 2.0).size(), 5000u);
}
