#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nuspec/digit_code.hpp"
#include "nuspec/map_catalog.hpp"

namespace nuspec {

// An initial condition. Maps with exact digit coding iterate the code when present;
// a plain double would collapse to 0 after about 53 doublings.
struct StartPoint {
  Point point;
  std::optional<CodedPoint> code;

  StartPoint() = default;
  StartPoint(Point p) : point(p) {}  // NOLINT(google-explicit-constructor)
  StartPoint(Point p, CodedPoint c) : point(p), code(std::move(c)) {}

  // Exact code valid for at least `horizon` shifts (doubles are converted exactly).
  CodedPoint coded(const DynamicalMap& map, std::size_t horizon) const;
};

// A point typical for the reference measure, coded to `horizon` digits where exact.
StartPoint sample_typical(const DynamicalMap& map, Rng& rng, std::size_t horizon);

struct OrbitRecord {
  MapPtr map;
  Point x0;
  std::size_t length = 0;
  std::vector<Point> points;          // length + 1 entries
  std::vector<double> log_inv_norms;  // length entries; +inf at critical hits
  std::vector<std::size_t> critical_hits;
  std::map<double, std::vector<double>> log_trunc_dists;  // delta -> -log dist_delta

  // Cached when delta was requested at construction, else computed on the fly.
  std::vector<double> neg_log_trunc(double delta) const;
};

OrbitRecord compute_orbit(MapPtr map, const StartPoint& x0, std::size_t N, std::span<const double> deltas = {});

// Orbit points f^0(x) ... f^N(x), exact for coded maps.
std::vector<Point> trajectory(const DynamicalMap& map, const StartPoint& x0, std::size_t N);

double birkhoff_average(const OrbitRecord& record, const std::function<double(Point)>& observable);

struct LyapunovOptions {
  std::size_t burn_in = 1000;
  std::size_t reorthogonalization_period = 10;
};

struct LyapunovEstimate {
  std::vector<double> exponents;  // ascending
  std::size_t iterates_used = 0;
  std::size_t reorthogonalization_period = 0;
  std::size_t critical_hits = 0;
  bool degenerate = false;  // DegenerateCocycle: a critical summand was dropped
};

LyapunovEstimate lyapunov_spectrum(const DynamicalMap& map, const StartPoint& x0, std::size_t N,
                                   LyapunovOptions options = {});

struct CriterionValue {
  double value = 0.0;
  bool verdict = false;
  std::size_t terms = 0;
  bool critical_hit = false;
};

// (1/N) sum of -log||Df^{-1}|| over non-critical summands; verdict value > 4c.
CriterionValue expansion_criterion(const OrbitRecord& record, double c);
// (1/N) sum of -log dist_delta; +inf with critical_hit set when the orbit meets C.
CriterionValue slow_approximation_criterion(const OrbitRecord& record, double delta);

}  // namespace nuspec
