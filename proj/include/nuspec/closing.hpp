#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nuspec/ball_geometry.hpp"
#include "nuspec/hyperbolic_times.hpp"

namespace nuspec {

struct ClosingContext {
  double c = 0.2;
  double delta = 0.1;
  int ell = 1;
  int cover_cap = 64;
  std::size_t uniform_cover_centers = 16;  // 0 disables the uniform covering offset
  int max_varied_symbols = 4;               // root refinement: trailing itinerary symbols varied
  std::size_t max_candidates = 1u << 20;    // exact enumeration: per-period window cap
};

enum class ClosingMethod { automatic, exact_enumeration, root_refinement };
std::string to_string(ClosingMethod method);

// The selected hyperbolic times and covering offset that bound the period search.
struct TargetRule {
  std::size_t lower = 0;     // ell n_{i-1} (0 before the first time)
  std::size_t upper = 0;     // ell n_i >= n
  std::size_t extended = 0;  // ell n_{i+s}; equals upper in the uniform case
  std::size_t s = 0;
  double stretch = 1.0;      // (c + eta) / c
  double cover_radius = 0.0;
  int cover_offset = 0;          // J at the trial center
  int cover_offset_uniform = -1;  // max J over sampled centers, -1 when not computed
  std::size_t period_cap = 0;     // extended + cover_offset
};

struct PeriodicOrbit {
  std::vector<Point> points;  // p, f(p), ..., one entry per step of the least period
};

struct ClosingResult {
  Point center;
  std::size_t n = 0;
  double epsilon = 0.0;
  std::optional<double> eta;  // nullopt = uniform ball
  std::optional<QProfile> q;
  Point periodic_point;
  std::size_t period = 0;  // least period
  long overshoot = 0;      // period - n
  bool short_period = false;  // overshoot < 0
  std::size_t search_period = 0;  // m at which the point was found
  std::vector<double> shadow_distances;  // k = 0..n
  std::vector<double> radii;             // k = 0..n
  double periodicity_residual = 0.0;
  TargetRule target;
  PeriodicOrbit orbit;
  // Exact path: repeating digit word per coordinate. Root refinement: branch itinerary.
  std::vector<std::vector<std::uint8_t>> words;
  ClosingMethod method = ClosingMethod::automatic;
  std::size_t candidates_tested = 0;
};

// Uniform closing: searches periods n, n+1, ... up to ell n_{k+1} + N(gamma).
ClosingResult find_periodic_in_ball(MapPtr map, const StartPoint& x, std::size_t n, double epsilon,
                                    const ClosingContext& ctx, ClosingMethod method = ClosingMethod::automatic);

// Nonuniform closing with the period target ell n_{i+s} + J, J = N(q(x)^-2 epsilon).
// Throws std::invalid_argument when q is not eta-slowly varying along the segment.
ClosingResult find_periodic_nonuniform(MapPtr map, const StartPoint& x, std::size_t n, double epsilon,
                                       const QProfile& q, double eta, const ClosingContext& ctx,
                                       ClosingMethod method = ClosingMethod::automatic);

// Period target alone (no search), for rule-level checks.
TargetRule nonuniform_target(MapPtr map, const StartPoint& x, std::size_t n, double epsilon, const QProfile& q,
                             double eta, const ClosingContext& ctx);
TargetRule uniform_target(MapPtr map, const StartPoint& x, std::size_t n, double epsilon, const ClosingContext& ctx);

struct SweepTrial {
  std::size_t center_index = 0;
  std::size_t n = 0;
  double eta = 0.0;
  std::optional<ClosingResult> result;
  std::string gap_reason;  // set when result is empty
};

struct CurvePoint {
  std::size_t n = 0;
  double max_ratio = 0.0;  // max K/n over found, unflagged trials; NaN when none
  std::size_t found = 0;
  std::size_t gaps = 0;
  std::size_t flagged = 0;
};

struct SpecificationVerdict {
  std::vector<double> etas;
  std::vector<std::size_t> ns;
  std::vector<std::vector<CurvePoint>> curves;  // [eta][n]
  std::vector<double> limit_estimates;          // curve value at the largest n, per eta
  std::vector<SweepTrial> trials;               // (center, n, eta) lexicographic
};

enum class QFamily { exponential, truncated_distance_power, constant };

// q_eta = exponential(eta) by default. Throws std::invalid_argument unless the
// ladders have >= 5 n values and >= 3 eta values.
SpecificationVerdict specification_sweep(MapPtr map, std::span<const StartPoint> sample,
                                         std::span<const std::size_t> n_ladder, std::span<const double> eta_ladder,
                                         double epsilon, const ClosingContext& ctx, unsigned threads = 1,
                                         QFamily family = QFamily::exponential);

// Max over observables of |pooled orbit average - reference integral|, the pooled measure
// being uniform on all listed orbit points.
double periodic_measure_discrepancy(const DynamicalMap& map, std::span<const PeriodicOrbit> orbits,
                                    std::span<const Observable> observables);
double periodic_measure_discrepancy(const DynamicalMap& map, std::span<const ClosingResult> results,
                                    std::span<const Observable> observables);

// Distinct periodic orbits of period dividing `period` whose itineraries occur as windows
// f^s(x), s < positions, of the orbit of x. Exact for coded maps.
std::vector<PeriodicOrbit> harvest_periodic_orbits(MapPtr map, const StartPoint& x, std::size_t period,
                                                   std::size_t positions);

}  // namespace nuspec
