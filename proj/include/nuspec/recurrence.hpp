#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nuspec/ball_geometry.hpp"

namespace nuspec {

struct RecurrenceSample {
  Point center;
  double radius = 0.0;
  int tau = 0;            // censored samples hold n_max, a lower bound
  bool censored = false;  // NoReturnBy(n_max)
  ImageMethod method = ImageMethod::exact_image;
  int n_max = 0;
};

// Smallest n in [1, n_max] with f^n(B) meeting B in positive length, B = B(center, radius).
// Exact arc/rectangle arithmetic on coded start points for affine maps; grid tracking at
// grid_resolution (radius / 128 when 0) otherwise. Throws DynamicsError(no_return).
RecurrenceSample tau_ball(const DynamicalMap& map, const StartPoint& center, double radius, int n_max,
                          ImageMethod method = ImageMethod::automatic, double grid_resolution = 0.0);

struct CenterFit {
  std::size_t center_index = 0;
  double slope = 0.0;  // OLS of tau on -log r over uncensored radii; NaN below 2 points
  double intercept = 0.0;
  std::size_t used = 0;
  std::size_t censored = 0;
  bool monotone = true;  // tau non-increasing in radius
};

struct ExponentFit {
  std::vector<RecurrenceSample> samples;  // (center index, radius index) order
  std::vector<CenterFit> centers;
  double slope = 0.0;  // median of per-center slopes
  std::optional<double> lower_bound;  // 1 / lambda_max
  std::optional<double> upper_bound;  // 1 / lambda_min
  std::optional<double> torus_value;  // 2 / (lambda_1 + lambda_2)
  bool below_upper = true;  // slope <= upper_bound * 1.05
  bool above_lower = true;  // slope >= lower_bound
  double worst_censored_fraction = 0.0;
  bool censoring_exceeded = false;  // some center censored on more than 20% of its ladder
  std::string assumption;
};

// Throws std::invalid_argument unless there are >= 10 centers and the ladder spans >= 2 decades.
ExponentFit recurrence_exponent(const DynamicalMap& map, std::span<const StartPoint> centers,
                                std::span<const double> radius_ladder, int n_max = 128, unsigned threads = 1,
                                ImageMethod method = ImageMethod::automatic);

// Ceiling from full coverage of one factor: smallest n with b^n * 2r >= 1, b the minimal slope.
int full_cover_bound(const DynamicalMap& map, double radius);

}  // namespace nuspec
