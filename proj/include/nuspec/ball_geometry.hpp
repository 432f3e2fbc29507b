#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "nuspec/orbit.hpp"

namespace nuspec {

struct QProfile {
  enum class Kind { constant, exponential, truncated_distance_power } kind = Kind::constant;
  double level = 1.0;  // constant value
  double rate = 0.0;   // exponent for the exponential and distance-power kinds
  double delta = 0.1;  // truncation scale for the distance-power kind

  static QProfile constant(double k) { return {Kind::constant, k, 0.0, 0.1}; }
  // q(x) = exp(rate * x_1); increments of x_1 are below 1, so the budget eta = rate suffices.
  static QProfile exponential(double rate) { return {Kind::exponential, 1.0, rate, 0.1}; }
  // q(x) = dist_delta(x, C)^(-rate).
  static QProfile truncated_distance_power(double rate, double delta) {
    return {Kind::truncated_distance_power, 1.0, rate, delta};
  }

  double operator()(const DynamicalMap& map, Point x) const;
  std::string id() const;
};

struct BallSpec {
  Point center;
  std::size_t length = 0;
  double epsilon = 0.0;
  std::optional<QProfile> q;  // nullopt = uniform
};

// Per-step radii epsilon * q(f^k center)^-2 for k = 0..length (all epsilon when uniform).
std::vector<double> ball_radii(const DynamicalMap& map, const BallSpec& ball, std::span<const Point> center_orbit);

bool in_dynamical_ball(const DynamicalMap& map, const BallSpec& ball, Point y);
bool in_nonuniform_ball(const DynamicalMap& map, const BallSpec& ball, Point y);

struct PreballReport {
  bool verified = false;
  double diameter = 0.0;     // of the pulled-back pre-ball at time 0
  double worst_ratio = 0.0;  // max of dist_k / (exp(-2c(n-k)) dist_n) over pairs and k
  std::size_t pairs_checked = 0;
};

// Pulls B(f^n x, delta) back along the orbit's branches and checks backward contraction
// on sampled pairs within slack 1 + 1e-6. Throws DynamicsError(branch_ambiguity).
PreballReport verify_preball(const DynamicalMap& map, const StartPoint& x, std::size_t n, double c, double delta,
                             std::size_t pair_samples);

bool slowly_varying_check(const QProfile& q, const OrbitRecord& record, double eta);

double power_ball_modulus(const DynamicalMap& map, double epsilon, int ell);

enum class ImageMethod { automatic, exact_image, grid_image };
std::string to_string(ImageMethod method);
// Exact arithmetic for affine factors, grid tracking otherwise.
ImageMethod resolve_method(const DynamicalMap& map, ImageMethod requested);

// Smallest N with f^0(U) u ... u f^N(U) covering every grid cell center, U = B(center, radius).
// Throws DynamicsError(not_covered) past n_max.
int covering_time(const DynamicalMap& map, Point center, double radius, double grid_resolution, int n_max = 64,
                  ImageMethod method = ImageMethod::automatic);

}  // namespace nuspec
