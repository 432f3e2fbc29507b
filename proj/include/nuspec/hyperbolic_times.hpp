#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nuspec/orbit.hpp"

namespace nuspec {

// Per-step slack absorbing rounding in the backward sums, so the boundary
// case c = (log 2)/2 on the doubling map keeps every n.
inline constexpr double kHyperbolicSlack = 1e-12;

// n (1-based) qualifies iff sum_{j=k}^{n-1} a_j <= -2c (n - k) for every 0 <= k < n.
// O(N) via the running minimum of T_k = S_k + 2ck. Throws std::invalid_argument on
// non-finite entries.
std::vector<std::size_t> exact_hyperbolic_times(std::span<const double> log_inv_norms, double c);
std::vector<std::size_t> exact_hyperbolic_times(const OrbitRecord& record, double c);

// Reference O(N^2) all-pairs check with the same slack.
std::vector<std::size_t> brute_force_hyperbolic_times(std::span<const double> log_inv_norms, double c);

struct PlissResult {
  std::vector<std::size_t> indices;
  double density = 0.0;
  double average = 0.0;
  double sup = 0.0;            // observed maximum of the sequence
  double density_bound = 0.0;  // (c2 - c1) / (sup - c1)
  bool bound_applies = false;  // average >= c2
};

// n qualifies iff sum_{j=k}^{n-1} a_j >= c1 (n - k) for every 0 <= k < n.
// Throws std::invalid_argument unless c1 < c2 and lower_bound <= min a.
PlissResult pliss_times(std::span<const double> values, double c1, double c2, double lower_bound);

double hyperbolic_frequency(std::span<const std::size_t> indices, std::size_t N);

struct ConcatenationViolation {
  std::size_t m = 0;  // base time
  std::size_t n = 0;  // hyperbolic time of the shifted record
  std::size_t sum = 0;
};

// For each base m in indices (up to max_bases of them, evenly spread), rescans the
// shifted sequence from m and reports every m + n missing from indices.
std::vector<ConcatenationViolation> concatenation_check(std::span<const double> log_inv_norms, double c,
                                                        std::span<const std::size_t> indices,
                                                        std::size_t max_bases = 64);

struct Gamma {
  enum class Kind { identity, power } kind = Kind::identity;
  double p = 1.0;

  double operator()(double t) const;
  std::string id() const;
  static Gamma parse(const std::string& text);  // "identity" or "power:p"
};

struct GapReport {
  std::vector<double> ratios;  // (n_{k+1} - n_k) / gamma(n_k)
  double tail_max = 0.0;       // over the last quarter of ratios (at least one)
  std::size_t tail_count = 0;
  std::string gamma_id;
};

// Throws DynamicsError(too_few_times) below 3 indices.
GapReport nonlacunarity_statistics(std::span<const std::size_t> indices, Gamma gamma = {});

struct ReturnAverage {
  double average = 0.0;           // mean of n_{i+1} - n_i with n_0 = 0
  double inverse_frequency = 0.0;  // N / |indices|
  std::size_t count = 0;
};

// Throws DynamicsError(no_hyperbolic_times) when the record has none.
ReturnAverage first_time_return_average(const OrbitRecord& record, double c);

struct PowerChoice {
  int ell = 0;
  double average = 0.0;  // sample mean of (1/ell) log||Df^ell^{-1}|| at ell
  std::vector<double> averages;  // per tried ell, starting at 1
};

// Smallest ell <= max_ell whose orbit-averaged (1/ell) log||(Df^ell)^{-1}|| < -4c.
// Throws DynamicsError(no_such_power) otherwise.
PowerChoice choose_power(MapPtr map, double c, std::span<const StartPoint> sample, std::size_t N,
                         int max_ell = 64);

struct HyperbolicTimeReport {
  double c = 0.0;
  double delta = 0.0;
  std::size_t N = 0;
  std::vector<std::size_t> indices;
  double frequency_hat = 0.0;
  std::size_t first_time = 0;  // 0 when indices is empty
  GapReport gaps;
  std::string method = "exact-scan";
};

HyperbolicTimeReport hyperbolic_time_report(const OrbitRecord& record, double c, double delta, Gamma gamma = {});

struct Calibration {
  double c = 0.0;
  double delta = 0.1;
  int ell = 1;
  double c_power = 0.0;  // level at which ell was determined (c unless the ladder had to descend)
  double frequency = 0.0;
  std::size_t N = 0;
};

// c = largest ladder value 0.4 * 2^-k with frequency > 0.05 at N; ell from choose_power.
Calibration calibrate(MapPtr map, std::uint64_t seed, std::size_t N = 100'000, double delta = 0.1);

}  // namespace nuspec
