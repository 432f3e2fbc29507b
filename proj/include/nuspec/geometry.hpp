#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace nuspec {

enum class PhaseSpace { circle, torus };

inline int dimension(PhaseSpace space) { return space == PhaseSpace::circle ? 1 : 2; }

// Circle points use x only; y stays 0.
struct Point {
  double x = 0.0;
  double y = 0.0;

  double operator[](int i) const { return i == 0 ? x : y; }
  double& operator[](int i) { return i == 0 ? x : y; }
  friend bool operator==(const Point&, const Point&) = default;
};

// Representative in [0,1). Guards against floor() rounding -1e-20 up to 1.0.
inline double wrap_unit(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

inline double circle_distance(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

// Signed offset b - a reduced into [-1/2, 1/2).
inline double circle_offset(double a, double b) {
  double d = b - a;
  d -= std::floor(d + 0.5);
  return d;
}

inline double distance(PhaseSpace space, Point a, Point b) {
  double dx = circle_distance(a.x, b.x);
  if (space == PhaseSpace::circle) return dx;
  return std::max(dx, circle_distance(a.y, b.y));
}

// A d x d Jacobian for d in {1, 2}. For d = 1 only a is meaningful.
struct Jacobian {
  int dim = 1;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double det() const { return dim == 1 ? a : a * d - b * c; }
  std::array<double, 2> singular_values() const;  // {max, min}
  double norm() const { return singular_values()[0]; }
  double conorm() const { return singular_values()[1]; }
};

inline std::array<double, 2> Jacobian::singular_values() const {
  if (dim == 1) return {std::fabs(a), std::fabs(a)};
  if (b == 0.0 && c == 0.0) {
    double p = std::fabs(a), q = std::fabs(d);
    return {std::max(p, q), std::min(p, q)};
  }
  // Closed form for 2x2: s1*s2 = |det|, s1^2 + s2^2 = Frobenius^2.
  double f2 = a * a + b * b + c * c + d * d;
  double dt = std::fabs(det());
  double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * dt * dt));
  double smax = std::sqrt(0.5 * (f2 + disc));
  double smin = smax > 0.0 ? dt / smax : 0.0;
  return {smax, smin};
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Deterministic low-discrepancy sequence in [0,1)^2 (R2 / plastic-number lattice).
inline Point quasi_random(std::uint64_t i) {
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g;
  constexpr double a2 = 1.0 / (g * g);
  double k = static_cast<double>(i) + 1.0;
  return {wrap_unit(0.5 + a1 * k), wrap_unit(0.5 + a2 * k)};
}

inline double golden_sequence(std::uint64_t i) {
  constexpr double phi_inv = 0.61803398874989484820;
  return wrap_unit(0.5 + phi_inv * (static_cast<double>(i) + 1.0));
}

}  // namespace nuspec
