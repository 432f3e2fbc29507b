#include "nuspec/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nuspec {

CodedPoint StartPoint::coded(const DynamicalMap& map, std::size_t horizon) const {
  if (code) return *code;
  CodedPoint out;
  for (int i = 0; i < map.dimension(); ++i)
    out.coords.push_back(DigitCode::from_double(point[i], *map.factor(i).digit_base(), horizon + 64));
  return out;
}

StartPoint sample_typical(const DynamicalMap& map, Rng& rng, std::size_t horizon) {
  if (map.exactly_coded()) {
    CodedPoint code;
    for (int i = 0; i < map.dimension(); ++i)
      code.coords.push_back(DigitCode::random(*map.factor(i).digit_base(), horizon + 128, rng));
    Point p = code.value(0);
    return StartPoint(p, std::move(code));
  }
  switch (map.reference().kind) {
    case MeasureKind::chebyshev_arcsine: {
      const double u = uniform01(rng);
      return StartPoint(Point{0.5 * (1.0 - std::cos(std::numbers::pi * u)), 0.0});
    }
    case MeasureKind::acip_empirical: {
      Point p{uniform01(rng), map.dimension() == 2 ? uniform01(rng) : 0.0};
      for (int i = 0; i < 1000; ++i) p = map.evaluate(p);
      return StartPoint(p);
    }
    case MeasureKind::lebesgue:
      break;
  }
  return StartPoint(Point{uniform01(rng), map.dimension() == 2 ? uniform01(rng) : 0.0});
}

std::vector<Point> trajectory(const DynamicalMap& map, const StartPoint& x0, std::size_t N) {
  std::vector<Point> pts(N + 1);
  if (map.exactly_coded()) {
    const CodedPoint code = x0.coded(map, N);
    for (std::size_t c = 0; c < code.coords.size(); ++c) {
      const int axis = static_cast<int>(c);
      const DigitCode& dc = code.coords[c];
      const double scale = 1.0 / static_cast<double>(DigitCode::window_modulus(dc.base()));
      WindowCursor cur(dc);
      for (std::size_t i = 0; i <= N; ++i) {
        pts[i][axis] = wrap_unit(static_cast<double>(cur.value()) * scale);
        if (i < N) cur.advance();
      }
    }
    return pts;
  }
  pts[0] = x0.point;
  for (std::size_t i = 0; i < N; ++i) pts[i + 1] = map.evaluate(pts[i]);
  return pts;
}

std::vector<double> OrbitRecord::neg_log_trunc(double delta) const {
  if (auto it = log_trunc_dists.find(delta); it != log_trunc_dists.end()) return it->second;
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = -std::log(truncated_critical_distance(*map, points[i], delta));
  return out;
}

OrbitRecord compute_orbit(MapPtr map, const StartPoint& x0, std::size_t N, std::span<const double> deltas) {
  OrbitRecord rec;
  rec.map = map;
  rec.x0 = x0.point;
  rec.length = N;
  rec.points = trajectory(*map, x0, N);
  rec.log_inv_norms.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double v = log_inverse_norm(*map, rec.points[i]);
    rec.log_inv_norms[i] = v;
    if (std::isinf(v)) rec.critical_hits.push_back(i);
  }
  for (double delta : deltas) rec.log_trunc_dists.emplace(delta, rec.neg_log_trunc(delta));
  return rec;
}

double birkhoff_average(const OrbitRecord& record, const std::function<double(Point)>& observable) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < record.length; ++i) sum += observable(record.points[i]);
  return static_cast<double>(sum / static_cast<long double>(record.length));
}

namespace {

// Modified Gram-Schmidt on the columns (q0, q1); returns the R diagonal.
std::array<double, 2> orthonormalize(std::array<double, 2>& q0, std::array<double, 2>& q1) {
  const double r00 = std::hypot(q0[0], q0[1]);
  q0 = {q0[0] / r00, q0[1] / r00};
  const double r01 = q0[0] * q1[0] + q0[1] * q1[1];
  q1 = {q1[0] - r01 * q0[0], q1[1] - r01 * q0[1]};
  const double r11 = std::hypot(q1[0], q1[1]);
  q1 = {q1[0] / r11, q1[1] / r11};
  return {r00, r11};
}

}  // namespace

LyapunovEstimate lyapunov_spectrum(const DynamicalMap& map, const StartPoint& x0, std::size_t N,
                                   LyapunovOptions options) {
  LyapunovEstimate est;
  est.reorthogonalization_period = options.reorthogonalization_period;
  est.iterates_used = N;
  const std::vector<Point> pts = trajectory(map, x0, options.burn_in + N);
  const std::size_t start = options.burn_in;
  if (map.dimension() == 1) {
    long double sum = 0.0L;
    std::size_t used = 0;
    for (std::size_t i = start; i < start + N; ++i) {
      if (map.is_critical(pts[i])) {
        ++est.critical_hits;
        continue;
      }
      sum += std::log(std::fabs(map.jacobian(pts[i]).a));
      ++used;
    }
    est.exponents = {used ? static_cast<double>(sum / used) : std::numeric_limits<double>::quiet_NaN()};
  } else {
    const std::size_t period = std::max<std::size_t>(1, options.reorthogonalization_period);
    std::array<double, 2> q0{1.0, 0.0}, q1{0.0, 1.0};
    long double s0 = 0.0L, s1 = 0.0L;
    std::size_t since = 0;
    for (std::size_t i = start; i < start + N; ++i) {
      if (map.is_critical(pts[i])) {
        ++est.critical_hits;
        continue;
      }
      const Jacobian J = map.jacobian(pts[i]);
      q0 = {J.a * q0[0] + J.b * q0[1], J.c * q0[0] + J.d * q0[1]};
      q1 = {J.a * q1[0] + J.b * q1[1], J.c * q1[0] + J.d * q1[1]};
      if (++since == period) {
        const auto r = orthonormalize(q0, q1);
        s0 += std::log(r[0]);
        s1 += std::log(r[1]);
        since = 0;
      }
    }
    if (since) {
      const auto r = orthonormalize(q0, q1);
      s0 += std::log(r[0]);
      s1 += std::log(r[1]);
    }
    const std::size_t used = N - est.critical_hits;
    est.exponents = {static_cast<double>(s0 / used), static_cast<double>(s1 / used)};
    std::sort(est.exponents.begin(), est.exponents.end());
  }
  est.degenerate = est.critical_hits > 0;
  return est;
}

CriterionValue expansion_criterion(const OrbitRecord& record, double c) {
  CriterionValue out;
  long double sum = 0.0L;
  for (double v : record.log_inv_norms) {
    if (std::isinf(v)) {
      out.critical_hit = true;
      continue;
    }
    sum -= v;
    ++out.terms;
  }
  out.value = out.terms ? static_cast<double>(sum / out.terms) : 0.0;
  out.verdict = out.value > 4.0 * c;
  return out;
}

CriterionValue slow_approximation_criterion(const OrbitRecord& record, double delta) {
  CriterionValue out;
  out.terms = record.length;
  for (std::size_t i = 0; i < record.length; ++i) {
    if (record.map->is_critical(record.points[i])) {
      out.critical_hit = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  const std::vector<double> v = record.neg_log_trunc(delta);
  long double sum = 0.0L;
  for (double x : v) sum += x;
  out.value = record.length ? static_cast<double>(sum / record.length) : 0.0;
  out.verdict = true;
  return out;
}

}  // namespace nuspec
