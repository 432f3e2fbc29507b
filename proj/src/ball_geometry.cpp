#include "nuspec/ball_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nuspec/arcs.hpp"
#include "nuspec/errors.hpp"

namespace nuspec {

double QProfile::operator()(const DynamicalMap& map, Point x) const {
  switch (kind) {
    case Kind::constant: return level;
    case Kind::exponential: return std::exp(rate * x.x);
    case Kind::truncated_distance_power: return std::pow(truncated_critical_distance(map, x, delta), -rate);
  }
  return 1.0;
}

std::string QProfile::id() const {
  char buf[96];
  switch (kind) {
    case Kind::constant: std::snprintf(buf, sizeof buf, "constant:%.17g", level); break;
    case Kind::exponential: std::snprintf(buf, sizeof buf, "exponential:%.17g", rate); break;
    case Kind::truncated_distance_power:
      std::snprintf(buf, sizeof buf, "truncated-distance:%.17g:%.17g", rate, delta);
      break;
  }
  return buf;
}

std::vector<double> ball_radii(const DynamicalMap& map, const BallSpec& ball, std::span<const Point> orbit) {
  std::vector<double> r(ball.length + 1, ball.epsilon);
  if (ball.q) {
    for (std::size_t k = 0; k <= ball.length; ++k) {
      const double q = (*ball.q)(map, orbit[k]);
      r[k] = ball.epsilon / (q * q);
    }
  }
  return r;
}

namespace {

bool in_ball_impl(const DynamicalMap& map, const BallSpec& ball, Point y) {
  const std::vector<Point> cx = trajectory(map, StartPoint(ball.center), ball.length);
  const std::vector<double> radii = ball_radii(map, ball, cx);
  Point p = y;
  for (std::size_t k = 0; k <= ball.length; ++k) {
    if (!(map.distance(p, cx[k]) < radii[k])) return false;
    if (k < ball.length) p = map.evaluate(p);
  }
  return true;
}

}  // namespace

bool in_dynamical_ball(const DynamicalMap& map, const BallSpec& ball, Point y) {
  BallSpec uniform = ball;
  uniform.q.reset();
  return in_ball_impl(map, uniform, y);
}

bool in_nonuniform_ball(const DynamicalMap& map, const BallSpec& ball, Point y) { return in_ball_impl(map, ball, y); }

PreballReport verify_preball(const DynamicalMap& map, const StartPoint& x, std::size_t n, double c, double delta,
                             std::size_t pair_samples) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
  const std::vector<Point> orbit = trajectory(map, x, n);
  const int d = map.dimension();

  // offsets[k][axis] of one pulled-back point relative to the orbit point x_k.
  auto pull_back = [&](std::array<double, 2> end) {
    std::vector<std::array<double, 2>> off(n + 1);
    off[n] = end;
    for (std::size_t k = n; k-- > 0;) {
      for (int a = 0; a < d; ++a) {
        const auto t = map.factor(a).pull_back_offset(orbit[k][a], off[k + 1][static_cast<std::size_t>(a)]);
        if (!t) throw DynamicsError(ErrorKind::branch_ambiguity, "pre-ball continuation crossed a turning point at step " + std::to_string(k));
        off[k][static_cast<std::size_t>(a)] = *t;
      }
    }
    return off;
  };
  auto gap = [&](const std::array<double, 2>& u, const std::array<double, 2>& v) {
    double g = std::fabs(u[0] - v[0]);
    if (d == 2) g = std::max(g, std::fabs(u[1] - v[1]));
    return g;
  };

  const double edge = delta * (1.0 - 1e-9);
  std::vector<std::pair<std::array<double, 2>, std::array<double, 2>>> ends;
  ends.push_back({{-edge, -edge}, {edge, edge}});
  for (std::size_t i = 0; i < pair_samples; ++i) {
    const Point u = quasi_random(2 * i), v = quasi_random(2 * i + 1);
    ends.push_back({{(2.0 * u.x - 1.0) * edge, (2.0 * u.y - 1.0) * edge}, {(2.0 * v.x - 1.0) * edge, (2.0 * v.y - 1.0) * edge}});
  }

  PreballReport report;
  report.verified = true;
  for (std::size_t p = 0; p < ends.size(); ++p) {
    const auto a = pull_back(ends[p].first);
    const auto b = pull_back(ends[p].second);
    if (p == 0) report.diameter = gap(a[0], b[0]);
    const double dn = gap(a[n], b[n]);
    if (dn == 0.0) continue;
    for (std::size_t k = 0; k <= n; ++k) {
      const double ratio = gap(a[k], b[k]) / (std::exp(-2.0 * c * static_cast<double>(n - k)) * dn);
      report.worst_ratio = std::max(report.worst_ratio, ratio);
      if (ratio > 1.0 + 1e-6) report.verified = false;
    }
    ++report.pairs_checked;
  }
  return report;
}

bool slowly_varying_check(const QProfile& q, const OrbitRecord& record, double eta) {
  const double budget = std::exp(eta) * (1.0 + 1e-12);
  for (std::size_t i = 0; i < record.length; ++i)
    if (q(*record.map, record.points[i + 1]) > budget * q(*record.map, record.points[i])) return false;
  return true;
}

double power_ball_modulus(const DynamicalMap& map, double epsilon, int ell) {
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  return epsilon / std::pow(map.lipschitz_bound(), ell);
}

std::string to_string(ImageMethod method) {
  switch (method) {
    case ImageMethod::automatic: return "auto";
    case ImageMethod::exact_image: return "exact-image";
    case ImageMethod::grid_image: return "grid-image";
  }
  return "auto";
}

ImageMethod resolve_method(const DynamicalMap& map, ImageMethod requested) {
  if (requested != ImageMethod::automatic) return requested;
  return map.exactly_coded() ? ImageMethod::exact_image : ImageMethod::grid_image;
}

namespace {

// Does the union over steps of X_j x Y_j contain every cell center of the torus grid?
bool product_union_covers(const std::vector<std::array<GridSet, 2>>& steps, std::size_t cells) {
  for (const auto& s : steps)
    if (s[0].is_full() && s[1].is_full()) return true;
  std::vector<std::size_t> breaks{0, cells};
  for (const auto& s : steps)
    for (const auto& [a, b] : s[0].runs()) {
      breaks.push_back(a);
      breaks.push_back(b + 1);
    }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const std::size_t cell = breaks[i];
    if (cell >= cells) break;
    GridSet ys(cells, {});
    for (const auto& s : steps)
      if (s[0].contains_cell(cell)) ys = ys.united(s[1]);
    if (!ys.is_full()) return false;
  }
  return true;
}

}  // namespace

int covering_time(const DynamicalMap& map, Point center, double radius, double grid_resolution, int n_max,
                  ImageMethod method) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  method = resolve_method(map, method);
  const std::size_t cells = GridSet::cells_for(grid_resolution);
  const int d = map.dimension();

  std::array<ArcSet, 2> arcs;
  std::vector<GridSet> grids;
  for (int a = 0; a < d; ++a) {
    arcs[static_cast<std::size_t>(a)] = ArcSet::ball(center[a], radius);
    grids.push_back(GridSet::from_arcs(arcs[static_cast<std::size_t>(a)], cells));
  }
  GridSet covered(cells, {});
  std::vector<std::array<GridSet, 2>> history;
  for (int N = 0; N <= n_max; ++N) {
    if (method == ImageMethod::exact_image)
      for (int a = 0; a < d; ++a) grids[static_cast<std::size_t>(a)] = GridSet::from_arcs(arcs[static_cast<std::size_t>(a)], cells);
    if (d == 1) {
      covered = covered.united(grids[0]);
      if (covered.is_full()) return N;
    } else {
      history.push_back({grids[0], grids[1]});
      if (product_union_covers(history, cells)) return N;
    }
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      if (method == ImageMethod::exact_image)
        arcs[u] = arcs[u].image(map.factor(a));
      else
        grids[u] = grids[u].image(map.factor(a));
    }
  }
  throw DynamicsError(ErrorKind::not_covered, "no coverage within " + std::to_string(n_max) + " steps");
}

}  // namespace nuspec
