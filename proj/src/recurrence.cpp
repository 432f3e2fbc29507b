#include "nuspec/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nuspec/arcs.hpp"
#include "nuspec/errors.hpp"
#include "nuspec/parallel.hpp"

namespace nuspec {

namespace {

int exact_tau(const DynamicalMap& map, const StartPoint& center, double radius, int n_max) {
  const int d = map.dimension();
  const CodedPoint code = center.coded(map, static_cast<std::size_t>(n_max) + 1);
  std::vector<WindowCursor> cursors;
  std::vector<std::uint64_t> origin;
  for (const DigitCode& c : code.coords) {
    cursors.emplace_back(c);
    origin.push_back(cursors.back().value());
  }
  std::vector<double> half(static_cast<std::size_t>(d), radius);
  for (int n = 1; n <= n_max; ++n) {
    bool meets = true;
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      const int b = code.coords[u].base();
      cursors[u].advance();
      half[u] *= b;
      // f^n(B) on this axis is the arc of half-length r b^n around f^n(x).
      if (half[u] >= 0.5) continue;
      meets = meets && window_distance(b, cursors[u].value(), origin[u]) < radius + half[u];
    }
    if (meets) return n;
  }
  throw DynamicsError(ErrorKind::no_return, "no return within " + std::to_string(n_max) + " steps");
}

int grid_tau(const DynamicalMap& map, Point center, double radius, int n_max, double resolution) {
  const int d = map.dimension();
  const std::size_t cells = GridSet::cells_for(resolution);
  std::vector<GridSet> ball, image;
  for (int a = 0; a < d; ++a) {
    ball.push_back(GridSet::from_arcs(ArcSet::ball(center[a], radius), cells));
    image.push_back(ball.back());
  }
  for (int n = 1; n <= n_max; ++n) {
    bool meets = true;
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      image[u] = image[u].image(map.factor(a));
      meets = meets && image[u].intersects(ball[u]);
    }
    if (meets) return n;
  }
  throw DynamicsError(ErrorKind::no_return, "no return within " + std::to_string(n_max) + " steps");
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

RecurrenceSample tau_ball(const DynamicalMap& map, const StartPoint& center, double radius, int n_max,
                          ImageMethod method, double grid_resolution) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  method = resolve_method(map, method);
  if (method == ImageMethod::exact_image && !map.exactly_coded())
    throw std::invalid_argument("exact images need an affine map with digit coding");
  RecurrenceSample s;
  s.center = center.point;
  s.radius = radius;
  s.method = method;
  s.n_max = n_max;
  s.tau = method == ImageMethod::exact_image
              ? exact_tau(map, center, radius, n_max)
              : grid_tau(map, center.point, radius, n_max, grid_resolution > 0.0 ? grid_resolution : radius / 128.0);
  return s;
}

int full_cover_bound(const DynamicalMap& map, double radius) {
  double b = std::numeric_limits<double>::infinity();
  for (int a = 0; a < map.dimension(); ++a) {
    const auto base = map.factor(a).digit_base();
    if (!base) throw std::invalid_argument("full-cover bound needs affine factors");
    b = std::min(b, static_cast<double>(*base));
  }
  int n = 0;
  for (double len = 2.0 * radius; len < 1.0; len *= b) ++n;
  return n;
}

ExponentFit recurrence_exponent(const DynamicalMap& map, std::span<const StartPoint> centers,
                                std::span<const double> radius_ladder, int n_max, unsigned threads,
                                ImageMethod method) {
  if (centers.size() < 10) throw std::invalid_argument("recurrence fit needs at least 10 centers");
  if (radius_ladder.empty()) throw std::invalid_argument("radius ladder is empty");
  const auto [lo, hi] = std::minmax_element(radius_ladder.begin(), radius_ladder.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12))
    throw std::invalid_argument("radius ladder must span at least 2 decades");

  const std::size_t R = radius_ladder.size();
  ExponentFit fit;
  fit.samples.resize(centers.size() * R);
  parallel_for(fit.samples.size(), threads, [&](std::size_t i) {
    const StartPoint& x = centers[i / R];
    const double r = radius_ladder[i % R];
    try {
      fit.samples[i] = tau_ball(map, x, r, n_max, method);
    } catch (const DynamicsError& e) {
      if (e.kind() != ErrorKind::no_return) throw;
      fit.samples[i] = {x.point, r, n_max, true, resolve_method(map, method), n_max};
    }
  });

  std::vector<double> slopes;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    CenterFit cf;
    cf.center_index = c;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < R; ++j) {
      const RecurrenceSample& s = fit.samples[c * R + j];
      if (s.censored) {
        ++cf.censored;
        continue;
      }
      const double xv = -std::log(s.radius), yv = s.tau;
      sx += xv;
      sy += yv;
      sxx += xv * xv;
      sxy += xv * yv;
      ++cf.used;
    }
    for (std::size_t j = 0; j < R; ++j)
      for (std::size_t k = 0; k < R; ++k) {
        const RecurrenceSample& a = fit.samples[c * R + j];
        const RecurrenceSample& b = fit.samples[c * R + k];
        if (a.radius < b.radius && !a.censored && a.tau < b.tau) cf.monotone = false;
      }
    const double nu = static_cast<double>(cf.used);
    const double den = nu * sxx - sx * sx;
    if (cf.used >= 2 && den > 0.0) {
      cf.slope = (nu * sxy - sx * sy) / den;
      cf.intercept = (sy - cf.slope * sx) / nu;
      slopes.push_back(cf.slope);
    } else {
      cf.slope = std::numeric_limits<double>::quiet_NaN();
    }
    const double frac = static_cast<double>(cf.censored) / static_cast<double>(R);
    fit.worst_censored_fraction = std::max(fit.worst_censored_fraction, frac);
    fit.centers.push_back(cf);
  }
  fit.censoring_exceeded = fit.worst_censored_fraction > 0.2;
  fit.slope = median(slopes);

  if (const auto& ex = map.reference().exponents) {
    const auto [lmin, lmax] = std::minmax_element(ex->begin(), ex->end());
    fit.upper_bound = 1.0 / *lmin;
    fit.lower_bound = 1.0 / *lmax;
    if (ex->size() == 2) fit.torus_value = 2.0 / ((*ex)[0] + (*ex)[1]);
    fit.below_upper = fit.slope <= *fit.upper_bound * 1.05;
    fit.above_lower = fit.slope >= *fit.lower_bound;
  }
  fit.assumption = "lower bound assumes positive entropy of the reference measure (not verified)";
  return fit;
}

}  // namespace nuspec
