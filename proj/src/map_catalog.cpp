#include "nuspec/map_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "nuspec/errors.hpp"

namespace nuspec {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::critical_point: return "CriticalPoint";
    case ErrorKind::too_few_times: return "TooFewTimes";
    case ErrorKind::no_hyperbolic_times: return "NoHyperbolicTimes";
    case ErrorKind::no_such_power: return "NoSuchPower";
    case ErrorKind::branch_ambiguity: return "BranchAmbiguity";
    case ErrorKind::not_covered: return "NotCoveredBy";
    case ErrorKind::not_found: return "NotFound";
    case ErrorKind::search_diverged: return "SearchDiverged";
    case ErrorKind::no_hyperbolic_frame: return "NoHyperbolicFrame";
    case ErrorKind::unknown_reference: return "UnknownReference";
    case ErrorKind::no_return: return "NoReturnBy";
  }
  return "Unknown";
}

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::lebesgue: return "lebesgue";
    case MeasureKind::chebyshev_arcsine: return "chebyshev-arcsine";
    case MeasureKind::acip_empirical: return "acip-empirical";
  }
  return "unknown";
}

int LinearCircleMap::branch_of(double x) const {
  return std::clamp(static_cast<int>(x * base_), 0, base_ - 1);
}

double ChebyshevMap::inverse_branch(int branch, double y) const {
  y = std::clamp(y, 0.0, 1.0);
  const double s = std::sqrt(1.0 - y);
  // Branch 0 avoids cancellation in 1 - sqrt(1 - y) for small y.
  return branch == 0 ? y / (2.0 * (1.0 + s)) : 0.5 * (1.0 + s);
}

std::optional<double> ChebyshevMap::pull_back_offset(double x, double off) const {
  const double a = 1.0 - 2.0 * x;
  if (std::fabs(a) <= 2.0 * kCriticalTolerance) return std::nullopt;
  const double fx = lift(x);
  // The target value must stay inside [0,1]; crossing 0 or 1 is a fold.
  if (fx + off < 0.0 || fx + off > 1.0) return std::nullopt;
  const double disc = a * a - off;
  if (disc < 0.0) return std::nullopt;
  // Small root of 4 t (a - t) = off, written without cancellation.
  const double t = (0.5 * off) / (a + std::copysign(std::sqrt(disc), a));
  const double u = x + t;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  if ((x < 0.5) != (u <= 0.5) && u != 0.5) return std::nullopt;
  return t;
}

namespace {

// Root of an increasing convex g on [lo, hi] with g(lo) <= 0 <= g(hi).
// Newton from the right endpoint decreases monotonically onto the root.
template <class G, class DG>
double convex_root(G g, DG dg, double lo, double hi) {
  double x = hi;
  for (int i = 0; i < 200; ++i) {
    const double step = g(x) / dg(x);
    double next = x - step;
    if (next < lo) next = lo;
    if (!(next < x)) break;
    x = next;
  }
  return x;
}

}  // namespace

MannevillePomeauMap::MannevillePomeauMap(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  split_ = convex_root([&](double x) { return lift(x) - 1.0; }, [&](double x) { return derivative(x); }, 0.0, 1.0);
}

double MannevillePomeauMap::inverse_branch(int branch, double y) const {
  y = std::clamp(y, 0.0, 1.0);
  if (branch == 0) {
    if (y == 0.0) return 0.0;
    return convex_root([&](double x) { return lift(x) - y; }, [&](double x) { return derivative(x); }, 0.0, split_);
  }
  const double target = 1.0 + y;
  return convex_root([&](double x) { return lift(x) - target; }, [&](double x) { return derivative(x); }, split_, 1.0);
}

std::optional<double> MannevillePomeauMap::pull_back_offset(double x, double off) const {
  if (!(std::fabs(off) < 1.0)) return std::nullopt;
  const double p = 1.0 + alpha_;
  // D(t) = F(x + t) - F(x) with F(u + 1) = F(u) + 2, evaluated without cancellation.
  auto diff = [&](double t) {
    const double u = x + t;
    if (u < 0.0) return t + std::expm1(p * std::log1p(u)) - std::pow(x, p);
    if (u > 1.0) return t + std::pow(u - 1.0, p) - std::expm1(p * std::log1p(x - 1.0));
    if (x == 0.0) return t + std::pow(u, p);
    return t + std::pow(x, p) * std::expm1(p * std::log1p(t / x));
  };
  if (off == 0.0) return 0.0;
  // F' lies in [1, L], so |t| lies in [|off| / L, |off|].
  double lo = off > 0.0 ? off / lipschitz() : off;
  double hi = off > 0.0 ? off : off / lipschitz();
  for (int i = 0; i < 200 && hi - lo > 1e-17 * std::fabs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (diff(mid) < off ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DynamicalMap::DynamicalMap(std::string id, std::vector<std::shared_ptr<const CircleMap>> factors,
                           CriticalSetSpec critical, ReferenceMeasure reference, double lipschitz_bound)
    : id_(std::move(id)),
      factors_(std::move(factors)),
      critical_(std::move(critical)),
      reference_(std::move(reference)),
      lipschitz_(lipschitz_bound) {
  if (factors_.empty() || factors_.size() > 2) throw std::invalid_argument("dimension must be 1 or 2");
}

Point DynamicalMap::evaluate(Point p) const {
  Point out;
  for (int i = 0; i < dimension(); ++i) out[i] = factor(i).evaluate(p[i]);
  return out;
}

Jacobian DynamicalMap::jacobian(Point p) const {
  if (dimension() == 1) return {1, factor(0).derivative(p.x), 0.0, 0.0, 0.0};
  return {2, factor(0).derivative(p.x), 0.0, 0.0, factor(1).derivative(p.y)};
}

bool DynamicalMap::exactly_coded() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f->digit_base().has_value(); });
}

double DynamicalMap::critical_distance(Point p) const {
  double best = std::numeric_limits<double>::infinity();
  for (double c : critical_.points) best = std::min(best, circle_distance(p.x, c));
  return best;
}

std::vector<std::string> catalog_ids() {
  return {"doubling", "tripling", "chebyshev", "manneville-pomeau", "diag23"};
}

MapPtr make_map(std::string_view id, double mp_alpha) {
  using std::numbers::ln2;
  const double ln3 = std::log(3.0);
  auto lebesgue = [](std::optional<std::vector<double>> ex) {
    return ReferenceMeasure{MeasureKind::lebesgue, [](Point) { return 1.0; }, std::move(ex)};
  };
  if (id == "doubling")
    return std::make_shared<DynamicalMap>("doubling", std::vector<std::shared_ptr<const CircleMap>>{std::make_shared<LinearCircleMap>(2)},
                                          CriticalSetSpec{}, lebesgue(std::vector<double>{ln2}), 2.0);
  if (id == "tripling")
    return std::make_shared<DynamicalMap>("tripling", std::vector<std::shared_ptr<const CircleMap>>{std::make_shared<LinearCircleMap>(3)},
                                          CriticalSetSpec{}, lebesgue(std::vector<double>{ln3}), 3.0);
  if (id == "chebyshev") {
    ReferenceMeasure arcsine{MeasureKind::chebyshev_arcsine,
                             [](Point p) { return 1.0 / (std::numbers::pi * std::sqrt(p.x * (1.0 - p.x))); },
                             std::vector<double>{ln2}};
    return std::make_shared<DynamicalMap>("chebyshev", std::vector<std::shared_ptr<const CircleMap>>{std::make_shared<ChebyshevMap>()},
                                          CriticalSetSpec{{0.5}, 1.0, 8.0, 8.0}, std::move(arcsine), 4.0);
  }
  if (id == "manneville-pomeau") {
    auto f = std::make_shared<MannevillePomeauMap>(mp_alpha);
    const double lip = f->lipschitz();
    return std::make_shared<DynamicalMap>("manneville-pomeau", std::vector<std::shared_ptr<const CircleMap>>{f},
                                          CriticalSetSpec{}, ReferenceMeasure{MeasureKind::acip_empirical, {}, std::nullopt}, lip);
  }
  if (id == "diag23")
    return std::make_shared<DynamicalMap>(
        "diag23",
        std::vector<std::shared_ptr<const CircleMap>>{std::make_shared<LinearCircleMap>(2), std::make_shared<LinearCircleMap>(3)},
        CriticalSetSpec{}, lebesgue(std::vector<double>{ln2, ln3}), 3.0);
  throw std::invalid_argument("unknown map id '" + std::string(id) + "'");
}

Point evaluate(const DynamicalMap& map, Point x) { return map.evaluate(x); }

double log_inverse_norm(const DynamicalMap& map, Point x) {
  if (map.is_critical(x)) return std::numeric_limits<double>::infinity();
  return -std::log(map.jacobian(x).conorm());
}

double truncated_critical_distance(const DynamicalMap& map, Point x, double delta) {
  const double d = map.critical_distance(x);
  return d < delta ? d : 1.0;
}

bool NondegeneracyReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.passed; });
}

NondegeneracyReport check_nondegenerate_critical(const DynamicalMap& map, std::size_t sample_count) {
  return check_nondegenerate_critical(map, map.critical_set(), map.lipschitz_bound(), sample_count);
}

NondegeneracyReport check_nondegenerate_critical(const DynamicalMap& map, const CriticalSetSpec& k,
                                                 double lipschitz_bound, std::size_t sample_count) {
  NondegeneracyReport report;
  if (map.critical_set().points.empty()) {
    report.vacuous = true;
    return report;
  }
  // Boundary cases are equalities (|f'| = 8 dist for Chebyshev), so compare with relative slack.
  constexpr double slack = 1e-12;
  auto record = [&](ConditionResult& r, double lhs, double rhs, Point at) {
    ++r.checked;
    const double margin = lhs > 0.0 ? rhs / lhs - 1.0 : std::numeric_limits<double>::infinity();
    if (r.checked == 1 || margin < r.worst_margin) r.worst_margin = margin;
    if (lhs > rhs * (1.0 + slack) && r.passed) {
      r.passed = false;
      r.witness = at;
    }
  };
  const bool two_d = map.dimension() == 2;
  for (std::size_t i = 0; i < sample_count; ++i) {
    Point x = two_d ? quasi_random(i) : Point{golden_sequence(i), 0.0};
    if (map.is_critical(x)) continue;
    const double d = map.critical_distance(x);
    const double dbeta = std::pow(d, k.beta);
    const Jacobian J = map.jacobian(x);
    const auto sv = J.singular_values();
    // (1) both sides of the stretch bound
    record(report.conditions[0], dbeta / k.bound_B, sv[1], x);
    record(report.conditions[0], sv[0], k.bound_B / dbeta, x);
    // (2) log-Lipschitz control of the inverse norm on the half-distance ball
    const double s = 2.0 * golden_sequence(i + 7919) - 1.0;
    Point y = x;
    y.x = wrap_unit(x.x + s * 0.5 * d * (1.0 - 1e-9));
    if (two_d) y.y = wrap_unit(x.y + (2.0 * golden_sequence(i + 104729) - 1.0) * 0.5 * d * (1.0 - 1e-9));
    if (!map.is_critical(y)) {
      const double lhs = std::fabs(log_inverse_norm(map, x) - log_inverse_norm(map, y));
      record(report.conditions[1], lhs, k.bound_B / dbeta * map.distance(x, y), x);
    }
    // (3) determinant bound
    record(report.conditions[2], std::fabs(J.det()), k.bound_K * dbeta, x);
    // (4) global derivative bound
    record(report.conditions[3], sv[0], lipschitz_bound, x);
  }
  return report;
}

std::vector<Observable> observable_library(PhaseSpace space) {
  constexpr double tau = 2.0 * std::numbers::pi;
  if (space == PhaseSpace::circle)
    return {{"cos2pix", [](Point p) { return std::cos(tau * p.x); }},
            {"sin2pix", [](Point p) { return std::sin(tau * p.x); }},
            {"x(1-x)", [](Point p) { return p.x * (1.0 - p.x); }}};
  return {{"cos2pi(x+y)", [](Point p) { return std::cos(tau * (p.x + p.y)); }},
          {"sin2pi(x-y)", [](Point p) { return std::sin(tau * (p.x - p.y)); }},
          {"x(1-x)y(1-y)", [](Point p) { return p.x * (1.0 - p.x) * p.y * (1.0 - p.y); }}};
}

namespace {

double simpson(const std::function<double(double)>& g, int intervals) {
  const double h = 1.0 / intervals;
  double sum = g(0.0) + g(1.0);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return sum * h / 3.0;
}

double acip_integral(const DynamicalMap& map, const Observable& obs) {
  static std::mutex mu;
  static std::map<std::string, double> cache;
  const auto* mp = dynamic_cast<const MannevillePomeauMap*>(&map.factor(0));
  char key_alpha[32];
  std::snprintf(key_alpha, sizeof key_alpha, "%.17g", mp ? mp->alpha() : 0.0);
  const std::string key = map.id() + "|" + key_alpha + "|" + obs.name;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  constexpr std::size_t burn_in = 10'000;
  constexpr std::size_t length = 4'000'000;
  Rng rng(0x5EED'ACE1ULL);
  Point p{uniform01(rng), uniform01(rng)};
  for (std::size_t i = 0; i < burn_in; ++i) p = map.evaluate(p);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < length; ++i) {
    sum += obs.f(p);
    p = map.evaluate(p);
  }
  const double value = static_cast<double>(sum / length);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, value);
  return value;
}

}  // namespace

double reference_integral(const DynamicalMap& map, const Observable& obs) {
  const ReferenceMeasure& ref = map.reference();
  switch (ref.kind) {
    case MeasureKind::acip_empirical:
      return acip_integral(map, obs);
    case MeasureKind::chebyshev_arcsine:
      // x = sin^2(pi u / 2) pushes Lebesgue on u to the arcsine law.
      return simpson([&](double u) { return obs.f({0.5 * (1.0 - std::cos(std::numbers::pi * u)), 0.0}); }, 1 << 14);
    case MeasureKind::lebesgue:
      if (!ref.density) break;
      if (map.dimension() == 1) return simpson([&](double x) { return ref.density({x, 0.0}) * obs.f({x, 0.0}); }, 1 << 14);
      return simpson([&](double x) {
        return simpson([&](double y) { return ref.density({x, y}) * obs.f({x, y}); }, 512);
      }, 512);
  }
  throw DynamicsError(ErrorKind::unknown_reference, "no reference measure available for map '" + map.id() + "'");
}

}  // namespace nuspec
