#include "nuspec/closing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "nuspec/errors.hpp"
#include "nuspec/parallel.hpp"

namespace nuspec {

std::string to_string(ClosingMethod method) {
  switch (method) {
    case ClosingMethod::automatic: return "auto";
    case ClosingMethod::exact_enumeration: return "exact-enumeration";
    case ClosingMethod::root_refinement: return "root-refinement";
  }
  return "auto";
}

namespace {

using Word = std::vector<std::uint8_t>;

// log||(Df^ell)^{-1}|| over consecutive blocks of the orbit, i.e. the cocycle of g = f^ell.
std::vector<double> block_log_inv_norms(const DynamicalMap& map, std::span<const Point> pts, std::size_t blocks,
                                        int ell) {
  std::vector<double> out(blocks);
  const auto L = static_cast<std::size_t>(ell);
  for (std::size_t j = 0; j < blocks; ++j) {
    Jacobian P{map.dimension(), 1.0, 0.0, 0.0, 1.0};
    bool critical = false;
    for (std::size_t i = j * L; i < (j + 1) * L; ++i) {
      if (map.is_critical(pts[i])) {
        critical = true;
        break;
      }
      const Jacobian J = map.jacobian(pts[i]);
      P = {P.dim, J.a * P.a + J.b * P.c, J.a * P.b + J.b * P.d, J.c * P.a + J.d * P.c, J.c * P.b + J.d * P.d};
    }
    out[j] = critical ? std::numeric_limits<double>::infinity() : -std::log(P.conorm());
  }
  return out;
}

struct Frame {
  std::size_t lower = 0, upper = 0, extended = 0, s = 0;
};

// Hyperbolic times of f^ell bracketing n, extended to the first time >= stretch * n_i.
Frame hyperbolic_frame(const DynamicalMap& map, const StartPoint& x, std::size_t n, double c, int ell, double stretch) {
  const auto L = static_cast<std::size_t>(ell);
  std::size_t blocks = 2 * (static_cast<std::size_t>(std::ceil(stretch * static_cast<double>(n / L + 1))) + 8);
  const std::size_t max_blocks = 64 * (n / L + 64);
  for (;;) {
    const std::vector<Point> pts = trajectory(map, x, blocks * L);
    const auto times = exact_hyperbolic_times(block_log_inv_norms(map, pts, blocks, ell), c);
    auto it = std::find_if(times.begin(), times.end(), [&](std::size_t t) { return t * L >= n; });
    if (it != times.end()) {
      Frame f;
      f.upper = *it * L;
      f.lower = it == times.begin() ? 0 : *(it - 1) * L;
      const double goal = stretch * static_cast<double>(*it);
      auto ext = std::find_if(it, times.end(), [&](std::size_t t) { return static_cast<double>(t) >= goal * (1.0 - 1e-12); });
      if (ext != times.end()) {
        f.extended = *ext * L;
        f.s = static_cast<std::size_t>(ext - it);
        return f;
      }
    }
    if (blocks >= max_blocks)
      throw DynamicsError(ErrorKind::no_hyperbolic_frame, "no hyperbolic time frame for n = " + std::to_string(n) +
                                                              " within " + std::to_string(blocks * L) + " steps");
    blocks = std::min(max_blocks, 2 * blocks);
  }
}

int uniform_cover(const DynamicalMap& map, double radius, const ClosingContext& ctx) {
  int worst = 0;
  for (std::size_t i = 0; i < ctx.uniform_cover_centers; ++i) {
    const Point p = quasi_random(i);
    worst = std::max(worst, covering_time(map, p, radius, radius / 10.0, ctx.cover_cap));
  }
  return worst;
}

std::size_t least_period(const Word& w) {
  const std::size_t m = w.size();
  for (std::size_t d = 1; d < m; ++d) {
    if (m % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < m && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return d;
  }
  return m;
}

// X + j modulo b^m - 1 on an m-digit big-endian word; the all-(b-1) word is folded to 0.
Word shift_word(const Word& X, long j, int b) {
  Word w = X;
  const std::size_t m = w.size();
  auto add_one_at_end = [&](int sign) {
    // +1 or -1 at the least significant digit with carry/borrow; returns overflow flag.
    for (std::size_t i = m; i-- > 0;) {
      int v = w[i] + sign;
      if (v >= b) {
        w[i] = 0;
      } else if (v < 0) {
        w[i] = static_cast<std::uint8_t>(b - 1);
      } else {
        w[i] = static_cast<std::uint8_t>(v);
        return false;
      }
    }
    return true;
  };
  const int sign = j >= 0 ? 1 : -1;
  for (long k = 0; k < std::labs(j); ++k) {
    // End-around carry: b^m == 1 modulo b^m - 1.
    if (add_one_at_end(sign)) add_one_at_end(sign);
  }
  if (std::all_of(w.begin(), w.end(), [&](std::uint8_t d) { return d == b - 1; })) std::fill(w.begin(), w.end(), 0);
  return w;
}

struct AxisCandidate {
  Word word;
  std::vector<double> dist;  // k = 0..n
};

// Words W of length m whose periodic point stays within radii[k] of x along k = 0..n.
std::vector<AxisCandidate> axis_candidates(const DigitCode& xc, std::span<const std::uint64_t> xwin, std::size_t m,
                                           std::span<const double> radii, const ClosingContext& ctx,
                                           std::size_t& tested) {
  const int b = xc.base();
  const std::size_t n = radii.size() - 1;
  bool small = true;
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= n; ++k) {
    small = small && radii[k] <= 0.5 / b;
    r = std::min(r, radii[k] * std::pow(static_cast<double>(b), -static_cast<double>(k)));
  }
  // Below 1/(2b) no step wraps, so d_k = b^k d_0 and d_0 < min_k radii[k] b^-k is necessary.
  if (!small) r = radii[0];
  const double span = r * std::pow(static_cast<double>(b), static_cast<double>(m)) + 2.0;
  const double modulus = std::pow(static_cast<double>(b), static_cast<double>(m)) - 1.0;
  if (span > static_cast<double>(ctx.max_candidates) && 2.0 * span + 1.0 < modulus)
    throw DynamicsError(ErrorKind::not_found, "enumeration window at period " + std::to_string(m) + " exceeds the candidate cap");
  Word X(m);
  for (std::size_t i = 0; i < m; ++i) X[i] = xc.digit(i);
  std::vector<Word> words;
  if (2.0 * span + 1.0 >= modulus) {
    // Small period: enumerate all residues 0 .. b^m - 2 directly.
    Word w(m, 0);
    for (long k = 0; k < static_cast<long>(modulus); ++k) {
      words.push_back(w);
      w = shift_word(w, 1, b);
    }
  } else {
    const long J = static_cast<long>(std::ceil(span));
    Word w = shift_word(X, -J, b);
    for (long j = -J; j <= J; ++j) {
      words.push_back(w);
      w = shift_word(w, 1, b);
    }
  }
  std::vector<AxisCandidate> out;
  for (const Word& w : words) {
    ++tested;
    const DigitCode pc = DigitCode::periodic(b, w);
    WindowCursor cur(pc);
    AxisCandidate cand{w, std::vector<double>(n + 1)};
    bool inside = true;
    for (std::size_t k = 0; k <= n && inside; ++k) {
      cand.dist[k] = window_distance(b, cur.value(), xwin[k]);
      inside = cand.dist[k] < radii[k];
      if (k < n) cur.advance();
    }
    if (inside) out.push_back(std::move(cand));
  }
  return out;
}

struct Found {
  ClosingResult r;
  double d0 = 0.0;
};

std::optional<Found> exact_at_period(const DynamicalMap& map, const CodedPoint& xc,
                                     const std::vector<std::vector<std::uint64_t>>& xwin, std::size_t m,
                                     std::span<const double> radii, const ClosingContext& ctx, std::size_t& tested) {
  const int d = map.dimension();
  std::vector<std::vector<AxisCandidate>> per_axis;
  for (int a = 0; a < d; ++a) {
    per_axis.push_back(axis_candidates(xc.coords[static_cast<std::size_t>(a)], xwin[static_cast<std::size_t>(a)], m, radii, ctx, tested));
    if (per_axis.back().empty()) return std::nullopt;
  }
  const std::size_t n = radii.size() - 1;
  std::optional<Found> best;
  auto consider = [&](std::vector<const AxisCandidate*> pick) {
    std::vector<double> dist(n + 1, 0.0);
    for (const auto* c : pick)
      for (std::size_t k = 0; k <= n; ++k) dist[k] = std::max(dist[k], c->dist[k]);
    if (best && !(dist[0] < best->d0)) return;  // ascending enumeration keeps the first at ties
    Found f;
    f.d0 = dist[0];
    f.r.shadow_distances = dist;
    std::size_t period = 1;
    for (const auto* c : pick) {
      f.r.words.push_back(c->word);
      period = std::lcm(period, least_period(c->word));
    }
    f.r.period = period;
    f.r.search_period = m;
    best = std::move(f);
  };
  if (d == 1) {
    for (const auto& c : per_axis[0]) consider({&c});
  } else {
    for (const auto& cx : per_axis[0])
      for (const auto& cy : per_axis[1]) consider({&cx, &cy});
  }
  if (best) {
    // Orbit points from the exact codes; the period is exact, so the residual is 0.
    ClosingResult& r = best->r;
    std::vector<DigitCode> codes;
    for (int a = 0; a < d; ++a) codes.push_back(DigitCode::periodic(xc.coords[static_cast<std::size_t>(a)].base(), r.words[static_cast<std::size_t>(a)]));
    for (std::size_t k = 0; k < r.period; ++k) {
      Point p;
      for (int a = 0; a < d; ++a) p[a] = codes[static_cast<std::size_t>(a)].value(k);
      r.orbit.points.push_back(p);
    }
    Point back;
    for (int a = 0; a < d; ++a) back[a] = codes[static_cast<std::size_t>(a)].value(r.period);
    r.periodicity_residual = map.distance(back, r.orbit.points[0]);
    r.periodic_point = r.orbit.points[0];
  }
  return best;
}

// Fixed point of Phi_w = g_{w_0} o ... o g_{w_{m-1}} on [0,1].
double itinerary_fixed_point(const CircleMap& f, const Word& w, double warm) {
  auto phi = [&](double y) {
    for (std::size_t k = w.size(); k-- > 0;) y = f.inverse_branch(w[k], y);
    return y;
  };
  double y = warm;
  for (int i = 0; i < 16; ++i) {
    const double next = phi(y);
    const bool settled = std::fabs(next - y) <= 1e-15;
    y = next;
    if (settled) break;
  }
  // Certify a sign change of Phi(y) - y around y; otherwise bisect the whole circle.
  const double lo = std::max(0.0, y - 1e-12), hi = std::min(1.0, y + 1e-12);
  if (phi(lo) - lo >= 0.0 && phi(hi) - hi <= 0.0) return y;
  double a = 0.0, b = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (a + b);
    (phi(mid) - mid >= 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

struct SmoothOrbit {
  std::vector<double> pts;  // m entries
  double residual = 0.0;
};

constexpr std::size_t kMaxStraddleVariants = 64;

SmoothOrbit orbit_from_word(const CircleMap& f, const Word& w, double p0) {
  const std::size_t m = w.size();
  SmoothOrbit o;
  o.pts.assign(m, 0.0);
  double y = p0;
  for (std::size_t k = m; k-- > 0;) {
    y = f.inverse_branch(w[k], y);
    o.pts[k] = y;
  }
  for (std::size_t k = 0; k < m; ++k) {
    o.pts[k] = wrap_unit(o.pts[k]);
    o.residual = std::max(o.residual, circle_distance(f.evaluate(o.pts[k]), o.pts[(k + 1) % m]));
  }
  return o;
}

std::optional<Found> smooth_at_period(const DynamicalMap& map, std::span<const Point> xo, const Word& itinerary,
                                      std::size_t m, std::span<const double> radii, const ClosingContext& ctx,
                                      std::size_t& tested) {
  const CircleMap& f = map.factor(0);
  const std::size_t n = radii.size() - 1;
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(ctx.max_varied_symbols), m - std::min(m, n));
  const auto B = static_cast<std::size_t>(f.branch_count());
  // Shadowing points may sit across a branch boundary from x_k; such steps get both branches.
  std::vector<std::pair<std::size_t, std::uint8_t>> straddles;
  std::size_t prefix = 1;
  for (std::size_t k = 0; k < std::min(n, m - t); ++k) {
    const auto other = [&](double y) { return static_cast<std::uint8_t>(f.branch_of(wrap_unit(y))); };
    for (const double y : {xo[k].x - radii[k], xo[k].x + radii[k]}) {
      const std::uint8_t b = other(y);
      if (b != itinerary[k] && prefix < kMaxStraddleVariants) {
        straddles.emplace_back(k, b);
        prefix *= 2;
        break;
      }
    }
  }
  std::size_t variants = prefix;
  for (std::size_t i = 0; i < t; ++i) variants *= B;
  std::optional<Found> best;
  for (std::size_t v = 0; v < variants; ++v) {
    ++tested;
    Word w(itinerary.begin(), itinerary.begin() + static_cast<std::ptrdiff_t>(m));
    std::size_t code = v / prefix;
    for (std::size_t i = 0; i < t; ++i) {
      w[m - 1 - i] = static_cast<std::uint8_t>(code % B);
      code /= B;
    }
    for (std::size_t i = 0; i < straddles.size(); ++i)
      if ((v % prefix) >> i & 1) w[straddles[i].first] = straddles[i].second;
    const double p0 = itinerary_fixed_point(f, w, xo[0].x);
    SmoothOrbit o = orbit_from_word(f, w, p0);
    if (o.residual > 1e-9)
      throw DynamicsError(ErrorKind::search_diverged, "root refinement residual " + std::to_string(o.residual) +
                                                          " at period " + std::to_string(m));
    std::vector<double> dist(n + 1);
    bool inside = true;
    for (std::size_t k = 0; k <= n && inside; ++k) {
      dist[k] = circle_distance(o.pts[k % m], xo[k].x);
      inside = dist[k] < radii[k];
    }
    if (!inside || (best && !(dist[0] < best->d0))) continue;
    Found fd;
    fd.d0 = dist[0];
    fd.r.shadow_distances = dist;
    const std::size_t period = least_period(w);
    fd.r.period = period;
    fd.r.search_period = m;
    fd.r.words = {Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(period))};
    for (std::size_t k = 0; k < period; ++k) fd.r.orbit.points.push_back({o.pts[k], 0.0});
    fd.r.periodic_point = fd.r.orbit.points[0];
    fd.r.periodicity_residual = o.residual;
    best = std::move(fd);
  }
  return best;
}

ClosingResult search(MapPtr map, const StartPoint& x, std::size_t n, double epsilon, const std::optional<QProfile>& q,
                     std::optional<double> eta, const TargetRule& target, const ClosingContext& ctx,
                     ClosingMethod method) {
  if (n < 1) throw std::invalid_argument("closing needs n >= 1");
  if (method == ClosingMethod::automatic)
    method = map->exactly_coded() ? ClosingMethod::exact_enumeration : ClosingMethod::root_refinement;
  if (method == ClosingMethod::exact_enumeration && !map->exactly_coded())
    throw std::invalid_argument("exact enumeration needs an affine map with digit coding");
  if (method == ClosingMethod::root_refinement && map->dimension() != 1)
    throw std::invalid_argument("root refinement is implemented for circle maps");

  const std::size_t cap = std::max(target.period_cap, n);
  const std::vector<Point> xo = trajectory(*map, x, cap);
  BallSpec ball{x.point, n, epsilon, q};
  const std::vector<double> radii = ball_radii(*map, ball, xo);

  std::optional<CodedPoint> xc;
  std::vector<std::vector<std::uint64_t>> xwin;
  Word itinerary;
  if (map->exactly_coded()) {
    xc = x.coded(*map, cap + 64);
    for (const DigitCode& dc : xc->coords) {
      std::vector<std::uint64_t> w(n + 1);
      WindowCursor cur(dc);
      for (std::size_t k = 0; k <= n; ++k) {
        w[k] = cur.value();
        if (k < n) cur.advance();
      }
      xwin.push_back(std::move(w));
    }
  }
  if (method == ClosingMethod::root_refinement) {
    itinerary.resize(cap);
    for (std::size_t k = 0; k < cap; ++k)
      itinerary[k] = xc ? xc->coords[0].digit(k) : static_cast<std::uint8_t>(map->factor(0).branch_of(xo[k].x));
  }

  std::size_t tested = 0;
  for (std::size_t m = n; m <= cap; ++m) {
    std::optional<Found> f = method == ClosingMethod::exact_enumeration
                                 ? exact_at_period(*map, *xc, xwin, m, radii, ctx, tested)
                                 : smooth_at_period(*map, xo, itinerary, m, radii, ctx, tested);
    if (!f) continue;
    ClosingResult r = std::move(f->r);
    r.center = x.point;
    r.n = n;
    r.epsilon = epsilon;
    r.eta = eta;
    r.q = q;
    r.overshoot = static_cast<long>(r.period) - static_cast<long>(n);
    r.short_period = r.overshoot < 0;
    r.radii = radii;
    r.target = target;
    r.method = method;
    r.candidates_tested = tested;
    return r;
  }
  throw DynamicsError(ErrorKind::not_found, "no verified periodic point with period <= " + std::to_string(cap));
}

}  // namespace

TargetRule uniform_target(MapPtr map, const StartPoint& x, std::size_t n, double epsilon, const ClosingContext& ctx) {
  const Frame f = hyperbolic_frame(*map, x, n, ctx.c, ctx.ell, 1.0);
  TargetRule t;
  t.lower = f.lower;
  t.upper = f.upper;
  t.extended = f.upper;
  t.cover_radius = power_ball_modulus(*map, epsilon, ctx.ell);
  t.cover_offset = covering_time(*map, x.point, t.cover_radius, t.cover_radius / 10.0, ctx.cover_cap);
  if (ctx.uniform_cover_centers) t.cover_offset_uniform = uniform_cover(*map, t.cover_radius, ctx);
  t.period_cap = t.extended + static_cast<std::size_t>(t.cover_offset);
  return t;
}

TargetRule nonuniform_target(MapPtr map, const StartPoint& x, std::size_t n, double epsilon, const QProfile& q,
                             double eta, const ClosingContext& ctx) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  TargetRule t;
  t.stretch = (ctx.c + eta) / ctx.c;
  const Frame f = hyperbolic_frame(*map, x, n, ctx.c, ctx.ell, t.stretch);
  t.lower = f.lower;
  t.upper = f.upper;
  t.extended = f.extended;
  t.s = f.s;
  const double qx = q(*map, x.point);
  t.cover_radius = epsilon / (qx * qx);
  t.cover_offset = covering_time(*map, x.point, t.cover_radius, t.cover_radius / 10.0, ctx.cover_cap);
  if (ctx.uniform_cover_centers) t.cover_offset_uniform = uniform_cover(*map, t.cover_radius, ctx);
  t.period_cap = t.extended + static_cast<std::size_t>(t.cover_offset);
  return t;
}

ClosingResult find_periodic_in_ball(MapPtr map, const StartPoint& x, std::size_t n, double epsilon,
                                    const ClosingContext& ctx, ClosingMethod method) {
  const TargetRule t = uniform_target(map, x, n, epsilon, ctx);
  return search(map, x, n, epsilon, std::nullopt, std::nullopt, t, ctx, method);
}

ClosingResult find_periodic_nonuniform(MapPtr map, const StartPoint& x, std::size_t n, double epsilon,
                                       const QProfile& q, double eta, const ClosingContext& ctx,
                                       ClosingMethod method) {
  const OrbitRecord seg = compute_orbit(map, x, std::max<std::size_t>(n, 1));
  if (!slowly_varying_check(q, seg, eta))
    throw std::invalid_argument("q profile " + q.id() + " is not eta-slowly varying along the segment");
  const TargetRule t = nonuniform_target(map, x, n, epsilon, q, eta, ctx);
  return search(map, x, n, epsilon, q, eta, t, ctx, method);
}

SpecificationVerdict specification_sweep(MapPtr map, std::span<const StartPoint> sample,
                                         std::span<const std::size_t> n_ladder, std::span<const double> eta_ladder,
                                         double epsilon, const ClosingContext& ctx, unsigned threads,
                                         QFamily family) {
  if (n_ladder.size() < 5) throw std::invalid_argument("specification sweep needs at least 5 n values");
  if (eta_ladder.size() < 3) throw std::invalid_argument("specification sweep needs at least 3 eta values");
  if (sample.empty()) throw std::invalid_argument("specification sweep needs at least one center");
  SpecificationVerdict v;
  v.etas.assign(eta_ladder.begin(), eta_ladder.end());
  v.ns.assign(n_ladder.begin(), n_ladder.end());
  for (std::size_t c = 0; c < sample.size(); ++c)
    for (std::size_t n : n_ladder)
      for (double eta : eta_ladder) v.trials.push_back({c, n, eta, std::nullopt, {}});

  parallel_for(v.trials.size(), threads, [&](std::size_t i) {
    SweepTrial& t = v.trials[i];
    QProfile q = QProfile::exponential(t.eta);
    if (family == QFamily::truncated_distance_power) q = QProfile::truncated_distance_power(t.eta, ctx.delta);
    if (family == QFamily::constant) q = QProfile::constant(1.0);
    try {
      t.result = find_periodic_nonuniform(map, sample[t.center_index], t.n, epsilon, q, t.eta, ctx);
    } catch (const DynamicsError& e) {
      t.gap_reason = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::invalid_argument& e) {
      t.gap_reason = std::string("Precondition: ") + e.what();
    }
  });

  v.curves.assign(v.etas.size(), {});
  for (std::size_t e = 0; e < v.etas.size(); ++e) {
    for (std::size_t n : v.ns) {
      CurvePoint cp;
      cp.n = n;
      cp.max_ratio = std::numeric_limits<double>::quiet_NaN();
      for (const SweepTrial& t : v.trials) {
        if (t.n != n || t.eta != v.etas[e]) continue;
        if (!t.result) {
          ++cp.gaps;
          continue;
        }
        if (t.result->short_period) {
          ++cp.flagged;
          continue;
        }
        ++cp.found;
        const double ratio = static_cast<double>(t.result->overshoot) / static_cast<double>(n);
        if (std::isnan(cp.max_ratio) || ratio > cp.max_ratio) cp.max_ratio = ratio;
      }
      v.curves[e].push_back(cp);
    }
    v.limit_estimates.push_back(v.curves[e].back().max_ratio);
  }
  return v;
}

double periodic_measure_discrepancy(const DynamicalMap& map, std::span<const PeriodicOrbit> orbits,
                                    std::span<const Observable> observables) {
  std::size_t count = 0;
  for (const auto& o : orbits) count += o.points.size();
  if (count == 0) throw std::invalid_argument("no periodic points to average");
  double worst = 0.0;
  for (const Observable& obs : observables) {
    const double ref = reference_integral(map, obs);
    long double sum = 0.0L;
    for (const auto& o : orbits)
      for (const Point& p : o.points) sum += obs.f(p);
    worst = std::max(worst, std::fabs(static_cast<double>(sum / static_cast<long double>(count)) - ref));
  }
  return worst;
}

double periodic_measure_discrepancy(const DynamicalMap& map, std::span<const ClosingResult> results,
                                    std::span<const Observable> observables) {
  std::vector<PeriodicOrbit> orbits;
  orbits.reserve(results.size());
  for (const auto& r : results) orbits.push_back(r.orbit);
  return periodic_measure_discrepancy(map, orbits, observables);
}

namespace {

// Word of length P packed base b into an integer, most significant digit first.
std::uint64_t rotate_left(std::uint64_t w, std::uint64_t b, std::uint64_t top) {
  const std::uint64_t lead = w / top;
  return (w - lead * top) * b + lead;
}

}  // namespace

std::vector<PeriodicOrbit> harvest_periodic_orbits(MapPtr map, const StartPoint& x, std::size_t period,
                                                   std::size_t positions) {
  if (period < 1) throw std::invalid_argument("period must be positive");
  const int d = map->dimension();
  std::vector<std::uint64_t> bases;
  for (int a = 0; a < d; ++a) bases.push_back(static_cast<std::uint64_t>(map->factor(a).branch_count()));
  std::vector<std::uint64_t> tops, spans;
  long double capacity = 1.0L;
  for (std::uint64_t b : bases) {
    std::uint64_t top = 1;
    for (std::size_t i = 1; i < period; ++i) top *= b;
    tops.push_back(top);
    spans.push_back(top * b);
    capacity *= static_cast<long double>(top) * b;
  }
  if (capacity > 0x1p62L) throw std::invalid_argument("period too long for packed itinerary words");

  // Itinerary digits along the orbit: exact digits for coded maps, branches otherwise.
  const std::size_t steps = positions + period;
  std::vector<std::vector<std::uint8_t>> digits(static_cast<std::size_t>(d), std::vector<std::uint8_t>(steps));
  if (map->exactly_coded()) {
    const CodedPoint code = x.coded(*map, steps);
    for (int a = 0; a < d; ++a)
      for (std::size_t k = 0; k < steps; ++k) digits[static_cast<std::size_t>(a)][k] = code.coords[static_cast<std::size_t>(a)].digit(k);
  } else {
    const std::vector<Point> pts = trajectory(*map, x, steps);
    for (int a = 0; a < d; ++a)
      for (std::size_t k = 0; k < steps; ++k)
        digits[static_cast<std::size_t>(a)][k] = static_cast<std::uint8_t>(map->factor(a).branch_of(pts[k][a]));
  }

  // Distinct window keys; key = w_0 * span_1 + w_1.
  std::vector<std::uint64_t> win(static_cast<std::size_t>(d), 0);
  for (int a = 0; a < d; ++a)
    for (std::size_t i = 0; i < period; ++i) win[static_cast<std::size_t>(a)] = win[static_cast<std::size_t>(a)] * bases[static_cast<std::size_t>(a)] + digits[static_cast<std::size_t>(a)][i];
  auto key_of = [&](const std::vector<std::uint64_t>& w) { return d == 1 ? w[0] : w[0] * spans[1] + w[1]; };
  const bool dense = capacity <= 0x1p28L;
  std::vector<bool> seen_dense;
  std::unordered_set<std::uint64_t> seen_sparse;
  std::vector<std::uint64_t> keys;
  if (dense) seen_dense.assign(static_cast<std::size_t>(capacity), false);
  for (std::size_t s = 0; s < positions; ++s) {
    const std::uint64_t key = key_of(win);
    if (dense) {
      if (!seen_dense[key]) {
        seen_dense[key] = true;
        keys.push_back(key);
      }
    } else if (seen_sparse.insert(key).second) {
      keys.push_back(key);
    }
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      win[u] = (win[u] % tops[u]) * bases[u] + digits[u][s + period];
    }
  }
  std::sort(keys.begin(), keys.end());

  // Group harvested words into shift orbits; each orbit contributes its least-period points.
  std::unordered_set<std::uint64_t> done;
  std::vector<PeriodicOrbit> out;
  for (std::uint64_t key : keys) {
    if (done.count(key)) continue;
    std::vector<std::uint64_t> w(static_cast<std::size_t>(d));
    w[0] = d == 1 ? key : key / spans[1];
    if (d == 2) w[1] = key % spans[1];
    std::vector<std::uint64_t> cycle;
    std::uint64_t k = key;
    do {
      cycle.push_back(k);
      done.insert(k);
      for (int a = 0; a < d; ++a) {
        const auto u = static_cast<std::size_t>(a);
        w[u] = rotate_left(w[u], bases[u], tops[u]);
      }
      k = key_of(w);
    } while (k != key);
    PeriodicOrbit orbit;
    for (std::uint64_t ck : cycle) {
      Point p;
      for (int a = 0; a < d; ++a) {
        const auto u = static_cast<std::size_t>(a);
        const std::uint64_t wa = d == 1 ? ck : (a == 0 ? ck / spans[1] : ck % spans[1]);
        if (map->exactly_coded()) {
          // Purely periodic base-b expansion: value = W / (b^P - 1), with b^P - 1 ~ 1.
          p[a] = wrap_unit(static_cast<double>(wa) / (static_cast<double>(spans[u]) - 1.0));
        } else {
          Word word(period);
          std::uint64_t t = wa;
          for (std::size_t i = period; i-- > 0;) {
            word[i] = static_cast<std::uint8_t>(t % bases[u]);
            t /= bases[u];
          }
          p[a] = wrap_unit(itinerary_fixed_point(map->factor(a), word, 0.5));
        }
      }
      orbit.points.push_back(p);
    }
    out.push_back(std::move(orbit));
  }
  return out;
}

}  // namespace nuspec
