#include "nuspec/hyperbolic_times.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "nuspec/errors.hpp"

namespace nuspec {

namespace {

void require_no_nan(std::span<const double> a) {
  for (double v : a)
    if (std::isnan(v)) throw std::invalid_argument("log_inv_norms contains NaN");
}

}  // namespace

std::vector<std::size_t> exact_hyperbolic_times(std::span<const double> a, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  require_no_nan(a);
  // A critical summand (+inf) makes every later backward sum through it fail, as it should.
  const long double rate = 2.0L * c - kHyperbolicSlack;
  std::vector<std::size_t> out;
  long double s = 0.0L;
  long double running_min = 0.0L;  // min_{k<n} T_k, T_0 = 0
  for (std::size_t n = 1; n <= a.size(); ++n) {
    s += a[n - 1];
    const long double t = s + rate * static_cast<long double>(n);
    if (t <= running_min) out.push_back(n);
    running_min = std::min(running_min, t);
  }
  return out;
}

std::vector<std::size_t> exact_hyperbolic_times(const OrbitRecord& record, double c) {
  return exact_hyperbolic_times(std::span<const double>(record.log_inv_norms), c);
}

std::vector<std::size_t> brute_force_hyperbolic_times(std::span<const double> a, double c) {
  const long double rate = 2.0L * c - kHyperbolicSlack;
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    bool ok = true;
    long double sum = 0.0L;
    for (std::size_t k = n; k-- > 0 && ok;) {
      sum += a[k];
      ok = sum <= -rate * static_cast<long double>(n - k);
    }
    if (ok) out.push_back(n);
  }
  return out;
}

PlissResult pliss_times(std::span<const double> a, double c1, double c2, double lower_bound) {
  if (!(c1 < c2)) throw std::invalid_argument("pliss_times requires c1 < c2");
  for (double v : a) {
    if (!std::isfinite(v)) throw std::invalid_argument("pliss_times requires finite values");
    if (v < lower_bound) throw std::invalid_argument("lower_bound exceeds min of the sequence");
  }
  PlissResult r;
  const long double rate = static_cast<long double>(c1) - kHyperbolicSlack;
  long double s = 0.0L;
  long double running_max = 0.0L;  // max_{k<n} U_k with U_k = S_k - rate k
  r.sup = a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  for (std::size_t n = 1; n <= a.size(); ++n) {
    s += a[n - 1];
    const long double u = s - rate * static_cast<long double>(n);
    if (u >= running_max) r.indices.push_back(n);
    running_max = std::max(running_max, u);
  }
  if (!a.empty()) {
    r.density = static_cast<double>(r.indices.size()) / static_cast<double>(a.size());
    r.average = static_cast<double>(s / static_cast<long double>(a.size()));
  }
  r.bound_applies = !a.empty() && r.average >= c2;
  r.density_bound = r.sup > c1 ? (c2 - c1) / (r.sup - c1) : 1.0;
  return r;
}

double hyperbolic_frequency(std::span<const std::size_t> indices, std::size_t N) {
  return N ? static_cast<double>(indices.size()) / static_cast<double>(N) : 0.0;
}

std::vector<ConcatenationViolation> concatenation_check(std::span<const double> a, double c,
                                                        std::span<const std::size_t> indices,
                                                        std::size_t max_bases) {
  std::vector<ConcatenationViolation> out;
  if (indices.empty()) return out;
  std::vector<bool> member(a.size() + 1, false);
  for (std::size_t n : indices)
    if (n <= a.size()) member[n] = true;
  const std::size_t bases = std::min(max_bases, indices.size());
  for (std::size_t b = 0; b < bases; ++b) {
    const std::size_t pick = bases == 1 ? 0 : b * (indices.size() - 1) / (bases - 1);
    const std::size_t m = indices[pick];
    if (m >= a.size()) continue;
    for (std::size_t n : exact_hyperbolic_times(a.subspan(m), c))
      if (!member[m + n]) out.push_back({m, n, m + n});
  }
  return out;
}

double Gamma::operator()(double t) const { return kind == Kind::identity ? t : std::pow(t, p); }

std::string Gamma::id() const {
  if (kind == Kind::identity) return "identity";
  char buf[48];
  std::snprintf(buf, sizeof buf, "power:%.17g", p);
  return buf;
}

Gamma Gamma::parse(const std::string& text) {
  if (text == "identity") return {};
  if (text.rfind("power:", 0) == 0) {
    std::size_t used = 0;
    const std::string tail = text.substr(6);
    double p = 0.0;
    try {
      p = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == tail.size() && used > 0 && p > 0.0) return {Kind::power, p};
  }
  throw std::invalid_argument("gamma must be 'identity' or 'power:p' with p > 0, got '" + text + "'");
}

GapReport nonlacunarity_statistics(std::span<const std::size_t> indices, Gamma gamma) {
  if (indices.size() < 3)
    throw DynamicsError(ErrorKind::too_few_times, "nonlacunarity needs at least 3 hyperbolic times");
  GapReport r;
  r.gamma_id = gamma.id();
  r.ratios.reserve(indices.size() - 1);
  for (std::size_t k = 0; k + 1 < indices.size(); ++k)
    r.ratios.push_back(static_cast<double>(indices[k + 1] - indices[k]) / gamma(static_cast<double>(indices[k])));
  r.tail_count = std::max<std::size_t>(1, r.ratios.size() / 4);
  r.tail_max = *std::max_element(r.ratios.end() - static_cast<std::ptrdiff_t>(r.tail_count), r.ratios.end());
  return r;
}

ReturnAverage first_time_return_average(const OrbitRecord& record, double c) {
  const auto idx = exact_hyperbolic_times(record, c);
  if (idx.empty()) throw DynamicsError(ErrorKind::no_hyperbolic_times, "record has no hyperbolic times");
  ReturnAverage r;
  r.count = idx.size();
  // Differences telescope from n_0 = 0 to the last time.
  r.average = static_cast<double>(idx.back()) / static_cast<double>(idx.size());
  r.inverse_frequency = static_cast<double>(record.length) / static_cast<double>(idx.size());
  return r;
}

PowerChoice choose_power(MapPtr map, double c, std::span<const StartPoint> sample, std::size_t N, int max_ell) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (sample.empty()) throw std::invalid_argument("choose_power needs a nonempty sample");
  const auto L = static_cast<std::size_t>(max_ell);
  std::vector<long double> sums(L + 1, 0.0L);
  std::vector<std::size_t> counts(L + 1, 0);
  const std::size_t stride = std::max<std::size_t>(1, N / 8192);
  for (const StartPoint& x : sample) {
    const OrbitRecord rec = compute_orbit(map, x, N + L);
    for (std::size_t j = 0; j < N; j += stride) {
      if (map->dimension() == 1) {
        long double acc = 0.0L;
        for (std::size_t l = 1; l <= L; ++l) {
          const double v = rec.log_inv_norms[j + l - 1];
          if (std::isinf(v)) break;
          acc += v;
          sums[l] += acc / static_cast<long double>(l);
          ++counts[l];
        }
      } else {
        Jacobian P{2, 1.0, 0.0, 0.0, 1.0};
        for (std::size_t l = 1; l <= L; ++l) {
          if (std::isinf(rec.log_inv_norms[j + l - 1])) break;
          const Jacobian J = map->jacobian(rec.points[j + l - 1]);
          P = {2, J.a * P.a + J.b * P.c, J.a * P.b + J.b * P.d, J.c * P.a + J.d * P.c, J.c * P.b + J.d * P.d};
          sums[l] += -std::log(P.conorm()) / static_cast<long double>(l);
          ++counts[l];
        }
      }
    }
  }
  PowerChoice out;
  for (int l = 1; l <= max_ell; ++l) {
    const auto u = static_cast<std::size_t>(l);
    const double avg = counts[u] ? static_cast<double>(sums[u] / counts[u]) : std::numeric_limits<double>::infinity();
    out.averages.push_back(avg);
    if (avg < -4.0 * c) {
      out.ell = l;
      out.average = avg;
      return out;
    }
  }
  throw DynamicsError(ErrorKind::no_such_power, "no power ell <= " + std::to_string(max_ell) + " reaches -4c");
}

HyperbolicTimeReport hyperbolic_time_report(const OrbitRecord& record, double c, double delta, Gamma gamma) {
  HyperbolicTimeReport r;
  r.c = c;
  r.delta = delta;
  r.N = record.length;
  r.indices = exact_hyperbolic_times(record, c);
  r.frequency_hat = hyperbolic_frequency(r.indices, record.length);
  r.first_time = r.indices.empty() ? 0 : r.indices.front();
  r.gaps.gamma_id = gamma.id();
  if (r.indices.size() >= 3) r.gaps = nonlacunarity_statistics(r.indices, gamma);
  return r;
}

Calibration calibrate(MapPtr map, std::uint64_t seed, std::size_t N, double delta) {
  constexpr int kLadderDepth = 20;
  Rng rng(seed);
  const StartPoint x = sample_typical(*map, rng, N);
  const OrbitRecord rec = compute_orbit(map, x, N);
  Calibration cal;
  cal.delta = delta;
  cal.N = N;
  double c = 0.4;
  for (int i = 0; i <= kLadderDepth; ++i, c *= 0.5) {
    const double freq = hyperbolic_frequency(exact_hyperbolic_times(rec, c), N);
    if (freq > 0.05) {
      cal.c = c;
      cal.frequency = freq;
      break;
    }
  }
  if (cal.c == 0.0) throw DynamicsError(ErrorKind::no_hyperbolic_times, "calibration found no level with frequency > 0.05");
  constexpr std::size_t kPowerLength = 20'000;
  std::vector<StartPoint> sample;
  for (int i = 0; i < 4; ++i) sample.push_back(sample_typical(*map, rng, kPowerLength + 64));
  // In one dimension the l-step average does not depend on l, so a power may not
  // exist at c itself; the level used for l is then lowered and recorded.
  for (double cp = cal.c; cp >= 0.4 * std::ldexp(1.0, -kLadderDepth); cp *= 0.5) {
    try {
      cal.ell = choose_power(map, cp, sample, kPowerLength).ell;
      cal.c_power = cp;
      return cal;
    } catch (const DynamicsError& e) {
      if (e.kind() != ErrorKind::no_such_power) throw;
    }
  }
  throw DynamicsError(ErrorKind::no_such_power, "calibration found no power on the ladder");
}

}  // namespace nuspec
