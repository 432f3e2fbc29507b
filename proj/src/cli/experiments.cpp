#include "nuspec/cli/experiments.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "nuspec/closing.hpp"
#include "nuspec/errors.hpp"
#include "nuspec/parallel.hpp"
#include "nuspec/recurrence.hpp"

namespace nuspec::cli {

namespace {

struct Resolved {
  MapPtr map;
  ExperimentConfig config;  // c, delta, ell filled in
  Json calibration;
  unsigned threads = 1;
};

Resolved resolve(const ExperimentConfig& in) {
  Resolved r;
  r.map = make_map(in.map_id, in.alpha);
  r.config = in;
  r.threads = effective_threads(in);
  r.config.threads = r.threads;
  r.config.delta = in.delta.value_or(0.1);
  if (!in.c || !in.ell) {
    const Calibration cal = calibrate(r.map, in.seed, in.calibration_length, *r.config.delta);
    r.calibration = {{"c", cal.c}, {"delta", cal.delta}, {"ell", cal.ell}, {"c_power", cal.c_power},
                     {"frequency", cal.frequency}, {"N", cal.N}};
    r.config.c = in.c.value_or(cal.c);
    r.config.ell = in.ell.value_or(cal.ell);
  }
  return r;
}

ResultEnvelope start(const std::string& name, const Resolved& r) {
  ResultEnvelope env;
  env.subcommand = name;
  env.config = config_echo(r.config);
  env.calibration = r.calibration;
  return env;
}

std::vector<StartPoint> typical_centers(const DynamicalMap& map, std::uint64_t seed, std::size_t count,
                                        std::size_t horizon) {
  Rng rng(seed);
  std::vector<StartPoint> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_typical(map, rng, horizon));
  return out;
}

std::vector<StartPoint> chosen_centers(const Resolved& r, std::size_t horizon) {
  if (!r.config.center.empty()) {
    Point p{r.config.center[0], r.config.center.size() == 2 ? r.config.center[1] : 0.0};
    return {StartPoint(p)};
  }
  return typical_centers(*r.map, r.config.seed, r.config.centers, horizon);
}

ClosingContext closing_context(const Resolved& r) {
  ClosingContext ctx;
  ctx.c = *r.config.c;
  ctx.delta = *r.config.delta;
  ctx.ell = *r.config.ell;
  return ctx;
}

// Exact value W / (b^P - 1) of a purely periodic word, reduced; empty past 64 bits.
std::string periodic_rational(int base, const std::vector<std::uint8_t>& word) {
  unsigned __int128 num = 0, den = 1;
  for (std::uint8_t d : word) {
    num = num * static_cast<unsigned>(base) + d;
    den *= static_cast<unsigned>(base);
    if (den > (static_cast<unsigned __int128>(1) << 63)) return {};
  }
  den -= 1;
  const auto n = static_cast<std::uint64_t>(num), m = static_cast<std::uint64_t>(den);
  const std::uint64_t g = std::gcd(n, m);
  if (n == 0) return "0";
  return std::to_string(n / g) + "/" + std::to_string(m / g);
}

Json target_json(const TargetRule& t) {
  return {{"lower", t.lower},
          {"upper", t.upper},
          {"extended", t.extended},
          {"s", t.s},
          {"stretch", t.stretch},
          {"cover_radius", t.cover_radius},
          {"cover_offset", t.cover_offset},
          {"cover_offset_uniform", t.cover_offset_uniform},
          {"period_cap", t.period_cap}};
}

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ResultEnvelope run_lyapunov(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Resolved r = resolve(config);
  ResultEnvelope env = start("lyapunov", r);
  const int d = r.map->dimension();
  const std::vector<StartPoint> xs = chosen_centers(r, r.config.orbit_length + 2000);
  std::vector<LyapunovEstimate> est(xs.size());
  parallel_for(xs.size(), r.threads, [&](std::size_t i) { est[i] = lyapunov_spectrum(*r.map, xs[i], r.config.orbit_length); });
  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    env.records.push_back({{"type", "lyapunov"},
                           {"center_index", i},
                           {"center", point_json(xs[i].point, d)},
                           {"exponents", est[i].exponents},
                           {"iterates_used", est[i].iterates_used},
                           {"reorthogonalization_period", est[i].reorthogonalization_period},
                           {"critical_hits", est[i].critical_hits},
                           {"degenerate", est[i].degenerate}});
    for (int a = 0; a < d; ++a) mean[static_cast<std::size_t>(a)] += est[i].exponents[static_cast<std::size_t>(a)] / static_cast<double>(xs.size());
  }
  const auto& ref = r.map->reference().exponents;
  env.records.push_back({{"type", "lyapunov_summary"},
                         {"mean_exponents", mean},
                         {"reference_exponents", ref ? Json(*ref) : Json(nullptr)}});
  env.wall_clock_seconds = wall_since(t0);
  return env;
}

ResultEnvelope run_hyptimes(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Resolved r = resolve(config);
  ResultEnvelope env = start("hyptimes", r);
  const double c = *r.config.c, delta = *r.config.delta;
  const Gamma gamma = Gamma::parse(r.config.gamma);
  std::vector<std::size_t> lengths = r.config.trend_lengths;
  if (lengths.empty()) lengths.push_back(r.config.orbit_length);
  const std::size_t longest = *std::max_element(lengths.begin(), lengths.end());
  Rng rng(r.config.seed);
  const StartPoint x = sample_typical(*r.map, rng, longest);
  for (std::size_t N : lengths) {
    const std::vector<double> deltas{delta};
    const OrbitRecord rec = compute_orbit(r.map, x, N, deltas);
    const HyperbolicTimeReport rep = hyperbolic_time_report(rec, c, delta, gamma);
    Json j{{"type", "hyptimes"}, {"N", N}, {"c", c}, {"delta", delta}, {"ell", *r.config.ell},
           {"method", rep.method}, {"count", rep.indices.size()}, {"frequency", rep.frequency_hat},
           {"first_time", rep.first_time}, {"gamma", rep.gaps.gamma_id}};
    if (rep.indices.size() >= 3) {
      j["gap_tail_max"] = rep.gaps.tail_max;
      j["gap_tail_count"] = rep.gaps.tail_count;
    } else {
      j["gap_tail_max"] = nullptr;
      j["gap_tail_count"] = 0;
    }
    if (!rec.critical_hits.empty()) {
      j["concatenation_violations"] = nullptr;
    } else {
      j["concatenation_violations"] = concatenation_check(rec.log_inv_norms, c, rep.indices).size();
    }
    try {
      const ReturnAverage ra = first_time_return_average(rec, c);
      j["return_average"] = ra.average;
      j["inverse_frequency"] = ra.inverse_frequency;
    } catch (const DynamicsError&) {
      j["return_average"] = nullptr;
      j["inverse_frequency"] = nullptr;
    }
    const CriterionValue ex = expansion_criterion(rec, c);
    const CriterionValue sa = slow_approximation_criterion(rec, delta);
    j["expansion"] = {{"value", ex.value}, {"verdict", ex.verdict}, {"terms", ex.terms}};
    j["slow_approximation"] = {{"value", sa.value}, {"critical_hit", sa.critical_hit}};
    env.records.push_back(std::move(j));
  }
  env.wall_clock_seconds = wall_since(t0);
  return env;
}

ResultEnvelope run_closing(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Resolved r = resolve(config);
  ResultEnvelope env = start("closing", r);
  const int d = r.map->dimension();
  const std::size_t n = r.config.closing_length;
  const std::vector<StartPoint> xs = chosen_centers(r, 64 * (n + 64));
  const ClosingContext ctx = closing_context(r);
  std::vector<std::optional<ClosingResult>> found(xs.size());
  std::vector<std::string> gaps(xs.size());
  parallel_for(xs.size(), r.threads, [&](std::size_t i) {
    try {
      found[i] = find_periodic_in_ball(r.map, xs[i], n, r.config.epsilon, ctx);
    } catch (const DynamicsError& e) {
      gaps[i] = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Json j{{"type", "closing"}, {"center_index", i}, {"center", point_json(xs[i].point, d)}, {"n", n},
           {"epsilon", r.config.epsilon}, {"found", found[i].has_value()}};
    if (!found[i]) {
      j["gap_reason"] = gaps[i];
      env.records.push_back(std::move(j));
      continue;
    }
    const ClosingResult& res = *found[i];
    j["periodic_point"] = point_json(res.periodic_point, d);
    if (r.map->exactly_coded()) {
      Json rat = Json::array();
      for (int a = 0; a < d; ++a) {
        const std::string q = periodic_rational(*r.map->factor(a).digit_base(), res.words[static_cast<std::size_t>(a)]);
        rat.push_back(q.empty() ? Json(nullptr) : Json(q));
      }
      j["periodic_point_rational"] = rat;
    }
    j["period"] = res.period;
    j["overshoot"] = res.overshoot;
    j["short_period"] = res.short_period;
    j["search_period"] = res.search_period;
    j["method"] = to_string(res.method);
    j["words"] = res.words;
    j["shadow_distances"] = res.shadow_distances;
    j["periodicity_residual"] = res.periodicity_residual;
    j["candidates_tested"] = res.candidates_tested;
    j["target"] = target_json(res.target);
    // Direct floating-point iteration is only meaningful while doubles keep the orbit.
    if (n <= 32)
      j["direct_iteration_check"] = in_dynamical_ball(*r.map, {xs[i].point, n, r.config.epsilon, std::nullopt}, res.periodic_point);
    else
      j["direct_iteration_check"] = nullptr;
    env.records.push_back(std::move(j));
  }
  env.wall_clock_seconds = wall_since(t0);
  return env;
}

ResultEnvelope run_spec_sweep(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Resolved r = resolve(config);
  ResultEnvelope env = start("spec-sweep", r);
  const std::size_t n_top = *std::max_element(r.config.n_ladder.begin(), r.config.n_ladder.end());
  const std::vector<StartPoint> xs = chosen_centers(r, 64 * (n_top + 64));
  const ClosingContext ctx = closing_context(r);
  QFamily family = QFamily::exponential;
  if (r.config.q_profile == "truncated-distance") family = QFamily::truncated_distance_power;
  if (r.config.q_profile == "constant") family = QFamily::constant;
  const SpecificationVerdict v = specification_sweep(r.map, xs, r.config.n_ladder, r.config.eta_ladder,
                                                     r.config.epsilon, ctx, r.threads, family);
  for (const SweepTrial& t : v.trials) {
    Json j{{"type", "trial"}, {"center_index", t.center_index}, {"n", t.n}, {"eta", t.eta}, {"found", t.result.has_value()}};
    if (t.result) {
      j["period"] = t.result->period;
      j["overshoot"] = t.result->overshoot;
      j["k_over_n"] = static_cast<double>(t.result->overshoot) / static_cast<double>(t.n);
      j["short_period"] = t.result->short_period;
      j["period_cap"] = t.result->target.period_cap;
      j["cover_offset"] = t.result->target.cover_offset;
      j["cover_offset_uniform"] = t.result->target.cover_offset_uniform;
    } else {
      j["gap_reason"] = t.gap_reason;
    }
    env.records.push_back(std::move(j));
  }
  CsvTable csv{"kn_curves.csv", {"eta", "n", "max_k_over_n", "found", "gaps", "flagged"}, {}};
  for (std::size_t e = 0; e < v.etas.size(); ++e)
    for (const CurvePoint& cp : v.curves[e]) {
      env.records.push_back({{"type", "curve"}, {"eta", v.etas[e]}, {"n", cp.n}, {"max_k_over_n", cp.max_ratio},
                             {"found", cp.found}, {"gaps", cp.gaps}, {"flagged", cp.flagged}});
      csv.rows.push_back({format_real(v.etas[e]), std::to_string(cp.n), format_real(cp.max_ratio),
                          std::to_string(cp.found), std::to_string(cp.gaps), std::to_string(cp.flagged)});
    }
  env.records.push_back({{"type", "spec_summary"}, {"etas", v.etas}, {"limit_estimates", v.limit_estimates}});
  env.tables.push_back(std::move(csv));
  env.wall_clock_seconds = wall_since(t0);
  return env;
}

ResultEnvelope run_recurrence(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Resolved r = resolve(config);
  ResultEnvelope env = start("recurrence", r);
  const int d = r.map->dimension();
  const std::vector<StartPoint> xs =
      typical_centers(*r.map, r.config.seed, r.config.centers, static_cast<std::size_t>(r.config.n_max) + 64);
  const ExponentFit fit = recurrence_exponent(*r.map, xs, r.config.radius_ladder, r.config.n_max, r.threads);
  CsvTable csv{"tau_vs_logr.csv", {"center_index", "radius", "neg_log_r", "tau", "censored"}, {}};
  const std::size_t R = r.config.radius_ladder.size();
  for (std::size_t i = 0; i < fit.samples.size(); ++i) {
    const RecurrenceSample& s = fit.samples[i];
    env.records.push_back({{"type", "tau"}, {"center_index", i / R}, {"center", point_json(s.center, d)},
                           {"radius", s.radius}, {"tau", s.tau}, {"censored", s.censored},
                           {"method", to_string(s.method)}, {"n_max", s.n_max}});
    csv.rows.push_back({std::to_string(i / R), format_real(s.radius), format_real(-std::log(s.radius)),
                        std::to_string(s.tau), s.censored ? "1" : "0"});
  }
  for (const CenterFit& cf : fit.centers)
    env.records.push_back({{"type", "center_fit"}, {"center_index", cf.center_index}, {"slope", cf.slope},
                           {"intercept", cf.intercept}, {"used", cf.used}, {"censored", cf.censored},
                           {"monotone", cf.monotone}});
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  env.records.push_back({{"type", "recurrence_fit"}, {"slope", fit.slope}, {"lower_bound", opt(fit.lower_bound)},
                         {"upper_bound", opt(fit.upper_bound)}, {"torus_value", opt(fit.torus_value)},
                         {"below_upper", fit.below_upper}, {"above_lower", fit.above_lower},
                         {"worst_censored_fraction", fit.worst_censored_fraction},
                         {"censoring_exceeded", fit.censoring_exceeded}, {"assumption", fit.assumption}});
  env.tables.push_back(std::move(csv));
  if (fit.censoring_exceeded) {
    env.exit_code = 3;
    env.failure = "more than 20% of a radius ladder censored at n_max";
  }
  env.wall_clock_seconds = wall_since(t0);
  return env;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"lyapunov", "hyptimes", "closing", "spec-sweep", "recurrence"};
  return names;
}

ResultEnvelope run_experiment(const std::string& subcommand, const ExperimentConfig& config) {
  if (subcommand == "lyapunov") return run_lyapunov(config);
  if (subcommand == "hyptimes") return run_hyptimes(config);
  if (subcommand == "closing") return run_closing(config);
  if (subcommand == "spec-sweep") return run_spec_sweep(config);
  if (subcommand == "recurrence") return run_recurrence(config);
  throw std::invalid_argument("unknown subcommand " + subcommand);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Hyperbolic-time, closing and recurrence experiments on expanding maps"};
  app.require_subcommand(1);
  std::string config_path;
  for (const std::string& name : experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("config", config_path, "key = value config file")->required();
  }
  std::vector<std::string> inputs;
  auto* report = app.add_subcommand("report", "summarize JSON-Lines outputs");
  report->add_option("files", inputs, "JSON-Lines files written by other subcommands")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (report->parsed()) {
      std::cout << report_table(inputs);
      return 0;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    ExperimentConfig config;
    try {
      config = load_config(config_path);
      validate_for(name, config);
      effective_threads(config);
    } catch (const ConfigError& e) {
      std::cerr << config_path << ": " << e.what() << '\n';
      return 2;
    }
    const ResultEnvelope env = run_experiment(name, config);
    for (const std::string& path : write_envelope(env, config.output_dir)) std::cerr << "wrote " << path << '\n';
    if (env.exit_code != 0) std::cerr << "experiment failed: " << env.failure << '\n';
    return env.exit_code;
  } catch (const DynamicsError& e) {
    std::cerr << "experiment failed: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace nuspec::cli
