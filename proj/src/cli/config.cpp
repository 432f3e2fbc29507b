#include "nuspec/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nuspec/hyperbolic_times.hpp"
#include "nuspec/map_catalog.hpp"
#include "nuspec/parallel.hpp"

namespace nuspec::cli {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? "" : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Field {
  int line;
  std::string key;
  std::string value;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line, key, msg); }

  double real() const {
    double v = 0.0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) fail("expected a real number, got '" + value + "'");
    return v;
  }
  std::uint64_t integer() const {
    std::uint64_t v = 0;
    const char* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected a non-negative integer, got '" + value + "'");
    return v;
  }
  bool is_auto() const { return value == "auto"; }
  std::vector<double> reals() const {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(Field{line, key, item}.real());
    return out;
  }
  std::vector<std::size_t> integers() const {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(value)) out.push_back(Field{line, key, item}.integer());
    return out;
  }
};

using Setter = std::function<void(ExperimentConfig&, const Field&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"schema", [](ExperimentConfig& c, const Field& f) {
         c.schema = static_cast<int>(f.integer());
         if (c.schema != kSchemaVersion) f.fail("unsupported schema version " + f.value);
       }},
      {"map", [](ExperimentConfig& c, const Field& f) {
         const auto ids = catalog_ids();
         if (std::find(ids.begin(), ids.end(), f.value) == ids.end()) f.fail("unknown map '" + f.value + "'");
         c.map_id = f.value;
       }},
      {"alpha", [](ExperimentConfig& c, const Field& f) {
         c.alpha = f.real();
         if (!(c.alpha > 0.0 && c.alpha < 1.0)) f.fail("alpha must lie in (0, 1)");
       }},
      {"seed", [](ExperimentConfig& c, const Field& f) { c.seed = f.integer(); }},
      {"orbit_length", [](ExperimentConfig& c, const Field& f) { c.orbit_length = f.integer(); }},
      {"calibration_length", [](ExperimentConfig& c, const Field& f) { c.calibration_length = f.integer(); }},
      {"trend_lengths", [](ExperimentConfig& c, const Field& f) { c.trend_lengths = f.integers(); }},
      {"c", [](ExperimentConfig& c, const Field& f) {
         if (f.is_auto()) return c.c.reset();
         c.c = f.real();
         if (!(*c.c > 0.0)) f.fail("c must be positive");
       }},
      {"delta", [](ExperimentConfig& c, const Field& f) {
         if (f.is_auto()) return c.delta.reset();
         c.delta = f.real();
         if (!(*c.delta > 0.0 && *c.delta < 0.5)) f.fail("delta must lie in (0, 1/2)");
       }},
      {"ell", [](ExperimentConfig& c, const Field& f) {
         if (f.is_auto()) return c.ell.reset();
         c.ell = static_cast<int>(f.integer());
         if (*c.ell < 1) f.fail("ell must be at least 1");
       }},
      {"epsilon", [](ExperimentConfig& c, const Field& f) {
         c.epsilon = f.real();
         if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) f.fail("epsilon must lie in (0, 1/2)");
       }},
      {"eta_ladder", [](ExperimentConfig& c, const Field& f) { c.eta_ladder = f.reals(); }},
      {"n_ladder", [](ExperimentConfig& c, const Field& f) { c.n_ladder = f.integers(); }},
      {"radius_ladder", [](ExperimentConfig& c, const Field& f) { c.radius_ladder = f.reals(); }},
      {"q_profile", [](ExperimentConfig& c, const Field& f) {
         if (f.value != "exponential" && f.value != "truncated-distance" && f.value != "constant")
           f.fail("q_profile must be exponential, truncated-distance or constant");
         c.q_profile = f.value;
       }},
      {"centers", [](ExperimentConfig& c, const Field& f) { c.centers = f.integer(); }},
      {"center", [](ExperimentConfig& c, const Field& f) {
         const auto v = f.reals();
         if (v.empty() || v.size() > 2) f.fail("center takes one or two coordinates");
         for (double x : v)
           if (!(x >= 0.0 && x < 1.0)) f.fail("center coordinates must lie in [0, 1)");
         c.center = v;
       }},
      {"closing_length", [](ExperimentConfig& c, const Field& f) { c.closing_length = f.integer(); }},
      {"gamma", [](ExperimentConfig& c, const Field& f) {
         try {
           Gamma::parse(f.value);
         } catch (const std::invalid_argument& e) {
           f.fail(e.what());
         }
         c.gamma = f.value;
       }},
      {"pair_samples", [](ExperimentConfig& c, const Field& f) { c.pair_samples = f.integer(); }},
      {"n_max", [](ExperimentConfig& c, const Field& f) {
         c.n_max = static_cast<int>(f.integer());
         if (c.n_max < 1) f.fail("n_max must be at least 1");
       }},
      {"threads", [](ExperimentConfig& c, const Field& f) { c.threads = static_cast<unsigned>(f.integer()); }},
      {"output_dir", [](ExperimentConfig& c, const Field& f) { c.output_dir = f.value; }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string content = trim(raw);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value'");
    const Field f{line, trim(std::string_view(content).substr(0, eq)), trim(std::string_view(content).substr(eq + 1))};
    const auto it = setters().find(f.key);
    if (it == setters().end()) f.fail("unknown key");
    if (!seen.insert(f.key).second) f.fail("duplicate key");
    if (f.value.empty()) f.fail("empty value");
    it->second(config, f);
  }
  if (!seen.count("schema")) throw ConfigError(0, "schema", "missing (expected schema = 1)");
  if (!seen.count("map")) throw ConfigError(0, "map", "missing");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_for(const std::string& subcommand, const ExperimentConfig& c) {
  if (!c.center.empty() && static_cast<int>(c.center.size()) != make_map(c.map_id, c.alpha)->dimension())
    throw ConfigError(0, "center", "coordinate count must match the map dimension");
  if (subcommand == "lyapunov" || subcommand == "hyptimes") {
    if (c.orbit_length < 1) throw ConfigError(0, "orbit_length", "must be at least 1");
  }
  if (subcommand == "hyptimes" && c.calibration_length < 1000)
    throw ConfigError(0, "calibration_length", "must be at least 1000");
  if (subcommand == "lyapunov" || subcommand == "spec-sweep") {
    if (c.centers < 1) throw ConfigError(0, "centers", "must be at least 1");
  }
  if (subcommand == "closing") {
    if (c.closing_length < 1) throw ConfigError(0, "closing_length", "must be at least 1");
    if (c.center.empty() && c.centers < 1) throw ConfigError(0, "centers", "must be at least 1");
  }
  if (subcommand == "spec-sweep") {
    if (c.n_ladder.size() < 5) throw ConfigError(0, "n_ladder", "needs at least 5 values");
    if (c.eta_ladder.size() < 3) throw ConfigError(0, "eta_ladder", "needs at least 3 values");
    for (std::size_t n : c.n_ladder)
      if (n < 1) throw ConfigError(0, "n_ladder", "values must be at least 1");
    for (double e : c.eta_ladder)
      if (!(e > 0.0)) throw ConfigError(0, "eta_ladder", "values must be positive");
  }
  if (subcommand == "recurrence") {
    if (c.centers < 10) throw ConfigError(0, "centers", "recurrence needs at least 10 centers");
    if (c.radius_ladder.empty()) throw ConfigError(0, "radius_ladder", "must not be empty");
    const auto [lo, hi] = std::minmax_element(c.radius_ladder.begin(), c.radius_ladder.end());
    if (!(*lo > 0.0 && *hi < 0.5)) throw ConfigError(0, "radius_ladder", "radii must lie in (0, 1/2)");
    if (*hi / *lo < 100.0 * (1.0 - 1e-12)) throw ConfigError(0, "radius_ladder", "must span at least 2 decades");
  }
}

unsigned effective_threads(const ExperimentConfig& config) {
  if (const char* env = std::getenv("NUSPEC_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && v > 0) return v;
    throw ConfigError(0, "NUSPEC_THREADS", "expected a positive integer");
  }
  return config.threads > 0 ? config.threads : default_thread_count();
}

}  // namespace nuspec::cli
