#include "nuspec/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nuspec::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

Json optional_real(const std::optional<double>& v) { return v ? Json(*v) : Json("auto"); }

}  // namespace

Json config_echo(const ExperimentConfig& c) {
  Json j;
  j["schema"] = c.schema;
  j["map"] = c.map_id;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["orbit_length"] = c.orbit_length;
  j["calibration_length"] = c.calibration_length;
  j["trend_lengths"] = c.trend_lengths;
  j["c"] = optional_real(c.c);
  j["delta"] = optional_real(c.delta);
  j["ell"] = c.ell ? Json(*c.ell) : Json("auto");
  j["epsilon"] = c.epsilon;
  j["eta_ladder"] = c.eta_ladder;
  j["n_ladder"] = c.n_ladder;
  j["radius_ladder"] = c.radius_ladder;
  j["q_profile"] = c.q_profile;
  j["centers"] = c.centers;
  j["center"] = c.center;
  j["closing_length"] = c.closing_length;
  j["gamma"] = c.gamma;
  j["pair_samples"] = c.pair_samples;
  j["n_max"] = c.n_max;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

std::string config_hash(const Json& echo) {
  Json trimmed = echo;
  trimmed.erase("threads");
  trimmed.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(trimmed.dump())));
  return buf;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json point_json(Point p, int dimension) {
  return dimension == 1 ? Json::array({p.x}) : Json::array({p.x, p.y});
}

std::string header_line(const ResultEnvelope& env) {
  Json h;
  h["type"] = "header";
  h["schema_version"] = kSchemaVersion;
  h["artifact_version"] = std::string(kArtifactVersion);
  h["subcommand"] = env.subcommand;
  h["config_hash"] = config_hash(env.config);
  h["config"] = env.config;
  h["calibration"] = env.calibration;
  h["record_count"] = env.records.size();
  h["wall_clock_seconds"] = env.wall_clock_seconds;
  if (env.exit_code != 0) h["failure"] = env.failure;
  return h.dump();
}

std::string records_text(const ResultEnvelope& env) {
  std::string out;
  for (const Json& r : env.records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string csv_text(const CsvTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> write_envelope(const ResultEnvelope& env, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    written.push_back(path);
  };
  put(env.subcommand + ".jsonl", header_line(env) + "\n" + records_text(env));
  for (const CsvTable& t : env.tables) put(t.file_name, csv_text(t));
  return written;
}

std::string report_table(const std::vector<std::string>& paths) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-16s %-18s %8s  %s\n", "subcommand", "map", "config_hash", "records", "summary");
  os << line;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string text;
    if (!std::getline(in, text)) throw std::runtime_error(path + ": empty file");
    const Json header = Json::parse(text);
    if (header.value("type", "") != "header") throw std::runtime_error(path + ": first line is not a header");
    std::size_t count = 0;
    std::string summary;
    while (std::getline(in, text)) {
      if (text.empty()) continue;
      ++count;
      const Json r = Json::parse(text);
      const std::string type = r.value("type", "");
      if (type == "lyapunov_summary") summary = "mean exponents " + r["mean_exponents"].dump();
      if (type == "hyptimes") summary = "N=" + r["N"].dump() + " frequency " + r["frequency"].dump() + " gap tail max " + r["gap_tail_max"].dump();
      if (type == "closing" && summary.empty())
        summary = r["found"].get<bool>() ? "first period " + r["period"].dump() + " K " + r["overshoot"].dump() : "first center: gap";
      if (type == "spec_summary") summary = "limit estimates " + r["limit_estimates"].dump();
      if (type == "recurrence_fit") summary = "pooled slope " + r["slope"].dump();
    }
    std::snprintf(line, sizeof line, "%-12s %-16s %-18s %8zu  ", header["subcommand"].get<std::string>().c_str(),
                  header["config"]["map"].get<std::string>().c_str(), header["config_hash"].get<std::string>().c_str(),
                  count);
    os << line << summary << '\n';
  }
  return os.str();
}

}  // namespace nuspec::cli
