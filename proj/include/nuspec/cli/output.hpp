#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nuspec/cli/config.hpp"

namespace nuspec::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kArtifactVersion = "0.1.0";

struct CsvTable {
  std::string file_name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ResultEnvelope {
  std::string subcommand;
  Json config;                 // fully resolved echo
  Json calibration;            // null when nothing was calibrated
  double wall_clock_seconds = 0.0;
  std::vector<Json> records;   // deterministic payload
  std::vector<CsvTable> tables;
  int exit_code = 0;
  std::string failure;         // set with exit_code 3
};

std::uint64_t fnv1a64(std::string_view bytes);

// Echo of every config field; threads and output_dir included.
Json config_echo(const ExperimentConfig& config);
// FNV-1a over the echo without threads and output_dir, as 16 hex digits.
std::string config_hash(const Json& echo);

std::string format_real(double v);  // %.17g; "nan" and "inf" spelled out
Json point_json(Point p, int dimension);

std::string header_line(const ResultEnvelope& env);
std::string records_text(const ResultEnvelope& env);  // one JSON object per line
std::string csv_text(const CsvTable& table);

// Writes <dir>/<subcommand>.jsonl and each companion CSV. Returns the written paths.
std::vector<std::string> write_envelope(const ResultEnvelope& env, const std::string& dir);

// Summary table over previously written JSON-Lines files.
std::string report_table(const std::vector<std::string>& jsonl_paths);

}  // namespace nuspec::cli
