#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuspec/geometry.hpp"

namespace nuspec::cli {

inline constexpr int kSchemaVersion = 1;

// Validation failure; line is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// "auto" is represented by nullopt until resolve time.
struct ExperimentConfig {
  int schema = kSchemaVersion;
  std::string map_id;
  double alpha = 0.5;
  std::uint64_t seed = 24301;
  std::size_t orbit_length = 100'000;
  std::size_t calibration_length = 100'000;
  std::vector<std::size_t> trend_lengths;
  std::optional<double> c;
  std::optional<double> delta;
  std::optional<int> ell;
  double epsilon = 1e-3;
  std::vector<double> eta_ladder{0.2, 0.1, 0.05};
  std::vector<std::size_t> n_ladder{8, 16, 32, 64, 128};
  std::vector<double> radius_ladder;
  std::string q_profile = "exponential";
  std::size_t centers = 10;
  std::vector<double> center;  // empty = sample `centers` typical points
  std::size_t closing_length = 3;
  std::string gamma = "identity";
  std::size_t pair_samples = 16;
  int n_max = 128;
  unsigned threads = 0;  // 0 = available parallelism
  std::string output_dir = ".";
};

// Flat "key = value" text; '#' starts a comment. Unknown keys, duplicate keys and
// malformed values are errors carrying the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Subcommand-specific checks, run before any output is written.
void validate_for(const std::string& subcommand, const ExperimentConfig& config);

// Thread count after the NUSPEC_THREADS override and the 0 = hardware default.
unsigned effective_threads(const ExperimentConfig& config);

}  // namespace nuspec::cli
