#pragma once

#include <string>
#include <vector>

#include "nuspec/cli/config.hpp"
#include "nuspec/cli/output.hpp"

namespace nuspec::cli {

// Each run resolves "auto" fields first, so the envelope echo never contains "auto".
// Library errors surface as envelopes with exit_code 3 only where the experiment
// itself decides failure (censoring); other DynamicsErrors propagate.
ResultEnvelope run_lyapunov(const ExperimentConfig& config);
ResultEnvelope run_hyptimes(const ExperimentConfig& config);
ResultEnvelope run_closing(const ExperimentConfig& config);
ResultEnvelope run_spec_sweep(const ExperimentConfig& config);
ResultEnvelope run_recurrence(const ExperimentConfig& config);

const std::vector<std::string>& experiment_names();
ResultEnvelope run_experiment(const std::string& subcommand, const ExperimentConfig& config);

// Full command line: parse, validate, run, write. Returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace nuspec::cli
