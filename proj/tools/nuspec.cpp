#include "nuspec/cli/experiments.hpp"

int main(int argc, char** argv) { return nuspec::cli::run_cli(argc, argv); }
