#pragma once

#include <string>
#include <vector>

#include "skyrlab/config.hpp"

namespace skyrlab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  bool svg = false;
  int threads = 1;
  bool verbose = false;
};

// Names accepted by run_subcommand, in documentation order.
const std::vector<std::string>& subcommand_names();

// Executes one experiment subcommand: writes the module CSV artifacts under
// out_dir (created if missing), an SVG rendering when opt.svg is set, and
// always a manifest.json recording the canonical config hash and the output
// list. Returns the artifact file names relative to out_dir, manifest
// included. Output bytes are independent of opt.threads. Throws
// ArgumentError for an unknown subcommand name and module errors otherwise.
std::vector<std::string> run_subcommand(const std::string& name,
                                        const ExperimentConfig& cfg,
                                        const std::string& out_dir,
                                        const RunOptions& opt = {});

}  // namespace skyrlab
