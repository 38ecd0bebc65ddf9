#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "specrec/hda.hpp"
#include "specrec/nnet/model.hpp"
#include "specrec/nnet/train.hpp"
#include "specrec/simgen.hpp"
#include "specrec/solvers.hpp"

namespace specrec::cli {

// Everything a pipeline run needs, assembled from the sectioned key/value
// config file. Defaults are the device paper values.
struct RunConfig {
  SimConfig sim;
  HdaConfig hda;
  nn::RespecArch arch;
  nn::TrainConfig train;
  SolverConfig solver;
  bool solver_lambda_auto = true;  // sweep tv_lambda on simulated data
  std::string response_path;       // empty: synthesize from the seed
  RngSeed seed{20240521, "specrec"};
  std::size_t threads = 0;  // 0: hardware concurrency
};

RunConfig default_config();

// Strict parser: versioned schema, unknown sections or keys rejected.
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Entry point used by the binary and by tests; never throws, maps errors
// onto one-line JSON diagnostics on stderr and a non-zero exit code.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace specrec::cli
