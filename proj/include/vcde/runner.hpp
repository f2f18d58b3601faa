#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vcde/mcmc.hpp"

namespace vcde {

// Exit codes for the CLI, one per failure class.
inline constexpr int exit_ok = 0;
inline constexpr int exit_io = 2;
inline constexpr int exit_config = 3;
inline constexpr int exit_numerical = 4;

struct RunConfig {
  // data source: either a CSV or a built-in scenario
  std::string input_path;
  std::string y_col;
  std::vector<std::string> x_cols;
  std::string scenario;
  int n = 1000;

  McmcConfig mcmc;
  std::string out_dir = ".";
  SelectionCriterion criterion = SelectionCriterion::marginal;
  double level = 0.9;
  int n_draws = 4000;
  int chains = 1;

  bool emit_labels = true;
  bool emit_densities = true;
  bool emit_trace = true;
  bool emit_summary = true;
};

// Full pipeline: ingest or simulate, run the chain(s), emit labels.csv,
// density_region_<i>.csv, trace.jsonl and summary.json under out_dir
// (per-chain subdirectories when chains > 1). Returns an exit code; never
// throws.
int run(const RunConfig& config);

}  // namespace vcde
