#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtgnn/anomaly.hpp"
#include "qtgnn/graph.hpp"

namespace qtgnn {

/// Settings of the convergence-lab experiments.
struct LabConfig {
  std::vector<std::size_t> depths = {1, 2, 4, 6, 8, 10};
  std::size_t trials = 200;      // parameter draws per depth
  double scan_channel_p = 0.25;  // dephasing strength during the depth scan
  std::size_t pairs = 1000;      // state pairs for the contractivity estimate
  double contract_channel_p = 0.5;
  std::vector<double> deltas = {1e-3, 1e-2, 5e-2};
  std::size_t stability_trials = 100;
  std::size_t steps = 500;  // training steps of the descent experiment
  double descent_eta0 = 0.5;  // base step size of the descent experiment

  bool operator==(const LabConfig&) const = default;
};

/// Everything one CLI run needs. All randomness derives from `seed`.
struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<std::string> csv_path;  // edge-list source; synthetic when unset
  SyntheticConfig synthetic;
  PreprocessConfig preprocess;
  double kappa = 1.0;             // subgraph sampling ratio for CSV sources
  std::size_t sample_count = 100; // subgraphs drawn from a CSV source
  double test_fraction = 0.5;     // stratified held-out share
  TrainConfig train;
  std::size_t eval_k = 10;
  std::optional<double> eval_tau;  // defaults to the model's tau
  std::size_t threads = 1;
  std::string output_dir = "out";
  LabConfig lab;

  bool operator==(const RunConfig&) const = default;
  void validate() const;

  /// Training configuration with its seed tied to the root seed.
  TrainConfig train_config() const;
  /// Synthetic configuration with its seed drawn from the dataset substream.
  SyntheticConfig synthetic_config() const;
};

/// Every recognised dotted key, in serialization order.
const std::vector<std::string>& config_keys();

/// Assigns one key from JSON text ("8", "0.5", "\"cycle,star\"", "true").
/// Bare words that are not valid JSON are taken as strings. Throws
/// ConfigError on unknown keys or ill-typed values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat JSON object of dotted keys. Optional values that are unset are
/// written as null.
std::string config_to_json(const RunConfig& cfg);

/// Parses a flat JSON object on top of the defaults. Throws ConfigError.
RunConfig config_from_json(std::string_view text);

RunConfig load_config(const std::string& path);

}  // namespace qtgnn
