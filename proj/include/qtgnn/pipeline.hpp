#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qtgnn/anomaly.hpp"
#include "qtgnn/config.hpp"
#include "qtgnn/metrics.hpp"
#include "qtgnn/serialize.hpp"

namespace qtgnn {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results land in
/// input order; the first exception is rethrown after all workers stop.
template <typename T>
std::vector<T> parallel_map(std::size_t n, std::size_t threads, const std::function<T(std::size_t)>& fn);

/// Dataset records for a configuration: synthetic graphs, or subgraphs
/// sampled from the CSV edge list. Splits are stratified by label.
std::vector<DatasetRecord> build_dataset(const RunConfig& cfg);

/// Preprocessed training graphs of the records tagged `split` ("all" keeps
/// every record).
std::vector<LabeledGraph> select_split(std::span<const DatasetRecord> records, std::string_view split,
                                       const PreprocessConfig& pre);

std::vector<ScoreRecord> score_records(std::span<const DatasetRecord> records, const TrainedModel& model,
                                       const PreprocessConfig& pre, std::optional<double> tau, std::size_t threads);

/// Metrics of a scores file. tau defaults to the tau stored with the scores.
MetricsReport evaluate_scores(std::span<const ScoreRecord> scores, std::size_t k, std::optional<double> tau);

/// (fpr, tpr) corner points of the empirical ROC curve, plot data.
std::vector<std::pair<double, double>> roc_curve(std::span<const double> scores, std::span<const int> labels);

struct ExperimentResult {
  Verdict verdict;
  std::string csv;
};

const std::vector<std::string>& experiment_names();

/// Runs one convergence-lab experiment. Throws ConfigError on unknown names.
ExperimentResult run_experiment(std::string_view name, const RunConfig& cfg);

struct BenchmarkReport {
  double full_auc = 0.0;
  double no_topology_auc = 0.0;
  double degree_auc = 0.0;
  std::size_t test_positives = 0;
  std::size_t test_size = 0;
  bool passed = false;  // full >= 0.85 and strictly above both comparisons
};

/// Trains the full model and the no-topology ablation on the train split
/// of cfg's synthetic dataset, fits the degree baseline on the same split
/// and compares test ROC-AUC of the anomaly score.
BenchmarkReport run_benchmark(const RunConfig& cfg);

/// CLI commands. Each writes into cfg.output_dir together with a
/// manifest_<command>.json listing the outputs.
void cmd_generate(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg, const std::filesystem::path& dataset);
void cmd_score(const RunConfig& cfg, const std::filesystem::path& model, const std::filesystem::path& dataset,
               std::string_view split);
/// Returns the metrics it wrote.
MetricsReport cmd_eval(const RunConfig& cfg, const std::filesystem::path& scores);
/// Returns the verdict; the caller maps a failed verdict to its exit code.
Verdict cmd_lab(const RunConfig& cfg, std::string_view experiment);
/// Final layer states of every graph as a binary density file, plus the
/// feature vectors as JSON lines.
void cmd_embed(const RunConfig& cfg, const std::filesystem::path& dataset, const std::filesystem::path* model);

}  // namespace qtgnn

#include "qtgnn/detail/parallel.hpp"
