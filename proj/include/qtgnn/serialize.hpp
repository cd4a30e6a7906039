#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtgnn/anomaly.hpp"
#include "qtgnn/config.hpp"
#include "qtgnn/graph.hpp"
#include "qtgnn/quantum_state.hpp"
#include "qtgnn/topology.hpp"

namespace qtgnn {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// One line of a JSON-lines dataset. Graphs are stored raw, before
/// preprocessing.
struct DatasetRecord {
  std::string id;
  std::string split;  // "train" or "test"
  LabeledGraph graph;
};

void write_dataset(std::ostream& out, std::span<const DatasetRecord> records);
/// Throws ParseError with the line number of a malformed record.
std::vector<DatasetRecord> read_dataset(std::istream& in);

/// Flat JSON of the training-related keys of a configuration.
std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(std::string_view text);

/// Parameters, configuration, tau and the full normal reference.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

struct ScoreRecord {
  std::string id;
  int label = 0;
  double score = 0.0;
  int decision = 0;
  double tau = 0.0;
  double probability = 0.0;
  double feature_term = 0.0;
  double landscape_term = 0.0;
  double w2_term = 0.0;
  std::vector<AttributedFeature> top_features;
};

void write_scores(std::ostream& out, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_scores(std::istream& in);

/// One feature per line: {graph_id, dim, birth, death, mult}; essential
/// deaths are written as null.
void write_diagram(std::ostream& out, const std::string& id, const PersistenceDiagram& d);
std::map<std::string, PersistenceDiagram> read_diagrams(std::istream& in);

/// Breakpoint rows graph_id,dim,x,y.
void write_landscape_csv(std::ostream& out, const std::string& id, std::span<const LandscapeFunction> lands,
                         bool header);

void write_training_log(std::ostream& out, std::span<const TrainStep> log);

struct Verdict {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> statistics;
  std::uint64_t seed = 0;
};

std::string verdict_to_json(const Verdict& v);
Verdict verdict_from_json(std::string_view text);

/// Binary density-matrix container, little-endian:
///   magic "QTDM", u32 version (1), u64 count, then per matrix a u64 qubit
///   count followed by dim * dim (re, im) f64 pairs in row-major order.
void write_densities(std::ostream& out, std::span<const DensityMatrix> states);
/// Throws ParseError on a bad header or truncated payload.
std::vector<DensityMatrix> read_densities(std::istream& in);

}  // namespace qtgnn
