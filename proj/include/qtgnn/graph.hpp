#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qtgnn {

enum class Label : std::uint8_t { kNormal = 0, kFraud = 1 };

/// Directed transaction between two node indices of the owning graph.
struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 0.0;
  std::int64_t timestamp = 0;
  std::optional<Label> label;

  bool operator==(const Edge&) const = default;
};

/// Multi-party (hyperedge) interaction among three distinct nodes.
struct Triangle {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  double weight = 0.0;
  std::int64_t timestamp = 0;

  bool operator==(const Triangle&) const = default;
};

struct PreprocessConfig {
  std::int64_t window = 1;       // aggregation window in time ticks, > 0
  double filter_threshold = 0.0;  // edges with weight <= threshold are dropped
  bool min_max_normalize = true;

  bool operator==(const PreprocessConfig&) const = default;
  void validate() const;
};

/// Weighted directed multigraph of accounts and transactions.
///
/// Nodes are kept sorted by account id; a node's position is also its qubit
/// index in every quantum representation of the graph.
struct TransactionGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<Triangle> triangles;
  std::vector<double> node_bias;  // alpha_i, one per node
  std::optional<PreprocessConfig> preprocessed_with;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  bool empty() const { return nodes.empty(); }

  /// Index of an account id, or nullopt.
  std::optional<std::size_t> find(std::string_view id) const;

  /// Distinct unordered node pairs joined by at least one edge, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs() const;

  /// Undirected degree counting parallel edges.
  std::vector<std::size_t> degrees() const;

  /// Throws ValidationError on dangling indices, self loops, negative weights
  /// or a bias vector of the wrong size.
  void validate() const;

  bool operator==(const TransactionGraph&) const = default;
};

/// Builds a graph from string account ids, sorting nodes on finish().
class GraphBuilder {
 public:
  void add_node(const std::string& id);
  void add_edge(const std::string& src, const std::string& dst, double weight,
                std::int64_t timestamp, std::optional<Label> label = std::nullopt);
  void add_triangle(const std::string& a, const std::string& b, const std::string& c,
                    double weight, std::int64_t timestamp);
  TransactionGraph finish() const;

 private:
  struct RawEdge {
    std::string src, dst;
    double weight;
    std::int64_t timestamp;
    std::optional<Label> label;
  };
  struct RawTriangle {
    std::string a, b, c;
    double weight;
    std::int64_t timestamp;
  };
  std::set<std::string> ids_;
  std::vector<RawEdge> edges_;
  std::vector<RawTriangle> triangles_;
};

/// Reads `src,dst,amount,timestamp[,label]` CSV with a header row.
TransactionGraph parse_edge_list(std::istream& in);
TransactionGraph parse_edge_list(std::string_view text);

/// Window aggregation, min-max normalisation, degree centrality and edge
/// filtering. Returns the input unchanged when it was already preprocessed
/// with the same configuration.
TransactionGraph preprocess(const TransactionGraph& g, const PreprocessConfig& cfg);

/// Random-walk subgraph with at most ceil(kappa * |E|) edges.
TransactionGraph sample_subgraph(const TransactionGraph& g, double kappa, std::uint64_t seed);

enum class Motif : std::uint8_t { kCycle, kStar, kTriangle };

std::string_view to_string(Motif m);
Motif motif_from_string(std::string_view s);

struct SyntheticConfig {
  std::size_t n_graphs = 1000;
  std::size_t n_accounts = 8;      // background accounts per graph, >= 4
  std::size_t n_transactions = 10;  // mean transactions per graph, motif included
  double fraud_ratio = 0.01;
  std::set<Motif> fraud_motifs = {Motif::kCycle, Motif::kStar, Motif::kTriangle};
  std::uint64_t seed = 0;

  bool operator==(const SyntheticConfig&) const = default;
  void validate() const;
};

struct LabeledGraph {
  TransactionGraph graph;
  int label = 0;
  std::uint64_t seed = 0;
  std::optional<Motif> motif;  // injected motif, when label == 1
};

std::vector<LabeledGraph> generate_synthetic(const SyntheticConfig& cfg);

/// Per-node classical descriptors: normalised degree, normalised strength and
/// local clustering coefficient of the undirected simple graph.
struct NodeStatistics {
  std::vector<double> degree;
  std::vector<double> strength;
  std::vector<double> clustering;
};
NodeStatistics node_statistics(const TransactionGraph& g);

/// Longest directed simple cycle length (0 when acyclic) and largest
/// out-degree toward distinct nodes. Used to scan generated fraud motifs.
struct MotifScan {
  std::size_t longest_cycle = 0;
  std::size_t max_fan_out = 0;
};
MotifScan scan_motifs(const TransactionGraph& g, std::optional<Label> only = std::nullopt);

}  // namespace qtgnn
