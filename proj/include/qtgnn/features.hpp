#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qtgnn/graph.hpp"
#include "qtgnn/quantum_conv.hpp"
#include "qtgnn/topology.hpp"

namespace qtgnn {

enum class Ablation { kFull, kClassicalEmbedding, kNoTopology, kLinearUnitary, kSupervisedOnly };

std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view s);

/// n points evenly spaced over [lo, hi], endpoints included.
std::vector<double> uniform_grid(std::size_t n, double lo = 0.0, double hi = 1.0);

struct FeatureConfig {
  std::size_t capacity = 8;  // largest graph, in nodes
  std::size_t layers = 2;
  std::vector<double> eps_grid = uniform_grid(16);
  int max_dim = 1;
  double eps_max = 1.0;  // fidelity distances never exceed 1
  Ablation ablation = Ablation::kFull;

  bool operator==(const FeatureConfig&) const = default;
  void validate() const;
  bool topology_enabled() const { return ablation != Ablation::kNoTopology; }
};

/// Offsets of the five feature blocks.
///   z_q    3N Bloch entries, then N(N-1)/2 pair correlations
///   c_q    1
///   betti  G entries for k = 0, then G for k = 1
///   euler  G
///   w2     1
struct FeatureLayout {
  std::size_t capacity = 0;
  std::size_t grid = 0;

  explicit FeatureLayout(const FeatureConfig& cfg) : capacity(cfg.capacity), grid(cfg.eps_grid.size()) {}

  std::size_t node_block() const { return 3 * capacity; }
  std::size_t pair_block() const { return capacity * (capacity - 1) / 2; }
  std::size_t c_q() const { return node_block() + pair_block(); }
  std::size_t betti(int k) const { return c_q() + 1 + static_cast<std::size_t>(k) * grid; }
  std::size_t euler() const { return betti(2); }
  std::size_t w2() const { return euler() + grid; }
  std::size_t size() const { return w2() + 1; }
};

using FeatureVector = Eigen::VectorXd;

/// Flat indexing of every trainable parameter: the encoding angle, then per
/// layer the slot-pair angles, node angles, slot-triple angles and channel
/// logit, then the linear head and its bias.
class ParameterLayout {
 public:
  ParameterLayout() = default;
  ParameterLayout(std::size_t capacity, std::size_t layers, std::size_t feature_dim);

  std::size_t capacity() const { return capacity_; }
  std::size_t layers() const { return layers_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t size() const { return bias_index() + 1; }

  std::size_t theta_e_index() const { return 0; }
  std::size_t edge_index(std::size_t layer, std::size_t a, std::size_t b) const;
  std::size_t node_index(std::size_t layer, std::size_t a) const;
  std::size_t triangle_index(std::size_t layer, std::size_t a, std::size_t b, std::size_t c) const;
  std::size_t logit_index(std::size_t layer) const;
  std::size_t head_index(std::size_t j) const { return head_offset() + j; }
  std::size_t head_offset() const { return 1 + layers_ * per_layer(); }
  std::size_t bias_index() const { return head_offset() + feature_dim_; }

  /// Layer owning a quantum parameter; nullopt for the encoding angle.
  std::optional<std::size_t> layer_of(std::size_t index) const;
  bool is_quantum(std::size_t index) const { return index < head_offset(); }
  bool is_logit(std::size_t index) const;
  /// Circuit angles and head entries are regularized; the encoding angle,
  /// channel logits and bias are not.
  bool regularized(std::size_t index) const;

 private:
  std::size_t per_layer() const { return n_pairs_ + capacity_ + n_triples_ + 1; }

  std::size_t capacity_ = 0;
  std::size_t layers_ = 0;
  std::size_t feature_dim_ = 0;
  std::size_t n_pairs_ = 0;
  std::size_t n_triples_ = 0;
};

struct ModelParams {
  ParameterLayout layout;
  std::vector<double> values;
  // Frozen input standardization of the head; empty means identity.
  Eigen::VectorXd head_center;
  Eigen::VectorXd head_scale;

  double operator[](std::size_t i) const { return values[i]; }
  double theta_e() const { return values[layout.theta_e_index()]; }
  Eigen::VectorXd head() const;
  double bias() const { return values[layout.bias_index()]; }
  /// (phi - center) / scale, the head's input.
  Eigen::VectorXd standardize(const Eigen::VectorXd& phi) const;
};

/// How one graph's nodes map onto parameter slots: slot 0 is the node with
/// the largest degree, ties broken by strength and then account id.
struct GraphBinding {
  std::vector<std::size_t> slot;
  std::vector<NodePair> pairs;
  std::vector<NodeTriple> triangles;
};

GraphBinding bind_graph(const TransactionGraph& g, std::size_t capacity);

LayerParams layer_params(const ModelParams& p, const GraphBinding& b, std::size_t layer);

/// Sorted flat indices of the quantum parameters this graph depends on.
std::vector<std::size_t> active_parameters(const ModelParams& p, const GraphBinding& b);

struct GraphFeatures {
  FeatureVector phi;
  PersistenceDiagram diagram;  // truncated at eps_max
};

/// Persistence diagram of the one-qubit reductions under the fidelity metric.
PersistenceDiagram state_diagram(const DensityMatrix& rho, const FeatureConfig& cfg);

/// Full feature vector. `d_normal` fills the w2 slot; without it the slot is 0.
GraphFeatures extract_features(const TransactionGraph& g, const ModelParams& p,
                               const FeatureConfig& cfg, const PersistenceDiagram* d_normal);

/// Cached forward pass of one graph for finite-difference probes.
class FeatureProbe {
 public:
  FeatureProbe(const TransactionGraph& g, const ModelParams& p, const FeatureConfig& cfg,
               const PersistenceDiagram* d_normal);

  const GraphFeatures& base() const { return base_; }
  const std::vector<std::size_t>& active() const { return active_; }

  /// Features with parameter `index` moved by `delta`. The Betti and Euler
  /// blocks are piecewise constant in the parameters and are copied from
  /// the base point, as is a W2 entry that is exactly zero.
  FeatureVector shifted(std::size_t index, double delta) const;

 private:
  FeatureVector continuous_blocks(const DensityMatrix& rho) const;

  const TransactionGraph* g_;
  const ModelParams* p_;
  const FeatureConfig* cfg_;
  const PersistenceDiagram* d_normal_;
  GraphBinding binding_;
  std::vector<std::size_t> active_;
  DensityMatrix rho0_;
  std::vector<LayerParams> layers_;
  std::vector<UnitaryOperator> unitaries_;
  std::vector<DensityMatrix> states_;  // after each layer
  GraphFeatures base_;
};

}  // namespace qtgnn
