#include "qtgnn/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "qtgnn/error.hpp"

namespace qtgnn {

namespace {

constexpr std::array<std::pair<Ablation, std::string_view>, 5> kAblationNames{{
    {Ablation::kFull, "full"},
    {Ablation::kClassicalEmbedding, "classical_embedding"},
    {Ablation::kNoTopology, "no_topology"},
    {Ablation::kLinearUnitary, "linear_unitary"},
    {Ablation::kSupervisedOnly, "supervised_only"},
}};

std::size_t choose2(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::size_t choose3(std::size_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

NodeTriple sorted_triple(std::size_t a, std::size_t b, std::size_t c) {
  NodeTriple t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

// Betti and Euler curves on the grid, from the untruncated diagram.
void fill_count_blocks(FeatureVector& phi, const PersistenceDiagram& d, const FeatureConfig& cfg) {
  const FeatureLayout lay(cfg);
  for (std::size_t s = 0; s < cfg.eps_grid.size(); ++s) {
    const double eps = cfg.eps_grid[s];
    for (int k = 0; k < 2; ++k) {
      phi(static_cast<Eigen::Index>(lay.betti(k) + s)) = betti_at(d, k, eps);
    }
    phi(static_cast<Eigen::Index>(lay.euler() + s)) = euler_characteristic(d, eps);
  }
}

PersistenceDiagram full_state_diagram(const DensityMatrix& rho, const FeatureConfig& cfg) {
  if (rho.qubits() < 2) {
    PersistenceDiagram d;
    d.features.push_back({0, 0.0, kInfinity, 1});
    return d;
  }
  const auto reductions = node_reductions(rho);
  const DistanceMatrix dm = distance_matrix(reductions, WeightMatrix::identity(2));
  return persistence(vietoris_rips(dm, cfg.eps_max, cfg.max_dim));
}

}  // namespace

std::string_view to_string(Ablation a) {
  for (const auto& [value, name] : kAblationNames) {
    if (value == a) return name;
  }
  return "full";
}

Ablation ablation_from_string(std::string_view s) {
  for (const auto& [value, name] : kAblationNames) {
    if (name == s) return value;
  }
  throw ConfigError("unknown ablation mode '" + std::string(s) + "'");
}

std::vector<double> uniform_grid(std::size_t n, double lo, double hi) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

void FeatureConfig::validate() const {
  if (capacity < 2 || capacity > kMaxQubits) throw ConfigError("capacity must be in [2, 12]");
  if (layers < 1) throw ConfigError("at least one layer is required");
  if (eps_grid.empty() || !std::is_sorted(eps_grid.begin(), eps_grid.end())) {
    throw ConfigError("eps grid must be non-empty and sorted");
  }
  if (max_dim < 1 || max_dim > 2) throw ConfigError("max_dim must be 1 or 2");
  if (!(eps_max > 0.0)) throw ConfigError("eps_max must be positive");
}

ParameterLayout::ParameterLayout(std::size_t capacity, std::size_t layers, std::size_t feature_dim)
    : capacity_(capacity),
      layers_(layers),
      feature_dim_(feature_dim),
      n_pairs_(choose2(capacity)),
      n_triples_(choose3(capacity)) {}

std::size_t ParameterLayout::edge_index(std::size_t layer, std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  if (a == b || b >= capacity_ || layer >= layers_) throw ArgumentError("edge slot out of range");
  const std::size_t pair = a * capacity_ - a * (a + 1) / 2 + (b - a - 1);
  return 1 + layer * per_layer() + pair;
}

std::size_t ParameterLayout::node_index(std::size_t layer, std::size_t a) const {
  if (a >= capacity_ || layer >= layers_) throw ArgumentError("node slot out of range");
  return 1 + layer * per_layer() + n_pairs_ + a;
}

std::size_t ParameterLayout::triangle_index(std::size_t layer, std::size_t a, std::size_t b,
                                            std::size_t c) const {
  const auto t = sorted_triple(a, b, c);
  if (t[0] == t[1] || t[1] == t[2] || t[2] >= capacity_ || layer >= layers_) {
    throw ArgumentError("triangle slot out of range");
  }
  std::size_t rank = 0;
  for (std::size_t x = 0; x < t[0]; ++x) rank += choose2(capacity_ - 1 - x);
  for (std::size_t y = t[0] + 1; y < t[1]; ++y) rank += capacity_ - 1 - y;
  rank += t[2] - t[1] - 1;
  return 1 + layer * per_layer() + n_pairs_ + capacity_ + rank;
}

std::size_t ParameterLayout::logit_index(std::size_t layer) const {
  if (layer >= layers_) throw ArgumentError("layer out of range");
  return 1 + layer * per_layer() + per_layer() - 1;
}

std::optional<std::size_t> ParameterLayout::layer_of(std::size_t index) const {
  if (index == 0 || index >= head_offset()) return std::nullopt;
  return (index - 1) / per_layer();
}

bool ParameterLayout::is_logit(std::size_t index) const {
  const auto l = layer_of(index);
  return l && index == logit_index(*l);
}

bool ParameterLayout::regularized(std::size_t index) const {
  if (index == theta_e_index() || index == bias_index() || index >= size()) return false;
  return !is_logit(index);
}

Eigen::VectorXd ModelParams::head() const {
  const auto dim = static_cast<Eigen::Index>(layout.feature_dim());
  return Eigen::Map<const Eigen::VectorXd>(values.data() + layout.head_offset(), dim);
}

Eigen::VectorXd ModelParams::standardize(const Eigen::VectorXd& phi) const {
  if (head_center.size() == 0) return phi;
  return (phi - head_center).cwiseQuotient(head_scale);
}

GraphBinding bind_graph(const TransactionGraph& g, std::size_t capacity) {
  const std::size_t n = g.node_count();
  if (n == 0) throw ArgumentError("cannot bind an empty graph");
  if (n > capacity) throw CapacityError("graph has more nodes than the model capacity");
  const auto deg = g.degrees();
  std::vector<double> strength(n, 0.0);
  for (const auto& e : g.edges) {
    strength[e.src] += e.weight;
    strength[e.dst] += e.weight;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (deg[a] != deg[b]) return deg[a] > deg[b];
    if (strength[a] != strength[b]) return strength[a] > strength[b];
    return g.nodes[a] < g.nodes[b];
  });
  GraphBinding b;
  b.slot.resize(n);
  for (std::size_t r = 0; r < n; ++r) b.slot[order[r]] = r;
  b.pairs = g.edge_pairs();
  for (const auto& t : g.triangles) {
    const NodeTriple key{t.i, t.j, t.k};
    if (std::find(b.triangles.begin(), b.triangles.end(), key) == b.triangles.end()) {
      b.triangles.push_back(key);
    }
  }
  return b;
}

LayerParams layer_params(const ModelParams& p, const GraphBinding& b, std::size_t layer) {
  const auto& lay = p.layout;
  LayerParams out;
  out.node.resize(b.slot.size());
  for (std::size_t i = 0; i < b.slot.size(); ++i) out.node[i] = p[lay.node_index(layer, b.slot[i])];
  for (const auto& pr : b.pairs) out.edge[pr] = p[lay.edge_index(layer, b.slot[pr.first], b.slot[pr.second])];
  for (const auto& t : b.triangles) {
    out.triangle[t] = p[lay.triangle_index(layer, b.slot[t[0]], b.slot[t[1]], b.slot[t[2]])];
  }
  out.channel_logit = p[lay.logit_index(layer)];
  return out;
}

std::vector<std::size_t> active_parameters(const ModelParams& p, const GraphBinding& b) {
  const auto& lay = p.layout;
  std::vector<std::size_t> idx{lay.theta_e_index()};
  for (std::size_t l = 0; l < lay.layers(); ++l) {
    for (std::size_t i = 0; i < b.slot.size(); ++i) idx.push_back(lay.node_index(l, b.slot[i]));
    for (const auto& pr : b.pairs) idx.push_back(lay.edge_index(l, b.slot[pr.first], b.slot[pr.second]));
    for (const auto& t : b.triangles) {
      idx.push_back(lay.triangle_index(l, b.slot[t[0]], b.slot[t[1]], b.slot[t[2]]));
    }
    idx.push_back(lay.logit_index(l));
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

PersistenceDiagram state_diagram(const DensityMatrix& rho, const FeatureConfig& cfg) {
  return full_state_diagram(rho, cfg).truncated(cfg.eps_max);
}

FeatureProbe::FeatureProbe(const TransactionGraph& g, const ModelParams& p, const FeatureConfig& cfg,
                           const PersistenceDiagram* d_normal)
    : g_(&g), p_(&p), cfg_(&cfg), d_normal_(d_normal) {
  if (p.layout.capacity() != cfg.capacity || p.layout.layers() != cfg.layers ||
      p.layout.feature_dim() != FeatureLayout(cfg).size() || p.values.size() != p.layout.size()) {
    throw ArgumentError("model parameters do not match the feature configuration");
  }
  binding_ = bind_graph(g, cfg.capacity);
  active_ = active_parameters(p, binding_);
  rho0_ = encode_state(g, {p.theta_e()}).rho;
  const bool linear = cfg.ablation == Ablation::kLinearUnitary;
  DensityMatrix rho = rho0_;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    layers_.push_back(layer_params(p, binding_, l));
    unitaries_.push_back(build_layer_unitary(g, layers_.back()));
    rho = unitaries_.back().conjugate(rho);
    if (!linear) rho = apply_channel(rho, ChannelSpec::from_logit(layers_.back().channel_logit));
    states_.push_back(rho);
  }
  base_.phi = continuous_blocks(states_.back());
  if (cfg.topology_enabled()) {
    const PersistenceDiagram full = full_state_diagram(states_.back(), cfg);
    fill_count_blocks(base_.phi, full, cfg);
    base_.diagram = full.truncated(cfg.eps_max);
  } else {
    base_.diagram = state_diagram(states_.back(), cfg);
  }
}

FeatureVector FeatureProbe::continuous_blocks(const DensityMatrix& rho) const {
  const FeatureConfig& cfg = *cfg_;
  const FeatureLayout lay(cfg);
  FeatureVector phi = FeatureVector::Zero(static_cast<Eigen::Index>(lay.size()));
  const TransactionGraph& g = *g_;
  const std::size_t n = g.node_count();

  std::vector<std::array<double, 3>> node_rows;
  std::vector<double> pair_values;
  if (cfg.ablation == Ablation::kClassicalEmbedding) {
    const NodeStatistics st = node_statistics(g);
    for (std::size_t i = 0; i < n; ++i) node_rows.push_back({st.degree[i], st.strength[i], st.clustering[i]});
  } else {
    const QuantumEmbedding e = read_embedding(rho, g);
    for (const auto& b : e.bloch) node_rows.push_back({b[2], b[0], b[1]});
    for (const auto& [pr, zz] : e.edge_zz) pair_values.push_back(zz);
  }
  std::sort(node_rows.begin(), node_rows.end(), std::greater<>());
  std::sort(pair_values.begin(), pair_values.end(), std::greater<>());
  for (std::size_t i = 0; i < node_rows.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) phi(static_cast<Eigen::Index>(3 * i + c)) = node_rows[i][c];
  }
  for (std::size_t i = 0; i < pair_values.size(); ++i) {
    phi(static_cast<Eigen::Index>(lay.node_block() + i)) = pair_values[i];
  }

  phi(static_cast<Eigen::Index>(lay.c_q())) = correlation_entropy(rho, binding_.pairs);

  if (cfg.topology_enabled() && d_normal_ != nullptr) {
    phi(static_cast<Eigen::Index>(lay.w2())) = wasserstein2(state_diagram(rho, cfg), *d_normal_);
  }
  return phi;
}

FeatureVector FeatureProbe::shifted(std::size_t index, double delta) const {
  const auto& lay = p_->layout;
  if (!lay.is_quantum(index)) throw ArgumentError("only quantum parameters can be probed");
  ModelParams moved = *p_;
  moved.values[index] += delta;
  const bool linear = cfg_->ablation == Ablation::kLinearUnitary;

  const auto owner = lay.layer_of(index);
  std::size_t start = owner.value_or(0);
  DensityMatrix rho = start == 0 ? rho0_ : states_[start - 1];
  if (!owner) rho = encode_state(*g_, {moved.theta_e()}).rho;
  for (std::size_t l = start; l < cfg_->layers; ++l) {
    const bool rebuild = owner && l == *owner && !lay.is_logit(index);
    const LayerParams params = l == start && owner ? layer_params(moved, binding_, l) : layers_[l];
    const UnitaryOperator u = rebuild ? build_layer_unitary(*g_, params) : unitaries_[l];
    rho = u.conjugate(rho);
    if (!linear) rho = apply_channel(rho, ChannelSpec::from_logit(params.channel_logit));
  }
  FeatureVector phi = continuous_blocks(rho);
  const FeatureLayout fl(*cfg_);
  const auto count_offset = static_cast<Eigen::Index>(fl.betti(0));
  const auto count_size = static_cast<Eigen::Index>(fl.w2() - fl.betti(0));
  phi.segment(count_offset, count_size) = base_.phi.segment(count_offset, count_size);
  // W2 = 0 is the minimum of a nonnegative distance, so 0 is its derivative
  // there; probing it only picks up the kink of the optimal matching
  const auto w2 = static_cast<Eigen::Index>(fl.w2());
  if (base_.phi(w2) == 0.0) phi(w2) = 0.0;
  return phi;
}

GraphFeatures extract_features(const TransactionGraph& g, const ModelParams& p,
                               const FeatureConfig& cfg, const PersistenceDiagram* d_normal) {
  return FeatureProbe(g, p, cfg, d_normal).base();
}

}  // namespace qtgnn
