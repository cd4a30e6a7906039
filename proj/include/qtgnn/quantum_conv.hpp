#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qtgnn/graph.hpp"
#include "qtgnn/quantum_state.hpp"

namespace qtgnn {

using NodePair = std::pair<std::size_t, std::size_t>;
using NodeTriple = std::array<std::size_t, 3>;

/// Trainable angles of one convolution layer, keyed by the graph's distinct
/// undirected node pairs, its nodes and its triangles.
struct LayerParams {
  std::map<NodePair, double> edge;
  std::vector<double> node;
  std::map<NodeTriple, double> triangle;
  double channel_logit = 0.0;

  /// All angles zero, keys taken from `g`.
  static LayerParams zeros(const TransactionGraph& g, double channel_logit = 0.0);
};

/// Convex mixture (1 - p) id + p * full computational-basis dephasing.
struct ChannelSpec {
  enum class Kind { kDephasingMixture, kIdentity };
  Kind kind = Kind::kDephasingMixture;
  double p = 0.0;

  static ChannelSpec from_logit(double logit);
  static ChannelSpec identity() { return {Kind::kIdentity, 0.0}; }
  double strength() const { return kind == Kind::kIdentity ? 0.0 : p; }
};

/// Per-node Bloch vectors and per-pair <Z_i Z_j> read out of a state.
struct QuantumEmbedding {
  std::vector<std::array<double, 3>> bloch;
  std::map<NodePair, double> edge_zz;
};

/// Basis indices grouped by Hamming weight. Every layer generator commutes
/// with total Z, so layer unitaries are block diagonal in this ordering.
struct SectorBasis {
  std::size_t n_qubits = 0;
  std::vector<std::size_t> order;    // sector-ordered position -> basis index
  std::vector<std::size_t> offsets;  // first position of each weight sector
  std::vector<std::size_t> sizes;

  static const SectorBasis& get(std::size_t n_qubits);
};

/// Block-diagonal unitary exp(-i G) of a layer generator.
class UnitaryOperator {
 public:
  UnitaryOperator(std::size_t n_qubits, std::vector<ComplexMatrix> blocks);

  std::size_t qubits() const { return n_qubits_; }
  const std::vector<ComplexMatrix>& blocks() const { return blocks_; }

  ComplexMatrix dense() const;
  /// U rho U^dagger.
  DensityMatrix conjugate(const DensityMatrix& rho) const;
  /// In-place conjugation of a matrix already permuted into sector order.
  void conjugate_sector_ordered(ComplexMatrix& m) const;

 private:
  std::size_t n_qubits_;
  std::vector<ComplexMatrix> blocks_;
};

/// exp(-i [sum theta H_ij + sum phi Z_i + sum psi Z_i Z_j Z_k]) with
/// H_ij = XX + YY + ZZ, by exact eigendecomposition of each sector block.
UnitaryOperator build_layer_unitary(const TransactionGraph& g, const LayerParams& p);

/// Dense generator of the layer, for checks against the block form.
HermitianOperator layer_generator(const TransactionGraph& g, const LayerParams& p);

DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& c);

struct ForwardResult {
  DensityMatrix rho;
  QuantumEmbedding embedding;
};

/// Iterates rho <- N_l(U_l rho U_l^dagger) over the layers. `linear` forces
/// every channel to the identity.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, std::span<const LayerParams> layers,
                                  const TransactionGraph& g, bool linear = false);

ForwardResult forward(const DensityMatrix& rho0, std::span<const LayerParams> layers,
                      const TransactionGraph& g, bool linear = false);

QuantumEmbedding read_embedding(const DensityMatrix& rho, const TransactionGraph& g);

/// Single-qubit reduction of every node.
std::vector<DensityMatrix> node_reductions(const DensityMatrix& rho);

/// Sum over pairs of the mutual information S(i) + S(j) - S(ij).
double correlation_entropy(const DensityMatrix& rho, std::span<const NodePair> pairs);

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
double trace_norm(const ComplexMatrix& m);

}  // namespace qtgnn
