#include "qtgnn/quantum_conv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "qtgnn/error.hpp"

namespace qtgnn {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_keys(const TransactionGraph& g, const LayerParams& p) {
  if (p.node.size() != g.node_count()) throw ArgumentError("layer node angles do not match graph");
  const auto pairs = g.edge_pairs();
  if (p.edge.size() != pairs.size()) throw ArgumentError("layer edge angles do not match graph");
  for (const auto& pr : pairs) {
    if (!p.edge.count(pr)) throw ArgumentError("layer missing an edge angle");
  }
  std::size_t tri = 0;
  std::map<NodeTriple, int> seen;
  for (const auto& t : g.triangles) {
    if (seen[{t.i, t.j, t.k}]++ == 0) ++tri;
    if (!p.triangle.count({t.i, t.j, t.k})) throw ArgumentError("layer missing a triangle angle");
  }
  if (p.triangle.size() != tri) throw ArgumentError("layer triangle angles do not match graph");
  auto finite = [](double x) { return std::isfinite(x); };
  bool ok = finite(p.channel_logit);
  for (double v : p.node) ok = ok && finite(v);
  for (const auto& [k, v] : p.edge) ok = ok && finite(v);
  for (const auto& [k, v] : p.triangle) ok = ok && finite(v);
  if (!ok) throw ArgumentError("non-finite layer parameter");
}

double z_sign(std::size_t x, std::size_t mask) { return (x & mask) ? -1.0 : 1.0; }

// Diagonal of the generator in the computational basis.
double generator_diagonal(std::size_t x, std::size_t n, const LayerParams& p) {
  double v = 0.0;
  for (const auto& [pr, theta] : p.edge) {
    v += theta * z_sign(x, qubit_mask(pr.first, n)) * z_sign(x, qubit_mask(pr.second, n));
  }
  for (std::size_t i = 0; i < p.node.size(); ++i) v += p.node[i] * z_sign(x, qubit_mask(i, n));
  for (const auto& [t, psi] : p.triangle) {
    v += psi * z_sign(x, qubit_mask(t[0], n)) * z_sign(x, qubit_mask(t[1], n)) *
         z_sign(x, qubit_mask(t[2], n));
  }
  return v;
}

ComplexMatrix permute_to_sectors(const ComplexMatrix& m, const SectorBasis& basis) {
  const auto d = m.rows();
  ComplexMatrix out(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const auto sc = static_cast<Eigen::Index>(basis.order[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < d; ++r) {
      out(r, c) = m(static_cast<Eigen::Index>(basis.order[static_cast<std::size_t>(r)]), sc);
    }
  }
  return out;
}

ComplexMatrix permute_from_sectors(const ComplexMatrix& m, const SectorBasis& basis) {
  const auto d = m.rows();
  ComplexMatrix out(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const auto sc = static_cast<Eigen::Index>(basis.order[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < d; ++r) {
      out(static_cast<Eigen::Index>(basis.order[static_cast<std::size_t>(r)]), sc) = m(r, c);
    }
  }
  return out;
}

void dephase_in_place(ComplexMatrix& m, double p) {
  if (p == 0.0) return;
  const double keep = 1.0 - p;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r != c) m(r, c) *= keep;
    }
  }
}

}  // namespace

LayerParams LayerParams::zeros(const TransactionGraph& g, double channel_logit) {
  LayerParams p;
  p.node.assign(g.node_count(), 0.0);
  for (const auto& pr : g.edge_pairs()) p.edge[pr] = 0.0;
  for (const auto& t : g.triangles) p.triangle[{t.i, t.j, t.k}] = 0.0;
  p.channel_logit = channel_logit;
  return p;
}

ChannelSpec ChannelSpec::from_logit(double logit) {
  return {Kind::kDephasingMixture, logistic(logit)};
}

const SectorBasis& SectorBasis::get(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) throw CapacityError("register size out of range");
  static std::vector<SectorBasis> cache = [] {
    std::vector<SectorBasis> all(kMaxQubits + 1);
    for (std::size_t n = 1; n <= kMaxQubits; ++n) {
      SectorBasis& b = all[n];
      b.n_qubits = n;
      const std::size_t dim = std::size_t{1} << n;
      b.offsets.assign(n + 1, 0);
      b.sizes.assign(n + 1, 0);
      for (std::size_t w = 0; w <= n; ++w) {
        b.offsets[w] = b.order.size();
        for (std::size_t x = 0; x < dim; ++x) {
          if (static_cast<std::size_t>(std::popcount(x)) == w) b.order.push_back(x);
        }
        b.sizes[w] = b.order.size() - b.offsets[w];
      }
    }
    return all;
  }();
  return cache[n_qubits];
}

UnitaryOperator::UnitaryOperator(std::size_t n_qubits, std::vector<ComplexMatrix> blocks)
    : n_qubits_(n_qubits), blocks_(std::move(blocks)) {
  const auto& basis = SectorBasis::get(n_qubits);
  if (blocks_.size() != basis.sizes.size()) throw ArgumentError("wrong number of sector blocks");
  for (std::size_t w = 0; w < blocks_.size(); ++w) {
    if (static_cast<std::size_t>(blocks_[w].rows()) != basis.sizes[w] ||
        blocks_[w].rows() != blocks_[w].cols()) {
      throw ArgumentError("sector block has the wrong size");
    }
  }
}

ComplexMatrix UnitaryOperator::dense() const {
  const auto& basis = SectorBasis::get(n_qubits_);
  const auto d = static_cast<Eigen::Index>(basis.order.size());
  ComplexMatrix sector = ComplexMatrix::Zero(d, d);
  for (std::size_t w = 0; w < blocks_.size(); ++w) {
    const auto off = static_cast<Eigen::Index>(basis.offsets[w]);
    sector.block(off, off, blocks_[w].rows(), blocks_[w].cols()) = blocks_[w];
  }
  return permute_from_sectors(sector, basis);
}

void UnitaryOperator::conjugate_sector_ordered(ComplexMatrix& m) const {
  const auto& basis = SectorBasis::get(n_qubits_);
  for (std::size_t w = 0; w < blocks_.size(); ++w) {
    const auto off = static_cast<Eigen::Index>(basis.offsets[w]);
    const auto size = static_cast<Eigen::Index>(basis.sizes[w]);
    m.middleRows(off, size) = blocks_[w] * m.middleRows(off, size);
  }
  for (std::size_t w = 0; w < blocks_.size(); ++w) {
    const auto off = static_cast<Eigen::Index>(basis.offsets[w]);
    const auto size = static_cast<Eigen::Index>(basis.sizes[w]);
    m.middleCols(off, size) = m.middleCols(off, size) * blocks_[w].adjoint();
  }
}

DensityMatrix UnitaryOperator::conjugate(const DensityMatrix& rho) const {
  if (rho.qubits() != n_qubits_) throw ArgumentError("state and unitary sizes differ");
  const auto& basis = SectorBasis::get(n_qubits_);
  ComplexMatrix m = permute_to_sectors(rho.matrix(), basis);
  conjugate_sector_ordered(m);
  return DensityMatrix(permute_from_sectors(m, basis));
}

UnitaryOperator build_layer_unitary(const TransactionGraph& g, const LayerParams& p) {
  const std::size_t n = g.node_count();
  if (n == 0 || n > kMaxQubits) throw CapacityError("graph outside the dense register capacity");
  check_keys(g, p);
  const auto& basis = SectorBasis::get(n);
  std::vector<std::size_t> position(basis.order.size());
  for (std::size_t k = 0; k < basis.order.size(); ++k) position[basis.order[k]] = k;

  std::vector<ComplexMatrix> blocks;
  blocks.reserve(basis.sizes.size());
  for (std::size_t w = 0; w < basis.sizes.size(); ++w) {
    const auto size = static_cast<Eigen::Index>(basis.sizes[w]);
    const std::size_t off = basis.offsets[w];
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index a = 0; a < size; ++a) {
      const std::size_t x = basis.order[off + static_cast<std::size_t>(a)];
      gen(a, a) = generator_diagonal(x, n, p);
      // (XX + YY) swaps anti-aligned bits with amplitude 2.
      for (const auto& [pr, theta] : p.edge) {
        const std::size_t mi = qubit_mask(pr.first, n);
        const std::size_t mj = qubit_mask(pr.second, n);
        if (((x & mi) != 0) != ((x & mj) != 0)) {
          const auto b = static_cast<Eigen::Index>(position[x ^ (mi | mj)] - off);
          gen(b, a) += 2.0 * theta;
        }
      }
    }
    if (size == 1) {
      blocks.push_back(ComplexMatrix::Constant(1, 1, std::exp(Complex{0.0, -gen(0, 0)})));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen);
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const ComplexMatrix v = es.eigenvectors().cast<Complex>();
    Eigen::VectorXcd phases(size);
    for (Eigen::Index k = 0; k < size; ++k) phases(k) = std::exp(Complex{0.0, -lambda(k)});
    blocks.push_back(v * phases.asDiagonal() * v.adjoint());
  }
  return UnitaryOperator(n, std::move(blocks));
}

HermitianOperator layer_generator(const TransactionGraph& g, const LayerParams& p) {
  const std::size_t n = g.node_count();
  if (n == 0 || n > kMaxQubits) throw CapacityError("graph outside the dense register capacity");
  check_keys(g, p);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (const auto& [pr, theta] : p.edge) {
    for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) {
      accumulate_pauli(h, n, {theta, {{pr.first, q}, {pr.second, q}}});
    }
  }
  for (std::size_t i = 0; i < n; ++i) accumulate_pauli(h, n, {p.node[i], {{i, Pauli::Z}}});
  for (const auto& [t, psi] : p.triangle) {
    accumulate_pauli(h, n, {psi, {{t[0], Pauli::Z}, {t[1], Pauli::Z}, {t[2], Pauli::Z}}});
  }
  return HermitianOperator(std::move(h), n);
}

DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& c) {
  ComplexMatrix m = rho.matrix();
  dephase_in_place(m, c.strength());
  return DensityMatrix(std::move(m));
}

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, std::span<const LayerParams> layers,
                                  const TransactionGraph& g, bool linear) {
  if (layers.empty()) throw ArgumentError("forward needs at least one layer");
  if (rho0.qubits() != g.node_count()) throw ArgumentError("state does not match graph size");
  const auto& basis = SectorBasis::get(rho0.qubits());
  ComplexMatrix m = permute_to_sectors(rho0.matrix(), basis);
  std::vector<DensityMatrix> states;
  states.reserve(layers.size());
  for (const auto& layer : layers) {
    build_layer_unitary(g, layer).conjugate_sector_ordered(m);
    if (!linear) dephase_in_place(m, ChannelSpec::from_logit(layer.channel_logit).strength());
    states.emplace_back(permute_from_sectors(m, basis));
  }
  return states;
}

ForwardResult forward(const DensityMatrix& rho0, std::span<const LayerParams> layers,
                      const TransactionGraph& g, bool linear) {
  auto states = evolve(rho0, layers, g, linear);
  ForwardResult r{std::move(states.back()), {}};
  r.embedding = read_embedding(r.rho, g);
  return r;
}

std::vector<DensityMatrix> node_reductions(const DensityMatrix& rho) {
  std::vector<DensityMatrix> out;
  out.reserve(rho.qubits());
  for (std::size_t q = 0; q < rho.qubits(); ++q) out.push_back(partial_trace(rho, {q}));
  return out;
}

QuantumEmbedding read_embedding(const DensityMatrix& rho, const TransactionGraph& g) {
  if (rho.qubits() != g.node_count()) throw ArgumentError("state does not match graph size");
  QuantumEmbedding e;
  for (const auto& r : node_reductions(rho)) {
    const Complex off = r(0, 1);
    e.bloch.push_back({2.0 * off.real(), -2.0 * off.imag(), (r(0, 0) - r(1, 1)).real()});
  }
  for (const auto& pr : g.edge_pairs()) e.edge_zz[pr] = expectation_zz(rho, pr.first, pr.second);
  return e;
}

double correlation_entropy(const DensityMatrix& rho, std::span<const NodePair> pairs) {
  const std::size_t n = rho.qubits();
  std::vector<double> single(n, -1.0);
  auto s1 = [&](std::size_t q) {
    if (q >= n) throw ArgumentError("pair references a missing node");
    if (single[q] < 0.0) single[q] = von_neumann_entropy(partial_trace(rho, {q}));
    return single[q];
  };
  double total = 0.0;
  for (const auto& [i, j] : pairs) {
    if (i == j) throw ArgumentError("correlation pair must join distinct nodes");
    total += s1(i) + s1(j) - von_neumann_entropy(partial_trace(rho, {i, j}));
  }
  return total;
}

double trace_norm(const ComplexMatrix& m) {
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
  return ev.cwiseAbs().sum();
}

}  // namespace qtgnn
