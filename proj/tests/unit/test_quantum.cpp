#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "../support.hpp"
#include "qtgnn/error.hpp"
#include "qtgnn/quantum_conv.hpp"
#include "qtgnn/quantum_state.hpp"
#include "qtgnn/topology.hpp"

using namespace qtgnn;

namespace {

DensityMatrix bell() {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure(psi);
}

DensityMatrix qubit_from_bloch(const double r[3]) {
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + r[2]);
  m(1, 1) = 0.5 * (1.0 - r[2]);
  m(0, 1) = Complex(0.5 * r[0], -0.5 * r[1]);
  m(1, 0) = Complex(0.5 * r[0], 0.5 * r[1]);
  return DensityMatrix(m);
}

}  // namespace

TEST_CASE("density matrix construction") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(3, 3) / 3.0), ArgumentError);
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(2, 4)), ArgumentError);
  const auto mixed = DensityMatrix::maximally_mixed(3);
  CHECK(mixed.qubits() == 3);
  CHECK(mixed.purity() == doctest::Approx(1.0 / 8.0));
  CHECK(mixed.check().ok());
}

TEST_CASE("entropy and correlation values") {
  qtgnn::Rng rng(1);
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::from_pure(test::random_pure(3, rng)))) <= 1e-9);
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::maximally_mixed(2)) - std::log(4.0)) <= 1e-9);

  const std::vector<NodePair> pair{{0, 1}};
  CHECK(std::abs(correlation_entropy(bell(), pair) - 2.0 * std::log(2.0)) <= 1e-9);
  const ComplexVector a = test::random_pure(1, rng), b = test::random_pure(1, rng);
  ComplexVector prod(4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) prod(2 * i + j) = a(i) * b(j);
  }
  CHECK(std::abs(correlation_entropy(DensityMatrix::from_pure(prod), pair)) <= 1e-9);

  for (int t = 0; t < 50; ++t) {
    const auto rho = test::random_mixed(3, rng);
    const std::vector<NodePair> pairs{{0, 1}, {0, 2}, {1, 2}};
    CHECK(correlation_entropy(rho, pairs) >= -1e-9);
  }
}

TEST_CASE("partial trace") {
  const auto reduced = partial_trace(bell(), {0});
  CHECK(test::max_abs(reduced.matrix() - ComplexMatrix::Identity(2, 2) / 2.0) <= 1e-12);
  qtgnn::Rng rng(2);
  const auto rho = test::random_mixed(4, rng);
  const auto r13 = partial_trace(rho, {1, 3});
  CHECK(r13.qubits() == 2);
  CHECK(r13.check().ok());
  // tracing in two steps agrees with tracing at once
  const auto r123 = partial_trace(rho, {1, 2, 3});
  CHECK(test::max_abs(partial_trace(r123, {0, 2}).matrix() - r13.matrix()) <= 1e-12);
}

TEST_CASE("encoding yields physical states") {
  qtgnn::Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    const auto g = test::random_graph(2 + rng.index(6), rng);
    const auto enc = encode_state(g, {rng.uniform(0.0, 3.0)});
    CHECK(enc.rho.qubits() == g.node_count());
    CHECK(enc.qubit_ids == g.nodes);
    CHECK(enc.rho.check().ok());
  }
  CHECK(build_hamiltonian(test::random_graph(4, rng)).hermiticity_error() <= 1e-12);
}

TEST_CASE("layer unitaries and channels") {
  qtgnn::Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto g = test::random_graph(2 + rng.index(5), rng);
    const auto layer = test::random_layer(g, rng);
    const auto u = build_layer_unitary(g, layer);
    const ComplexMatrix dense = u.dense();
    const auto dim = dense.rows();
    CHECK(test::max_abs(dense.adjoint() * dense - ComplexMatrix::Identity(dim, dim)) <= 1e-10);

    // the block form agrees with exponentiating the dense generator
    const auto gen = layer_generator(g, layer);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gen.matrix());
    const ComplexVector phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -1.0)).array().exp();
    const ComplexMatrix expected = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    CHECK(test::max_abs(expected - dense) <= 1e-9);

    const auto rho = encode_state(g, {0.8}).rho;
    const auto out = apply_channel(u.conjugate(rho), ChannelSpec::from_logit(layer.channel_logit));
    CHECK(out.check().ok());
  }
}

TEST_CASE("dephasing channel") {
  const auto rho = bell();
  const auto half = apply_channel(rho, {ChannelSpec::Kind::kDephasingMixture, 0.5});
  CHECK(std::abs(half(0, 3) - Complex(0.25, 0.0)) <= 1e-12);
  CHECK(std::abs(half(0, 0) - Complex(0.5, 0.0)) <= 1e-12);
  const auto same = apply_channel(rho, ChannelSpec::identity());
  CHECK(test::max_abs(same.matrix() - rho.matrix()) == 0.0);
  const double p = ChannelSpec::from_logit(0.0).strength();
  CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("forward pass and embedding") {
  qtgnn::Rng rng(5);
  const auto g = test::random_graph(5, rng);
  std::vector<LayerParams> layers{test::random_layer(g, rng), test::random_layer(g, rng)};
  const auto rho0 = encode_state(g, {0.6}).rho;
  const auto res = forward(rho0, layers, g);
  CHECK(res.rho.check().ok());
  CHECK(res.embedding.bloch.size() == 5);
  CHECK(res.embedding.edge_zz.size() == g.edge_pairs().size());
  for (const auto& [pair, zz] : res.embedding.edge_zz) {
    CHECK(zz == doctest::Approx(expectation_zz(res.rho, pair.first, pair.second)).epsilon(1e-12));
  }
  const auto steps = evolve(rho0, layers, g);
  REQUIRE(steps.size() == 2);
  CHECK(test::max_abs(steps.back().matrix() - res.rho.matrix()) == 0.0);
  // the linear ablation keeps purity
  const auto lin = forward(rho0, layers, g, true);
  CHECK(lin.rho.purity() == doctest::Approx(rho0.purity()).epsilon(1e-10));
}

TEST_CASE("binary density round trip") {
  qtgnn::Rng rng(6);
  const auto rho = test::random_mixed(3, rng);
  std::stringstream buf;
  write_density_binary(buf, rho);
  CHECK(buf.str().size() == 8 + 64 * 16);
  const auto back = read_density_binary(buf);
  CHECK(test::max_abs(back.matrix() - rho.matrix()) == 0.0);
}

TEST_CASE("fidelity distance matches the closed form") {
  qtgnn::Rng rng(7);
  const auto w = WeightMatrix::identity(2);
  for (int t = 0; t < 100; ++t) {
    double r[3], s[3];
    for (double* v : {r, s}) {
      double n = 0.0;
      for (int k = 0; k < 3; ++k) n += (v[k] = rng.normal()) * v[k];
      const double len = rng.uniform() / std::sqrt(n);
      for (int k = 0; k < 3; ++k) v[k] *= len;
    }
    const auto a = qubit_from_bloch(r), b = qubit_from_bloch(s);
    CHECK(std::abs(weighted_fidelity(a, b, w) - oracle::qubit_fidelity(r, s)) <= 1e-8);
  }
  std::vector<DensityMatrix> states;
  for (int t = 0; t < 6; ++t) states.push_back(test::random_mixed(1, rng, 2));
  const auto d = distance_matrix(states, w);
  CHECK_NOTHROW(d.validate());
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(d(i, j) - d(j, i)) <= 1e-10);
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(WeightMatrix{bad}, ArgumentError);
}
