#include "qtgnn/quantum_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "qtgnn/error.hpp"

namespace qtgnn {

namespace {

std::size_t log2_exact(std::size_t d) {
  if (d == 0 || !std::has_single_bit(d)) {
    throw ArgumentError("matrix dimension must be a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(d));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw ValidationError("truncated density file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& out, double x) { write_u64(out, std::bit_cast<std::uint64_t>(x)); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

}  // namespace

void accumulate_pauli(ComplexMatrix& m, std::size_t n_qubits, const PauliTerm& term) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::size_t flip = 0;
  for (const auto& [q, p] : term.factors) {
    if (q >= n_qubits) throw ArgumentError("Pauli factor outside the register");
    if (p == Pauli::X || p == Pauli::Y) flip ^= qubit_mask(q, n_qubits);
  }
  for (std::size_t col = 0; col < dim; ++col) {
    Complex phase{term.coefficient, 0.0};
    for (const auto& [q, p] : term.factors) {
      const bool one = (col & qubit_mask(q, n_qubits)) != 0;
      switch (p) {
        case Pauli::Y:
          phase *= one ? Complex{0.0, -1.0} : Complex{0.0, 1.0};
          break;
        case Pauli::Z:
          if (one) phase = -phase;
          break;
        default:
          break;
      }
    }
    m(static_cast<Eigen::Index>(col ^ flip), static_cast<Eigen::Index>(col)) += phase;
  }
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix, std::size_t n_qubits)
    : matrix_(std::move(matrix)), n_qubits_(n_qubits) {
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != (std::size_t{1} << n_qubits)) {
    throw ArgumentError("operator dimension does not match qubit count");
  }
}

double HermitianOperator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd HermitianOperator::eigenvalues() const {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(matrix_, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw ArgumentError("density matrix must be square");
  n_qubits_ = log2_exact(static_cast<std::size_t>(matrix_.rows()));
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw ArgumentError("zero state vector");
  const ComplexVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(matrix_, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

PhysicalityReport DensityMatrix::check() const {
  PhysicalityReport r;
  r.trace_error = std::abs(matrix_.trace() - Complex{1.0, 0.0});
  r.hermiticity_error = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  r.min_eigenvalue = eigenvalues().minCoeff();
  return r;
}

HermitianOperator build_hamiltonian(const TransactionGraph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) throw ArgumentError("graph has no nodes");
  if (n > kMaxQubits) {
    throw CapacityError("graph has " + std::to_string(n) + " nodes; at most " +
                        std::to_string(kMaxQubits) + " fit the dense register, sample_subgraph first");
  }
  g.validate();
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (const auto& e : g.edges) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      accumulate_pauli(h, n, {e.weight, {{e.src, p}, {e.dst, p}}});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (g.node_bias[i] != 0.0) accumulate_pauli(h, n, {g.node_bias[i], {{i, Pauli::Z}}});
  }
  for (const auto& t : g.triangles) {
    accumulate_pauli(h, n, {t.weight, {{t.i, Pauli::Z}, {t.j, Pauli::Z}, {t.k, Pauli::Z}}});
  }
  return HermitianOperator(std::move(h), n);
}

EncodedState encode_state(const TransactionGraph& g, const EncodingParams& p) {
  const std::size_t n = g.node_count();
  if (n == 0) throw ArgumentError("graph has no nodes");
  if (n > kMaxQubits) {
    throw CapacityError("graph has " + std::to_string(n) + " nodes; at most " +
                        std::to_string(kMaxQubits) + " fit the dense register, sample_subgraph first");
  }
  if (!std::isfinite(p.theta_e)) throw ArgumentError("theta_e must be finite");
  g.validate();

  // Register: n data qubits followed by one environment qubit (least significant bit).
  const std::size_t total = n + 1;
  const std::size_t dim = std::size_t{1} << total;
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  std::vector<double> c(n), s(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double half = std::numbers::pi * g.node_bias[q] / 2.0;
    c[q] = std::cos(half);
    s[q] = std::sin(half);
  }
  for (std::size_t x = 0; x < dim; x += 2) {
    double amp = 1.0;
    for (std::size_t q = 0; q < n; ++q) amp *= (x & qubit_mask(q, total)) ? s[q] : c[q];
    psi(static_cast<Eigen::Index>(x)) = amp;
  }

  std::vector<Edge> order = g.edges;
  std::sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst, a.timestamp, a.weight) <
           std::tie(b.src, b.dst, b.timestamp, b.weight);
  });
  for (const auto& e : order) {
    const double angle = p.theta_e * e.weight;
    if (angle == 0.0) continue;
    const std::size_t flip = qubit_mask(e.src, total) | qubit_mask(e.dst, total);
    const Complex cs{std::cos(angle), 0.0};
    const Complex sn{0.0, -std::sin(angle)};
    ComplexVector next(psi.size());
    for (std::size_t x = 0; x < dim; ++x) {
      next(static_cast<Eigen::Index>(x)) =
          cs * psi(static_cast<Eigen::Index>(x)) + sn * psi(static_cast<Eigen::Index>(x ^ flip));
    }
    psi.swap(next);
  }

  // CX from every data qubit onto the environment, last one ending the cascade.
  const std::size_t env = qubit_mask(n, total);
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t control = qubit_mask(q, total);
    for (std::size_t x = 0; x < dim; ++x) {
      if ((x & control) && !(x & env)) {
        std::swap(psi(static_cast<Eigen::Index>(x)), psi(static_cast<Eigen::Index>(x | env)));
      }
    }
  }

  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (std::size_t a = 0; a < 2; ++a) {
    ComplexVector branch(d);
    for (Eigen::Index x = 0; x < d; ++x) branch(x) = psi(2 * x + static_cast<Eigen::Index>(a));
    rho.noalias() += branch * branch.adjoint();
  }
  return {DensityMatrix(std::move(rho)), g.nodes};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const std::size_t m = rho.qubits();
  if (keep.empty()) throw ArgumentError("partial_trace needs at least one kept qubit");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end() || kept.back() >= m) {
    throw ArgumentError("kept qubits must be distinct and inside the register");
  }
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < m; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }
  auto scatter = [&](const std::vector<std::size_t>& qubits) {
    const std::size_t k = qubits.size();
    std::vector<std::size_t> table(std::size_t{1} << k, 0);
    for (std::size_t local = 0; local < table.size(); ++local) {
      for (std::size_t b = 0; b < k; ++b) {
        if (local & qubit_mask(b, k)) table[local] |= qubit_mask(qubits[b], m);
      }
    }
    return table;
  };
  const auto keep_idx = scatter(kept);
  const auto trace_idx = scatter(traced);
  const auto d = static_cast<Eigen::Index>(keep_idx.size());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  const ComplexMatrix& full = rho.matrix();
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      Complex acc{0.0, 0.0};
      for (std::size_t t : trace_idx) {
        acc += full(static_cast<Eigen::Index>(keep_idx[r] | t),
                    static_cast<Eigen::Index>(keep_idx[c] | t));
      }
      out(r, c) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::VectorXd ev = rho.eigenvalues();
  double s = 0.0;
  for (double lambda : ev) {
    if (lambda > 1e-12) s -= lambda * std::log(lambda);
  }
  return s;
}

double expectation_zz(const DensityMatrix& rho, std::size_t i, std::size_t j) {
  const std::size_t n = rho.qubits();
  const std::size_t mi = qubit_mask(i, n);
  const std::size_t mj = qubit_mask(j, n);
  double acc = 0.0;
  for (std::size_t x = 0; x < rho.dim(); ++x) {
    const double sign = (((x & mi) != 0) != ((x & mj) != 0)) ? -1.0 : 1.0;
    acc += sign * rho(x, x).real();
  }
  return acc;
}

void write_density_binary(std::ostream& out, const DensityMatrix& rho) {
  write_u64(out, rho.qubits());
  const ComplexMatrix& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      write_f64(out, m(r, c).real());
      write_f64(out, m(r, c).imag());
    }
  }
}

DensityMatrix read_density_binary(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  if (n > kMaxQubits + 1) throw ValidationError("density file qubit count too large");
  const auto d = static_cast<Eigen::Index>(std::uint64_t{1} << n);
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const double re = read_f64(in);
      const double im = read_f64(in);
      m(r, c) = Complex{re, im};
    }
  }
  return DensityMatrix(std::move(m));
}

}  // namespace qtgnn
