#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtgnn/graph.hpp"

namespace qtgnn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Largest register (one qubit per account) held as a dense matrix.
inline constexpr std::size_t kMaxQubits = 12;

/// Bit mask of qubit q in an n-qubit basis index. Qubit 0 is the leftmost
/// Kronecker factor, i.e. the most significant bit.
inline std::size_t qubit_mask(std::size_t q, std::size_t n) { return std::size_t{1} << (n - 1 - q); }

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

/// Pauli word with a real coefficient, acting on explicit qubit positions.
struct PauliTerm {
  double coefficient = 0.0;
  std::vector<std::pair<std::size_t, Pauli>> factors;
};

/// Adds coefficient * P to `m` without forming Kronecker products.
void accumulate_pauli(ComplexMatrix& m, std::size_t n_qubits, const PauliTerm& term);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  HermitianOperator(ComplexMatrix matrix, std::size_t n_qubits);

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  /// Largest |H - H^dagger| entry.
  double hermiticity_error() const;
  Eigen::VectorXd eigenvalues() const;

 private:
  ComplexMatrix matrix_;
  std::size_t n_qubits_ = 0;
};

struct PhysicalityReport {
  double trace_error = 0.0;        // |Tr(rho) - 1|
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double min_eigenvalue = 0.0;

  bool ok(double trace_tol = 1e-10, double herm_tol = 1e-12, double eig_tol = 1e-10) const {
    return trace_error <= trace_tol && hermiticity_error <= herm_tol && min_eigenvalue >= -eig_tol;
  }
};

/// Positive semidefinite, unit trace operator on an m-qubit register.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Throws ArgumentError unless the matrix is square with a power-of-two size.
  explicit DensityMatrix(ComplexMatrix matrix);

  static DensityMatrix from_pure(const ComplexVector& psi);
  static DensityMatrix maximally_mixed(std::size_t n_qubits);

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  Complex operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }
  double purity() const;
  Eigen::VectorXd eigenvalues() const;
  PhysicalityReport check() const;

 private:
  ComplexMatrix matrix_;
  std::size_t n_qubits_ = 0;
};

struct EncodingParams {
  double theta_e = 0.0;
};

/// Encoded graph state together with the account id behind each qubit.
struct EncodedState {
  DensityMatrix rho;
  std::vector<std::string> qubit_ids;
};

/// H(G) = sum_E w (XX + YY + ZZ) + sum_V alpha Z + sum_Delta gamma ZZZ.
HermitianOperator build_hamiltonian(const TransactionGraph& g);

/// Product state from the node biases, XX entanglers with angle
/// theta_e * w per edge, then a parity ancilla that is traced out.
EncodedState encode_state(const TransactionGraph& g, const EncodingParams& p);

/// Reduced state on the sorted `keep` qubits.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep);

/// Natural-log entropy over eigenvalues above 1e-12.
double von_neumann_entropy(const DensityMatrix& rho);

/// Expectation of Z_i Z_j in the computational basis.
double expectation_zz(const DensityMatrix& rho, std::size_t i, std::size_t j);

/// 8-byte little-endian qubit count, then row-major (re, im) float64 pairs.
void write_density_binary(std::ostream& out, const DensityMatrix& rho);
DensityMatrix read_density_binary(std::istream& in);

}  // namespace qtgnn
