#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qtgnn/anomaly.hpp"
#include "qtgnn/graph.hpp"
#include "qtgnn/quantum_conv.hpp"
#include "qtgnn/topology.hpp"

namespace qtgnn {

enum class InitKind { kRandom, kIdentityProximal };

std::string_view to_string(InitKind k);
InitKind init_kind_from_string(std::string_view s);

/// Fixed six-account graph used by the depth scans.
TransactionGraph scan_graph();

struct VarianceRow {
  std::size_t depth = 0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Gradient variance of <H(G)> with respect to one edge angle of the
/// middle layer, over random parameter draws, for each circuit depth.
std::vector<VarianceRow> barren_plateau_scan(std::span<const std::size_t> depths, std::size_t n_trials,
                                             InitKind init, std::uint64_t seed, double channel_p = 0.25);

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided
};

/// Rank correlation with average ranks for ties. The p-value is exact by
/// enumeration for n <= 9 and uses a normal approximation otherwise.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

struct ContractivityReport {
  double alpha_hat = 0.0;         // largest observed contraction ratio
  double max_random_ratio = 0.0;  // over random state pairs
  double max_offdiag_ratio = 0.0; // over pairs differing off the diagonal after the unitary
  std::vector<double> gaps;       // trace distance of two iterate sequences
  bool bounded = false;           // alpha_hat <= 1 + 1e-9
  bool offdiag_contracts = false; // max_offdiag_ratio < 1
  bool geometric = false;         // gap_t <= alpha_hat^t gap_0 (1 + 1e-6)
  bool passed() const { return bounded && geometric; }
};

ContractivityReport contractivity_check(const TransactionGraph& g, const LayerParams& layer, double p,
                                        std::size_t n_pairs, std::uint64_t seed, std::size_t iterations = 30);

struct StabilityReport {
  double delta = 0.0;
  std::vector<double> distances;  // bottleneck distance of each trial, max over dimensions
  double max_ratio = 0.0;         // max distance / delta
  bool passed = false;            // every distance <= delta + 1e-9
  std::size_t worst_trial = 0;
};

StabilityReport stability_check(const DistanceMatrix& base, double delta, std::size_t n_trials,
                                std::uint64_t seed, int max_dim = 1);

struct DescentReport {
  double eta_sum_slope = 0.0;      // log-log slope of the running sum of eta over the second half
  double eta_sq_ratio = 0.0;       // last-quarter / first-quarter increment of the sum of eta^2
  double gradient_sum_ratio = 0.0; // same ratio for the sum of eta |grad|^2
  bool eta_sum_diverging = false;
  bool eta_sq_converging = false;
  bool sublinear = false;
  bool passed() const { return eta_sum_diverging && eta_sq_converging && sublinear; }
};

/// Throws InsufficientDataError for traces shorter than 50 steps.
DescentReport descent_check(std::span<const TrainStep> trace);

struct PlReport {
  double mu = 0.0;
  double smoothness = 0.0;
  std::vector<double> gaps;  // f(w_t) - f*
  bool geometric = false;    // gap_t <= (1 - mu / L)^t gap_0 (1 + 1e-9)
};

/// Gradient descent with step 1/L on the ridge least-squares problem
/// (1/2n)|Xw - y|^2 + (ridge/2)|w|^2, where mu and L come from the Gram matrix.
PlReport pl_demo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge, std::size_t steps);

struct SmoothnessReport {
  double lipschitz = 0.0;  // max |grad(a) - grad(b)| / |a - b|
  double noise = 0.0;      // mean |g_batch - g_full|^2
};

/// Empirical gradient Lipschitz constant around `p` and minibatch gradient
/// noise relative to the full-data gradient.
SmoothnessReport estimate_smoothness(std::span<const BatchItem> data, const ModelParams& p,
                                     const NormalReference& snapshot, const TrainConfig& cfg,
                                     std::size_t n_pairs, double radius, std::size_t batch_size,
                                     std::uint64_t seed);

}  // namespace qtgnn
