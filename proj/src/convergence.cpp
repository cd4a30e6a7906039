#include "qtgnn/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "qtgnn/error.hpp"
#include "qtgnn/rng.hpp"

namespace qtgnn {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t t = i; t < j; ++t) rank[order[t]] = r;
    i = j;
  }
  return rank;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

DensityMatrix random_state(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix a(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) a(r, c) = Complex{rng.normal(), rng.normal()};
  }
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix((rho + rho.adjoint()) / 2.0);
}

ComplexVector random_pure(std::size_t dim, Rng& rng) {
  ComplexVector psi(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = Complex{rng.normal(), rng.normal()};
  return psi / psi.norm();
}

// Sum of values[a..b).
double increment(const std::vector<double>& values, std::size_t a, std::size_t b) {
  return std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(a),
                         values.begin() + static_cast<std::ptrdiff_t>(b), 0.0);
}

double quarter_ratio(const std::vector<double>& values) {
  const std::size_t q = values.size() / 4;
  const double first = increment(values, 0, q);
  const double last = increment(values, values.size() - q, values.size());
  if (first == 0.0) return last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return last / first;
}

}  // namespace

std::string_view to_string(InitKind k) {
  return k == InitKind::kRandom ? "random" : "identity_proximal";
}

InitKind init_kind_from_string(std::string_view s) {
  if (s == "random") return InitKind::kRandom;
  if (s == "identity_proximal") return InitKind::kIdentityProximal;
  throw ConfigError("unknown init '" + std::string(s) + "'");
}

TransactionGraph scan_graph() {
  GraphBuilder b;
  b.add_edge("a", "b", 3.0, 0);
  b.add_edge("b", "c", 1.0, 1);
  b.add_edge("c", "d", 2.0, 2);
  b.add_edge("d", "e", 4.0, 3);
  b.add_edge("e", "f", 1.5, 4);
  b.add_edge("f", "a", 2.5, 5);
  b.add_edge("a", "d", 1.0, 6);
  b.add_triangle("b", "c", "e", 1.0, 7);
  return preprocess(b.finish(), PreprocessConfig{});
}

std::vector<VarianceRow> barren_plateau_scan(std::span<const std::size_t> depths, std::size_t n_trials,
                                             InitKind init, std::uint64_t seed, double channel_p) {
  if (n_trials < 2) throw ArgumentError("variance needs at least two trials");
  if (!(channel_p >= 0.0 && channel_p < 1.0)) throw ArgumentError("channel strength must lie in [0, 1)");
  const TransactionGraph g = scan_graph();
  const ComplexMatrix h = build_hamiltonian(g).matrix();
  const DensityMatrix rho0 = encode_state(g, {std::numbers::pi / 4}).rho;
  const NodePair target = g.edge_pairs().front();
  const double logit = channel_p == 0.0 ? -745.0 : std::log(channel_p / (1.0 - channel_p));
  const double spread = init == InitKind::kRandom ? std::numbers::pi : 0.1;
  constexpr double kStep = 1e-4;

  std::vector<VarianceRow> rows;
  for (std::size_t depth : depths) {
    if (depth < 1 || depth > 12) throw ArgumentError("depth must lie in [1, 12]");
    const std::size_t mid = (depth - 1) / 2;
    std::vector<double> grads;
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
      Rng rng(derive_seed(seed, to_string(init), depth * 1000003 + trial));
      std::vector<LayerParams> layers(depth, LayerParams::zeros(g, logit));
      for (auto& l : layers) {
        for (auto& [k, v] : l.edge) v = rng.uniform(-spread, spread);
        for (auto& v : l.node) v = rng.uniform(-spread, spread);
        for (auto& [k, v] : l.triangle) v = rng.uniform(-spread, spread);
      }
      auto cost = [&](double shift) {
        auto moved = layers;
        moved[mid].edge[target] += shift;
        const auto out = forward(rho0, moved, g);
        return (h * out.rho.matrix()).trace().real();
      };
      grads.push_back((cost(kStep) - cost(-kStep)) / (2.0 * kStep));
    }
    const double n = static_cast<double>(grads.size());
    const double mean = std::accumulate(grads.begin(), grads.end(), 0.0) / n;
    double var = 0.0;
    for (double v : grads) var += (v - mean) * (v - mean);
    rows.push_back({depth, mean, var / (n - 1.0)});
  }
  return rows;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw ArgumentError("spearman needs two equal samples of size >= 3");
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  SpearmanResult r;
  r.rho = pearson(rx, ry);
  const std::size_t n = x.size();
  if (n <= 9) {
    std::sort(ry.begin(), ry.end());
    std::size_t extreme = 0, total = 0;
    do {
      ++total;
      if (std::abs(pearson(rx, ry)) >= std::abs(r.rho) - 1e-12) ++extreme;
    } while (std::next_permutation(ry.begin(), ry.end()));
    r.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  } else {
    const double z = std::abs(r.rho) * std::sqrt(static_cast<double>(n) - 1.0);
    r.p_value = std::erfc(z / std::sqrt(2.0));
  }
  return r;
}

ContractivityReport contractivity_check(const TransactionGraph& g, const LayerParams& layer, double p,
                                        std::size_t n_pairs, std::uint64_t seed, std::size_t iterations) {
  if (n_pairs < 100) throw ArgumentError("contractivity needs at least 100 pairs");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("channel strength must lie in [0, 1]");
  const UnitaryOperator u = build_layer_unitary(g, layer);
  const ChannelSpec channel{ChannelSpec::Kind::kDephasingMixture, p};
  auto step = [&](const DensityMatrix& x) { return apply_channel(u.conjugate(x), channel); };
  const std::size_t dim = std::size_t{1} << g.node_count();
  Rng rng(derive_seed(seed, "contractivity"));

  ContractivityReport r;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const DensityMatrix x = random_state(dim, rng);
    const DensityMatrix y = random_state(dim, rng);
    const double before = trace_norm(x.matrix() - y.matrix());
    const double after = trace_norm(step(x).matrix() - step(y).matrix());
    r.max_random_ratio = std::max(r.max_random_ratio, after / before);
  }
  // Pairs whose images under the unitary differ only off the diagonal.
  const ComplexMatrix dense = u.dense();
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const ComplexVector psi = random_pure(dim, rng);
    const ComplexMatrix a = psi * psi.adjoint();
    const ComplexMatrix b = ComplexMatrix(a.diagonal().asDiagonal());
    const DensityMatrix x(dense.adjoint() * a * dense);
    const DensityMatrix y(dense.adjoint() * b * dense);
    const double before = trace_norm(x.matrix() - y.matrix());
    const double after = trace_norm(step(x).matrix() - step(y).matrix());
    r.max_offdiag_ratio = std::max(r.max_offdiag_ratio, after / before);
  }
  r.alpha_hat = std::max(r.max_random_ratio, r.max_offdiag_ratio);

  DensityMatrix x = random_state(dim, rng);
  DensityMatrix y = random_state(dim, rng);
  r.gaps.push_back(trace_norm(x.matrix() - y.matrix()));
  for (std::size_t t = 0; t < iterations; ++t) {
    x = step(x);
    y = step(y);
    r.gaps.push_back(trace_norm(x.matrix() - y.matrix()));
    if (r.gaps[t] > 0.0) r.alpha_hat = std::max(r.alpha_hat, r.gaps[t + 1] / r.gaps[t]);
  }
  r.bounded = r.alpha_hat <= 1.0 + 1e-9;
  r.offdiag_contracts = r.max_offdiag_ratio < 1.0;
  r.geometric = true;
  for (std::size_t t = 0; t < r.gaps.size(); ++t) {
    const double bound = std::pow(r.alpha_hat, static_cast<double>(t)) * r.gaps[0] * (1.0 + 1e-6);
    if (r.gaps[t] > bound) r.geometric = false;
  }
  return r;
}

StabilityReport stability_check(const DistanceMatrix& base, double delta, std::size_t n_trials,
                                std::uint64_t seed, int max_dim) {
  if (!(delta > 0.0 && delta <= 0.1)) throw ArgumentError("delta must lie in (0, 0.1]");
  base.validate();
  const auto n = static_cast<Eigen::Index>(base.size());
  const double window = base.d.maxCoeff() + 2.0 * delta + 1.0;
  const PersistenceDiagram d0 = persistence(vietoris_rips(base, kInfinity, max_dim)).truncated(window);
  Rng rng(derive_seed(seed, "stability"));
  StabilityReport r;
  r.delta = delta;
  r.passed = true;
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    DistanceMatrix moved = base;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = std::max(0.0, base.d(i, j) + rng.uniform(-delta, delta));
        moved.d(i, j) = moved.d(j, i) = v;
      }
    }
    const PersistenceDiagram d1 = persistence(vietoris_rips(moved, kInfinity, max_dim)).truncated(window);
    double worst = 0.0;
    for (int k = 0; k <= max_dim; ++k) worst = std::max(worst, bottleneck_distance(d0, d1, k));
    r.distances.push_back(worst);
    if (worst / delta > r.max_ratio) {
      r.max_ratio = worst / delta;
      r.worst_trial = trial;
    }
    if (worst > delta + 1e-9) r.passed = false;
  }
  return r;
}

DescentReport descent_check(std::span<const TrainStep> trace) {
  if (trace.size() < 50) throw InsufficientDataError("descent check needs at least 50 steps");
  std::vector<double> eta, eta_sq, weighted;
  for (const auto& s : trace) {
    eta.push_back(s.eta);
    eta_sq.push_back(s.eta * s.eta);
    weighted.push_back(s.eta * s.grad_norm * s.grad_norm);
  }
  DescentReport r;
  r.eta_sq_ratio = quarter_ratio(eta_sq);
  r.gradient_sum_ratio = quarter_ratio(weighted);

  // Least-squares slope of log(sum eta) against log(t + 1) on the second half.
  std::vector<double> lx, ly;
  double running = 0.0;
  for (std::size_t t = 0; t < eta.size(); ++t) {
    running += eta[t];
    if (t >= eta.size() / 2 && running > 0.0) {
      lx.push_back(std::log(static_cast<double>(t) + 1.0));
      ly.push_back(std::log(running));
    }
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  r.eta_sum_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  r.eta_sum_diverging = r.eta_sum_slope >= 0.25;
  r.eta_sq_converging = r.eta_sq_ratio < 1.0 - 1e-9;
  r.sublinear = r.gradient_sum_ratio < 1.0;
  return r;
}

PlReport pl_demo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge, std::size_t steps) {
  if (x.rows() != y.size() || x.rows() == 0) throw ArgumentError("design and targets disagree");
  if (!(ridge > 0.0)) throw ArgumentError("ridge must be positive");
  const double n = static_cast<double>(x.rows());
  const Eigen::MatrixXd gram = x.transpose() * x / n + ridge * Eigen::MatrixXd::Identity(x.cols(), x.cols());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  PlReport r;
  r.mu = ev.minCoeff();
  r.smoothness = ev.maxCoeff();
  const Eigen::VectorXd rhs = x.transpose() * y / n;
  const Eigen::VectorXd w_star = gram.ldlt().solve(rhs);
  auto f = [&](const Eigen::VectorXd& w) {
    return (x * w - y).squaredNorm() / (2.0 * n) + ridge / 2.0 * w.squaredNorm();
  };
  const double f_star = f(w_star);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  const double rate = 1.0 - r.mu / r.smoothness;
  const double floor = 1e-13 * std::max(1.0, std::abs(f_star));
  r.geometric = true;
  for (std::size_t t = 0; t <= steps; ++t) {
    r.gaps.push_back(std::max(0.0, f(w) - f_star));
    const double bound = std::pow(rate, static_cast<double>(t)) * r.gaps.front() * (1.0 + 1e-9) + floor;
    if (r.gaps.back() > bound) r.geometric = false;
    w -= (gram * w - rhs) / r.smoothness;
  }
  return r;
}

SmoothnessReport estimate_smoothness(std::span<const BatchItem> data, const ModelParams& p,
                                     const NormalReference& snapshot, const TrainConfig& cfg,
                                     std::size_t n_pairs, double radius, std::size_t batch_size,
                                     std::uint64_t seed) {
  if (data.empty() || n_pairs == 0 || batch_size == 0) throw ArgumentError("smoothness needs data and pairs");
  Rng rng(derive_seed(seed, "smoothness"));
  SmoothnessReport r;
  const auto g_full = gradient(data, p, snapshot, cfg);
  auto as_vec = [](const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); };
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Eigen::VectorXd dir(static_cast<Eigen::Index>(p.values.size()));
    for (Eigen::Index j = 0; j < dir.size(); ++j) dir(j) = rng.normal();
    dir *= radius / (2.0 * dir.norm());
    ModelParams a = p, b = p;
    for (Eigen::Index j = 0; j < dir.size(); ++j) {
      a.values[static_cast<std::size_t>(j)] += dir(j);
      b.values[static_cast<std::size_t>(j)] -= dir(j);
    }
    const auto ga = gradient(data, a, snapshot, cfg);
    const auto gb = gradient(data, b, snapshot, cfg);
    r.lipschitz = std::max(r.lipschitz, (as_vec(ga) - as_vec(gb)).norm() / radius);

    std::vector<BatchItem> batch;
    for (std::size_t k = 0; k < std::min(batch_size, data.size()); ++k) batch.push_back(data[rng.index(data.size())]);
    const auto gbatch = gradient(batch, p, snapshot, cfg);
    r.noise += (as_vec(gbatch) - as_vec(g_full)).squaredNorm() / static_cast<double>(n_pairs);
  }
  return r;
}

}  // namespace qtgnn
