#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qtgnn/features.hpp"
#include "qtgnn/graph.hpp"
#include "qtgnn/topology.hpp"

namespace qtgnn {

enum class Schedule { kAdaptive, kDecay, kConstant };

std::string_view to_string(Schedule s);
Schedule schedule_from_string(std::string_view s);

struct TrainConfig {
  double lambda1 = 1.0;
  double lambda2 = 1e-3;
  double eta0 = 0.05;
  double sigma = 1.0;  // kernel bandwidth
  double delta = 0.5;  // hypothesis-test threshold
  std::optional<double> tau;  // decision threshold; calibrated when unset
  double tau_quantile = 0.99;
  double alpha = 1.0;  // landscape weight in the score
  double beta = 1.0;   // W2 weight in the score
  std::size_t t_max = 200;
  double eps_conv = 1e-6;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::kAdaptive;
  std::size_t batch_size = 8;
  std::size_t refresh_every = 25;  // steps between reference snapshots
  std::size_t snapshot_size = 64;  // normals used by a training snapshot
  std::size_t max_reference = 0;   // 0 keeps every training normal
  double fd_step = 1e-4;
  double theta_e_init = 0.7853981633974483;
  double channel_logit_init = -2.0;
  double init_scale = 0.1;  // angles start uniform in (-init_scale, init_scale)
  FeatureConfig features;

  bool operator==(const TrainConfig&) const = default;
  void validate() const;
};

/// Training normals in feature space, with their landscapes and the
/// reference diagram D_normal.
struct NormalReference {
  std::vector<FeatureVector> members;
  std::vector<std::vector<LandscapeFunction>> landscapes;  // per member, per dimension
  PersistenceDiagram d_normal;
  FeatureVector centroid;

  bool empty() const { return members.empty(); }
};

/// W2 medoid of `diagrams`: the member with the smallest summed squared
/// distance to the others.
PersistenceDiagram medoid_diagram(std::span<const PersistenceDiagram> diagrams);

NormalReference build_reference(std::span<const TransactionGraph* const> normals, const ModelParams& p,
                                const FeatureConfig& cfg);

/// min over the reference of exp(-|phi - phi'|^2 / sigma^2).
double kernel_similarity(const FeatureVector& phi, const NormalReference& ref, double sigma);

enum class Hypothesis { kH0, kH1 };

/// H0 (normal) iff the kernel similarity is at least delta.
Hypothesis hypothesis_test(const FeatureVector& phi, const NormalReference& ref, double delta,
                           double sigma = 1.0);

struct Example {
  FeatureVector phi;
  int label = 0;
};

struct LossTerms {
  double total = 0.0;
  double sup = 0.0;
  double unsup = 0.0;
  double reg = 0.0;
};

double head_logit(const FeatureVector& phi, const ModelParams& p);
double head_probability(const FeatureVector& phi, const ModelParams& p);

/// L_sup + lambda1 L_unsup + lambda2 R on precomputed features.
LossTerms loss(std::span<const Example> batch, const ModelParams& p, const FeatureVector& centroid,
               const TrainConfig& cfg);

struct BatchItem {
  const TransactionGraph* graph;
  int label;
};

/// Loss of a batch recomputed from the graphs (features against the frozen
/// reference snapshot).
LossTerms batch_loss(std::span<const BatchItem> batch, const ModelParams& p, const NormalReference& snapshot,
                     const TrainConfig& cfg);

/// Analytic gradient for the head and regularizer; central differences of
/// the feature map for the quantum parameters.
std::vector<double> gradient(std::span<const BatchItem> batch, const ModelParams& p,
                             const NormalReference& snapshot, const TrainConfig& cfg);

ModelParams initial_params(const TrainConfig& cfg);

struct TrainStep {
  std::size_t step = 0;
  double eta = 0.0;
  double loss = 0.0;
  double l_sup = 0.0;
  double l_unsup = 0.0;
  double reg = 0.0;
  double grad_norm = 0.0;
};

struct TrainedModel {
  ModelParams params;
  TrainConfig config;
  NormalReference reference;
  double tau = 0.0;
  std::vector<TrainStep> log;
  bool trained = false;
};

/// Called after every step; returning false stops training.
using StepCallback = std::function<bool(const TrainStep&)>;

TrainedModel train(std::span<const LabeledGraph> dataset, const TrainConfig& cfg,
                   const StepCallback& on_step = {});

/// Rebuilds the reference from the given normals and recalibrates tau
/// from their leave-one-out scores (unless the config fixes tau).
void finalize_reference(TrainedModel& model, std::span<const TransactionGraph* const> normals);

struct ScoreBreakdown {
  double score = 0.0;
  double feature_term = 0.0;    // |phi - phi'|^2 of the nearest reference
  double landscape_term = 0.0;  // alpha * sum_k |L_k - L'_k|_1 of the nearest reference
  double w2_term = 0.0;         // beta * W2(D, D_normal)
  std::size_t nearest = 0;
  double probability = 0.0;     // head output
  GraphFeatures features;
};

ScoreBreakdown score_graph(const TransactionGraph& g, const TrainedModel& model,
                           std::optional<std::size_t> exclude = std::nullopt);
double anomaly_score(const TransactionGraph& g, const TrainedModel& model);

/// 1 iff s > tau.
int decide(double s, double tau);

struct AttributedFeature {
  PersistencePoint point;
  double persistence = 0.0;    // (d - b) * mult
  double contribution = 0.0;   // share of the landscape term
};

struct AttributionReport {
  std::vector<LandscapeFunction> landscapes;      // per dimension
  std::vector<std::vector<double>> gradients;     // per dimension, on the eps grid
  std::vector<AttributedFeature> features;        // every finite feature, by persistence
  std::vector<AttributedFeature> top;             // first three of `features`
  double residual = 0.0;       // landscape term where the graph's landscape is zero
  double landscape_term = 0.0;
};

AttributionReport attribute(const TransactionGraph& g, const TrainedModel& model);

/// Logistic regression on degree statistics, the classical baseline.
class DegreeBaseline {
 public:
  static std::vector<double> statistics(const TransactionGraph& g);

  void fit(std::span<const LabeledGraph> data, double l2 = 1e-3, std::size_t iterations = 2000);
  double probability(const TransactionGraph& g) const;

 private:
  std::vector<double> mean_, scale_, weights_;
  double bias_ = 0.0;
};

}  // namespace qtgnn
