#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qtgnn {

/// Mann-Whitney estimate with ties counted half. Throws
/// UndefinedMetricError when only one class is present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Fraction of frauds among the k highest scores; equal scores keep index order.
double precision_at_k(std::span<const double> scores, std::span<const int> labels, std::size_t k);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

/// Rates at a threshold; a value is predicted positive iff value > tau.
/// Rates with a zero denominator are 0 and their names land in `degenerate`.
struct RateReport {
  Confusion confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double fpr = 0.0;
  std::vector<std::string> degenerate;
};

RateReport confusion_and_rates(std::span<const double> values, std::span<const int> labels, double tau);

/// Mean negative log-likelihood, probabilities clipped to [1e-12, 1 - 1e-12].
double log_loss(std::span<const double> probabilities, std::span<const int> labels);

struct EvalInput {
  std::vector<double> scores;
  std::vector<double> probabilities;
  std::vector<int> labels;
  std::size_t k = 1;
  double tau = 0.0;
};

struct MetricsReport {
  double roc_auc = 0.0;
  double precision_at_k = 0.0;
  double fpr = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double log_loss = 0.0;
  Confusion confusion;
  std::vector<std::string> degenerate;
};

/// Rates use scores against tau; log loss uses the probabilities.
MetricsReport evaluate_metrics(const EvalInput& in);

/// Column order of the benchmark table.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& r);

}  // namespace qtgnn
