#include "qtgnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtgnn/error.hpp"

namespace qtgnn {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw ArgumentError("inputs and labels differ in length");
  if (a == 0) throw ArgumentError("metrics need at least one sample");
}

void check_labels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw ArgumentError("labels must be 0 or 1");
  }
}

double safe_ratio(double num, double den, const char* name, std::vector<std::string>& degenerate) {
  if (den == 0.0) {
    degenerate.emplace_back(name);
    return 0.0;
  }
  return num / den;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  check_labels(labels);
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw UndefinedMetricError("ROC-AUC needs both classes");

  // Rank-sum form: average ranks over tied groups.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double precision_at_k(std::span<const double> scores, std::span<const int> labels, std::size_t k) {
  check_lengths(scores.size(), labels.size());
  check_labels(labels);
  if (k == 0) throw ArgumentError("k must be positive");
  if (k > scores.size()) throw ArgumentError("k exceeds the number of samples");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += labels[order[i]] == 1 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

RateReport confusion_and_rates(std::span<const double> values, std::span<const int> labels, double tau) {
  check_lengths(values.size(), labels.size());
  check_labels(labels);
  RateReport r;
  auto& c = r.confusion;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool predicted = values[i] > tau;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  r.accuracy = (tp + tn) / (tp + tn + fp + fn);
  r.precision = safe_ratio(tp, tp + fp, "precision", r.degenerate);
  r.recall = safe_ratio(tp, tp + fn, "recall", r.degenerate);
  r.f1 = safe_ratio(2.0 * r.precision * r.recall, r.precision + r.recall, "f1", r.degenerate);
  r.fpr = safe_ratio(fp, fp + tn, "fpr", r.degenerate);
  const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  r.mcc = safe_ratio(tp * tn - fp * fn, den, "mcc", r.degenerate);
  return r;
}

double log_loss(std::span<const double> probabilities, std::span<const int> labels) {
  check_lengths(probabilities.size(), labels.size());
  check_labels(labels);
  constexpr double kClip = 1e-12;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], kClip, 1.0 - kClip);
    total -= labels[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(labels.size());
}

MetricsReport evaluate_metrics(const EvalInput& in) {
  MetricsReport r;
  r.roc_auc = roc_auc(in.scores, in.labels);
  r.precision_at_k = precision_at_k(in.scores, in.labels, in.k);
  const RateReport rates = confusion_and_rates(in.scores, in.labels, in.tau);
  r.confusion = rates.confusion;
  r.accuracy = rates.accuracy;
  r.precision = rates.precision;
  r.recall = rates.recall;
  r.f1 = rates.f1;
  r.mcc = rates.mcc;
  r.fpr = rates.fpr;
  r.degenerate = rates.degenerate;
  r.log_loss = log_loss(in.probabilities, in.labels);
  return r;
}

std::string metrics_csv_header() {
  return "f1,accuracy,precision,recall,mcc,log_loss,roc_auc,fpr,precision_at_k";
}

std::string metrics_csv_row(const MetricsReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << r.f1 << ',' << r.accuracy << ',' << r.precision << ',' << r.recall << ',' << r.mcc << ','
      << r.log_loss << ',' << r.roc_auc << ',' << r.fpr << ',' << r.precision_at_k;
  return out.str();
}

}  // namespace qtgnn
