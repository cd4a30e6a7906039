#include <doctest.h>

#include <cmath>

#include "qtgnn/error.hpp"
#include "qtgnn/metrics.hpp"

using namespace qtgnn;

namespace {

// TP=2, FP=1, FN=1, TN=6 at tau = 0.5.
const std::vector<double> kScores = {0.9, 0.8, 0.7, 0.1, 0.2, 0.3, 0.1, 0.2, 0.3, 0.4};
const std::vector<int> kLabels = {1, 1, 0, 1, 0, 0, 0, 0, 0, 0};

bool near(double a, double b) { return std::abs(a - b) <= 1e-15; }

}  // namespace

TEST_CASE("hand-computed confusion case") {
  const auto r = confusion_and_rates(kScores, kLabels, 0.5);
  CHECK(r.confusion.tp == 2);
  CHECK(r.confusion.fp == 1);
  CHECK(r.confusion.fn == 1);
  CHECK(r.confusion.tn == 6);
  CHECK(near(r.accuracy, 0.8));
  CHECK(near(r.precision, 2.0 / 3.0));
  CHECK(near(r.recall, 2.0 / 3.0));
  CHECK(near(r.f1, 2.0 / 3.0));
  CHECK(near(r.mcc, 11.0 / 21.0));
  CHECK(near(r.fpr, 1.0 / 7.0));
  CHECK(r.degenerate.empty());
}

TEST_CASE("log loss and ROC-AUC") {
  const std::vector<double> half(4, 0.5);
  const std::vector<int> y = {0, 1, 0, 1};
  CHECK(std::abs(log_loss(half, y) - std::log(2.0)) <= 1e-12);
  const std::vector<double> perfect = {0.1, 0.9, 0.2, 0.8};
  CHECK(roc_auc(perfect, y) == 1.0);
  const std::vector<double> reversed = {0.9, 0.1, 0.8, 0.2};
  CHECK(roc_auc(reversed, y) == 0.0);
  const std::vector<double> tied(4, 0.3);
  CHECK(roc_auc(tied, y) == 0.5);
  const std::vector<int> one_class(4, 0);
  CHECK_THROWS_AS(roc_auc(perfect, one_class), UndefinedMetricError);
  const std::vector<double> certain = {0.0, 1.0, 0.0, 1.0};
  CHECK(log_loss(certain, y) < 1e-11);
  CHECK(std::isfinite(log_loss(reversed, y)));
}

TEST_CASE("precision at k") {
  CHECK(precision_at_k(kScores, kLabels, 2) == 1.0);
  CHECK(precision_at_k(kScores, kLabels, 3) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(precision_at_k(kScores, kLabels, 0), ArgumentError);
  CHECK_THROWS_AS(precision_at_k(kScores, kLabels, 11), ArgumentError);
}

TEST_CASE("degenerate denominators are flagged") {
  const std::vector<double> s = {0.1, 0.2};
  const std::vector<int> y = {0, 0};
  const auto r = confusion_and_rates(s, y, 0.5);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.mcc == 0.0);
  CHECK(std::find(r.degenerate.begin(), r.degenerate.end(), "precision") != r.degenerate.end());
  CHECK(std::find(r.degenerate.begin(), r.degenerate.end(), "recall") != r.degenerate.end());
}

TEST_CASE("report and csv row") {
  EvalInput in{kScores, kScores, kLabels, 3, 0.5};
  const auto m = evaluate_metrics(in);
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.precision_at_k == doctest::Approx(2.0 / 3.0));
  const auto header = metrics_csv_header();
  const auto row = metrics_csv_row(m);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(header.rfind("f1,", 0) == 0);

  EvalInput perfect{{0.0, 1.0, 0.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, {0, 1, 0, 1}, 2, 0.5};
  const auto p = evaluate_metrics(perfect);
  CHECK(p.f1 == 1.0);
  CHECK(p.mcc == 1.0);
  CHECK(p.roc_auc == 1.0);
  CHECK(p.log_loss < 1e-11);
}

TEST_CASE("threshold shift consistency") {
  std::vector<double> shifted;
  for (double s : kScores) shifted.push_back(s + 7.0);
  const auto a = confusion_and_rates(kScores, kLabels, 0.5);
  const auto b = confusion_and_rates(shifted, kLabels, 7.5);
  CHECK(a.confusion.tp == b.confusion.tp);
  CHECK(a.confusion.fp == b.confusion.fp);
  CHECK(roc_auc(kScores, kLabels) == roc_auc(shifted, kLabels));
}
