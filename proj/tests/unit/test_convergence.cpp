#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "qtgnn/convergence.hpp"
#include "qtgnn/error.hpp"

using namespace qtgnn;

TEST_CASE("Spearman correlation") {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  const std::vector<double> down = {6, 5, 4, 3, 2, 1};
  const auto r = spearman(x, down);
  CHECK(r.rho == doctest::Approx(-1.0));
  CHECK(r.p_value == doctest::Approx(2.0 / 720.0));
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ArgumentError);
  const std::vector<double> tie = {1, 2, 2, 3, 4, 5};
  CHECK(spearman(x, tie).rho > 0.9);
}

TEST_CASE("barren plateau scan is seeded") {
  const std::vector<std::size_t> depths = {1, 3};
  const auto a = barren_plateau_scan(depths, 10, InitKind::kRandom, 3);
  const auto b = barren_plateau_scan(depths, 10, InitKind::kRandom, 3);
  REQUIRE(a.size() == 2);
  CHECK(a[0].variance == b[0].variance);
  CHECK(a[1].depth == 3);
  CHECK(a[0].variance >= 0.0);
  CHECK(init_kind_from_string(to_string(InitKind::kIdentityProximal)) == InitKind::kIdentityProximal);
}

TEST_CASE("contractivity of the dephasing channel") {
  qtgnn::Rng rng(50);
  const auto g = scan_graph();
  const auto layer = test::random_layer(g, rng);
  const auto r = contractivity_check(g, layer, 0.5, 100, 5);
  CHECK(r.bounded);
  CHECK(r.offdiag_contracts);
  CHECK(r.geometric);
  CHECK(r.alpha_hat <= 1.0 + 1e-9);
  CHECK(r.max_offdiag_ratio < 1.0);
}

TEST_CASE("PL descent on ridge regression") {
  qtgnn::Rng rng(51);
  Eigen::MatrixXd x(50, 3);
  Eigen::VectorXd y(50);
  for (Eigen::Index i = 0; i < 50; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y(i) = x(i, 0) - 2.0 * x(i, 2) + 0.1 * rng.normal();
  }
  const auto r = pl_demo(x, y, 1e-2, 50);
  CHECK(r.geometric);
  CHECK(r.mu > 0.0);
  CHECK(r.mu <= r.smoothness);
  CHECK(r.gaps.back() < 1e-3 * r.gaps.front());
}

TEST_CASE("descent check on synthetic traces") {
  std::vector<TrainStep> trace;
  for (std::size_t t = 0; t < 400; ++t) {
    const double eta = 0.1 / std::sqrt(static_cast<double>(t) + 1.0);
    trace.push_back({t, eta, 1.0, 1.0, 0.0, 0.0, 1.0 / std::sqrt(static_cast<double>(t) + 1.0)});
  }
  const auto r = descent_check(trace);
  CHECK(r.eta_sum_diverging);
  CHECK(r.eta_sq_converging);
  CHECK(r.sublinear);

  std::vector<TrainStep> constant(400, TrainStep{0, 0.1, 1.0, 1.0, 0.0, 0.0, 1.0});
  for (std::size_t t = 0; t < constant.size(); ++t) constant[t].step = t;
  CHECK_FALSE(descent_check(constant).sublinear);

  trace.resize(20);
  CHECK_THROWS_AS(descent_check(trace), InsufficientDataError);
}
