#include <doctest.h>

#include <cmath>

#include "../oracles/oracles.hpp"
#include "../support.hpp"
#include "qtgnn/convergence.hpp"
#include "qtgnn/error.hpp"
#include "qtgnn/topology.hpp"

using namespace qtgnn;

namespace {

DistanceMatrix square() {
  DistanceMatrix d{Eigen::MatrixXd(4, 4)};
  const double s = 1.0, g = 1.5;
  d.d << 0, s, g, s,  //
      s, 0, s, g,     //
      g, s, 0, s,     //
      s, g, s, 0;
  return d;
}

std::vector<oracle::Simplex> subcomplex(const FilteredComplex& c, double eps) {
  std::vector<oracle::Simplex> out;
  for (const auto& s : c.simplices) {
    if (s.filtration <= eps) out.emplace_back(s.vertices.begin(), s.vertices.end());
  }
  return out;
}

}  // namespace

TEST_CASE("Rips complex of a square") {
  const auto c = vietoris_rips(square(), 2.0, 1);
  CHECK(c.count(0, 0.0) == 4);
  CHECK(c.count(1, 1.0) == 4);
  CHECK(c.count(1, 1.5) == 6);
  CHECK(c.count(2, 1.0) == 0);
  CHECK(c.count(2, 1.5) == 4);

  const auto d = persistence(c);
  CHECK(d.count(1) == 1);
  const auto h1 = d.of_dim(1).features;
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == 1.0);
  CHECK(h1[0].death == 1.5);
  CHECK(betti_at(d, 0, 0.5) == 4);
  CHECK(betti_at(d, 0, 1.0) == 1);
  CHECK(betti_at(d, 1, 1.2) == 1);
  CHECK(betti_at(d, 1, 1.5) == 0);
}

TEST_CASE("Rips threshold below every distance") {
  const auto c = vietoris_rips(square(), 0.5, 1);
  CHECK(c.count(0, 0.5) == 4);
  CHECK(c.count(1, 0.5) == 0);
  CHECK(persistence(c).count(0) == 4);
}

TEST_CASE("oracle sanity") {
  CHECK(oracle::homology_bruteforce({{0}}) == std::vector<int>{1});
  CHECK(oracle::homology_bruteforce({{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}}) == std::vector<int>{1, 1});
  CHECK(oracle::homology_bruteforce({{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}, {0, 1, 2}}) ==
        std::vector<int>{1, 0, 0});
  const auto same = oracle::matching_bruteforce({{0.0, 1.0}}, {{0.0, 1.0}});
  CHECK(same.bottleneck == 0.0);
  CHECK(same.w2 == 0.0);
  const auto shift = oracle::matching_bruteforce({{0.0, 1.0}}, {{0.1, 1.0}});
  CHECK(shift.bottleneck == doctest::Approx(0.1));
}

TEST_CASE("persistence agrees with brute-force homology") {
  qtgnn::Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto c = test::random_complex(rng);
    const auto d = persistence(c);
    for (const auto& s : c.simplices) {
      const double eps = s.filtration;
      const auto betti = oracle::homology_bruteforce(subcomplex(c, eps));
      for (int k = 0; k <= c.max_dim; ++k) {
        const int expected = k < static_cast<int>(betti.size()) ? betti[static_cast<std::size_t>(k)] : 0;
        CHECK(betti_at(d, k, eps) == expected);
      }
      CHECK(euler_characteristic(d, eps) == alternating_simplex_count(c, eps));
    }
  }
}

TEST_CASE("diagram distances match exhaustive matching") {
  qtgnn::Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    const auto a = test::random_diagram(rng, 6), b = test::random_diagram(rng, 6);
    const auto exact = oracle::matching_bruteforce(test::points_of(a), test::points_of(b));
    CHECK(std::abs(bottleneck_distance(a, b) - exact.bottleneck) <= 1e-9);
    CHECK(std::abs(wasserstein2(a, b) - exact.w2) <= 1e-9);
    CHECK(bottleneck_distance(a, b) <= wasserstein2(a, b) + 1e-12);
    CHECK(bottleneck_distance(a, a) == 0.0);
    CHECK(bottleneck_distance(a, b) == doctest::Approx(bottleneck_distance(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("multi-dimension distances combine per dimension") {
  qtgnn::Rng rng(33);
  auto a = test::random_diagram(rng, 4, 0), b = test::random_diagram(rng, 4, 0);
  const auto a1 = test::random_diagram(rng, 4, 1), b1 = test::random_diagram(rng, 4, 1);
  a.features.insert(a.features.end(), a1.features.begin(), a1.features.end());
  b.features.insert(b.features.end(), b1.features.begin(), b1.features.end());
  a.normalize();
  b.normalize();
  const double w0 = wasserstein2(a, b, 0), w1 = wasserstein2(a, b, 1);
  CHECK(wasserstein2(a, b) == doctest::Approx(std::sqrt(w0 * w0 + w1 * w1)).epsilon(1e-12));
  CHECK(bottleneck_distance(a, b) == std::max(bottleneck_distance(a, b, 0), bottleneck_distance(a, b, 1)));

  PersistenceDiagram essential;
  essential.features.push_back({0, 0.0, kInfinity, 1});
  CHECK_THROWS_AS(bottleneck_distance(essential, a), ArgumentError);
  CHECK(bottleneck_distance(essential.truncated(1.0), essential.truncated(1.0)) == 0.0);
}

TEST_CASE("diagram normalization merges duplicates") {
  PersistenceDiagram d;
  d.features = {{1, 0.2, 0.5, 1}, {0, 0.0, 0.3, 1}, {1, 0.2, 0.5, 2}};
  d.normalize();
  REQUIRE(d.features.size() == 2);
  CHECK(d.features[1].mult == 3);
  CHECK(d.count(1) == 3);
  PersistenceDiagram bad;
  bad.features = {{0, 0.5, 0.2, 1}};
  CHECK_THROWS_AS(bad.normalize(), ValidationError);
}

TEST_CASE("persistence landscapes") {
  PersistenceDiagram d;
  d.features = {{0, 0.0, 2.0, 1}, {0, 1.0, 2.0, 1}};
  const auto l = landscape(d, 0);
  CHECK(l(1.0) == doctest::Approx(1.0));
  CHECK(l(0.5) == doctest::Approx(0.5));
  CHECK(l(1.75) == doctest::Approx(0.25));
  CHECK(l(3.0) == 0.0);
  const LandscapeFunction zero{0, {}};
  CHECK(landscape_l1(l, zero) == doctest::Approx(1.0));
  CHECK(landscape_l1(l, l) == 0.0);
  CHECK(landscape_gradient(d, 0, 1.5) == 2.0);
  CHECK(landscape_gradient(d, 0, 0.5) == 1.0);

  PersistenceDiagram ess;
  ess.features = {{0, 0.0, kInfinity, 1}};
  CHECK_THROWS_AS(landscape(ess, 0), ArgumentError);
}

TEST_CASE("landscape l1 against dense sampling") {
  qtgnn::Rng rng(34);
  for (int t = 0; t < 20; ++t) {
    const auto f = landscape(test::random_diagram(rng, 5), 0);
    const auto g = landscape(test::random_diagram(rng, 5), 0);
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -0.1 + 2.0 * (i + 0.5) / n;
      sum += std::abs(f(x) - g(x)) * 2.0 / n;
    }
    CHECK(landscape_l1(f, g) == doctest::Approx(sum).epsilon(1e-4));
  }
}

TEST_CASE("perturbed distance matrices move diagrams by at most delta") {
  const auto d = square();
  for (double delta : {1e-3, 1e-2, 5e-2}) {
    const auto r = stability_check(d, delta, 20, 7);
    CHECK(r.passed);
    CHECK(r.distances.size() == 20);
    CHECK(r.max_ratio <= 1.0 + 1e-6);
  }
}

TEST_CASE("distance matrix validation") {
  DistanceMatrix d{Eigen::MatrixXd::Zero(2, 2)};
  d.d(0, 1) = 0.3;
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d.d(1, 0) = 0.3;
  CHECK_NOTHROW(d.validate());
  d.d(0, 0) = 0.1;
  CHECK_THROWS_AS(d.validate(), ValidationError);
}
