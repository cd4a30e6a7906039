#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtgnn/error.hpp"
#include "qtgnn/graph.hpp"

using namespace qtgnn;

TEST_CASE("edge list parsing") {
  const auto g = parse_edge_list(
      "src,dst,amount,timestamp,label\n"
      "b,a,10,3,fraud\n"
      "a,c,5.5,7,normal\n"
      "\n"
      "c,b,1,9,\n");
  CHECK(g.nodes == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edges[0].src == 1);
  CHECK(g.edges[0].dst == 0);
  CHECK(g.edges[0].label == Label::kFraud);
  CHECK(g.edges[1].weight == 5.5);
  CHECK_FALSE(g.edges[2].label.has_value());
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("edge list errors carry line numbers") {
  try {
    parse_edge_list("src,dst,amount,timestamp\na,b,1,0\na,b,x,0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_edge_list("from,to,amount,timestamp\n"), ParseError);
  CHECK_THROWS_AS(parse_edge_list(""), ParseError);
  CHECK_THROWS_AS(parse_edge_list("src,dst,amount,timestamp\na,b,1\n"), ParseError);
  CHECK_THROWS_AS(parse_edge_list("src,dst,amount,timestamp\na,b,-1,0\n"), ValidationError);
  CHECK_THROWS_AS(parse_edge_list("src,dst,amount,timestamp\na,a,1,0\n"), ValidationError);
}

TEST_CASE("preprocessing aggregates windows and normalizes") {
  const auto raw = parse_edge_list(
      "src,dst,amount,timestamp\n"
      "a,b,2,0\n"
      "a,b,3,1\n"
      "a,b,4,5\n"
      "b,c,10,2\n");
  const auto g = preprocess(raw, {.window = 5, .filter_threshold = 0.0, .min_max_normalize = false});
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edges[0].weight == 5.0);
  CHECK(g.edges[0].timestamp == 0);
  CHECK(g.edges[1].weight == 4.0);
  CHECK(g.edges[1].timestamp == 5);

  const auto n = preprocess(raw, {.window = 5, .filter_threshold = 0.0, .min_max_normalize = true});
  // {5, 4, 10} normalizes to {1/6, 0, 1}; the zero edge falls to w <= 0
  REQUIRE(n.edge_count() == 2);
  CHECK(n.edges[0].weight == doctest::Approx(1.0 / 6.0));
  CHECK(n.edges[1].weight == 1.0);
  const auto kept = preprocess(raw, {.window = 5, .filter_threshold = 0.4, .min_max_normalize = true});
  CHECK(kept.edge_count() == 1);
  // degrees are taken before filtering
  CHECK(n.node_bias[0] == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("normalization of a constant weight set") {
  const auto g = preprocess(parse_edge_list("src,dst,amount,timestamp\na,b,3,0\nb,c,3,0\n"), {});
  REQUIRE(g.edge_count() == 2);
  for (const auto& e : g.edges) CHECK(e.weight == 1.0);
}

TEST_CASE("preprocessing properties") {
  SyntheticConfig sc;
  sc.n_graphs = 40;
  sc.seed = 4;
  for (const auto& lg : generate_synthetic(sc)) {
    const auto g = preprocess(lg.graph, {});
    const double bias = std::accumulate(g.node_bias.begin(), g.node_bias.end(), 0.0);
    CHECK(bias == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& e : g.edges) {
      CHECK(e.weight > 0.0);
      CHECK(e.weight <= 1.0);
    }
    CHECK(preprocess(g, {}) == g);
    CHECK_NOTHROW(g.validate());
  }
  CHECK_THROWS_AS(preprocess(TransactionGraph{}, {}), ArgumentError);
  CHECK_THROWS_AS(preprocess(sc.n_graphs ? generate_synthetic(sc)[0].graph : TransactionGraph{}, {.window = 0}),
                  ConfigError);
}

TEST_CASE("subgraph sampling respects the edge budget") {
  SyntheticConfig sc;
  sc.n_graphs = 1;
  sc.n_accounts = 12;
  sc.n_transactions = 30;
  sc.seed = 8;
  const auto g = preprocess(generate_synthetic(sc)[0].graph, {});
  for (double kappa : {0.01, 0.25, 0.5, 1.0}) {
    const auto s = sample_subgraph(g, kappa, 17);
    CHECK(s.edge_count() <= static_cast<std::size_t>(std::ceil(kappa * static_cast<double>(g.edge_count()))));
    CHECK(s.edge_count() >= 1);
    CHECK(sample_subgraph(g, kappa, 17) == s);
    CHECK_NOTHROW(s.validate());
  }
  CHECK(sample_subgraph(g, 1.0, 3) == g);
  CHECK_THROWS_AS(sample_subgraph(g, 0.0, 3), ArgumentError);
  CHECK_THROWS_AS(sample_subgraph(g, 1.5, 3), ArgumentError);
}

TEST_CASE("synthetic generation") {
  SyntheticConfig sc;
  sc.n_graphs = 500;
  sc.fraud_ratio = 0.1;
  sc.seed = 21;
  const auto a = generate_synthetic(sc);
  const auto b = generate_synthetic(sc);
  REQUIRE(a.size() == 500);
  std::size_t fraud = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].graph == b[i].graph);
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].graph.node_count() >= 4);
    CHECK(a[i].graph.node_count() <= sc.n_accounts);
    fraud += static_cast<std::size_t>(a[i].label);
    if (a[i].label == 1) {
      REQUIRE(a[i].motif.has_value());
      const auto scan = scan_motifs(a[i].graph, Label::kFraud);
      if (*a[i].motif == Motif::kCycle) CHECK(scan.longest_cycle >= 3);
      if (*a[i].motif == Motif::kStar) CHECK(scan.max_fan_out >= 3);
      if (*a[i].motif == Motif::kTriangle) CHECK_FALSE(a[i].graph.triangles.empty());
    } else {
      CHECK_FALSE(a[i].motif.has_value());
    }
  }
  CHECK(static_cast<double>(fraud) >= 0.8 * 50);
  CHECK(static_cast<double>(fraud) <= 1.2 * 50);

  sc.fraud_motifs = {};
  for (const auto& lg : generate_synthetic(sc)) CHECK(lg.label == 0);

  SyntheticConfig bad;
  bad.fraud_ratio = 0.0;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad.fraud_ratio = 0.1;
  bad.n_accounts = 3;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
}

TEST_CASE("node statistics of a triangle with a tail") {
  const auto g = preprocess(parse_edge_list("src,dst,amount,timestamp\n"
                                            "a,b,1,0\nb,c,1,0\nc,a,1,0\nc,d,1,0\n"),
                            {.window = 1, .filter_threshold = 0.0, .min_max_normalize = false});
  const auto s = node_statistics(g);
  CHECK(s.clustering[0] == doctest::Approx(1.0));
  CHECK(s.clustering[2] == doctest::Approx(1.0 / 3.0));
  CHECK(s.clustering[3] == 0.0);
  const auto scan = scan_motifs(g);
  CHECK(scan.longest_cycle == 3);
  CHECK(scan.max_fan_out == 2);
}
