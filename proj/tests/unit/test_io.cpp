#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../support.hpp"
#include "qtgnn/config.hpp"
#include "qtgnn/error.hpp"
#include "qtgnn/serialize.hpp"

using namespace qtgnn;

namespace {

std::vector<DatasetRecord> sample_records() {
  SyntheticConfig sc;
  sc.n_graphs = 12;
  sc.n_accounts = 5;
  sc.fraud_ratio = 0.25;
  sc.seed = 60;
  std::vector<DatasetRecord> out;
  std::size_t k = 0;
  for (auto& lg : generate_synthetic(sc)) out.push_back({"g" + std::to_string(k++), k % 2 ? "train" : "test", lg});
  return out;
}

TrainedModel sample_model() {
  TrainConfig cfg;
  cfg.features.capacity = 5;
  cfg.features.eps_grid = uniform_grid(5);
  cfg.t_max = 2;
  cfg.batch_size = 4;
  cfg.seed = 61;
  std::vector<LabeledGraph> data;
  for (const auto& r : sample_records()) {
    data.push_back(r.graph);
    data.back().graph = preprocess(r.graph.graph, {});
  }
  return train(data, cfg);
}

}  // namespace

TEST_CASE("double formatting round-trips") {
  qtgnn::Rng rng(62);
  for (int t = 0; t < 200; ++t) {
    const double x = rng.normal() * std::pow(10.0, rng.integer(-20, 20));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("config round trip") {
  RunConfig cfg;
  CHECK(config_from_json(config_to_json(cfg)) == cfg);

  set_config_value(cfg, "seed", "77");
  set_config_value(cfg, "synthetic.motifs", "cycle,star");
  set_config_value(cfg, "synthetic.fraud_ratio", "0.05");
  set_config_value(cfg, "model.ablation", "no_topology");
  set_config_value(cfg, "model.eps_grid", "[0, 0.25, 0.5, 1]");
  set_config_value(cfg, "train.tau", "1.5");
  set_config_value(cfg, "train.schedule", "decay");
  set_config_value(cfg, "eval.tau", "0.25");
  set_config_value(cfg, "dataset.csv", "edges.csv");
  set_config_value(cfg, "lab.depths", "[1, 3, 5]");
  set_config_value(cfg, "preprocess.min_max_normalize", "false");
  CHECK(cfg.seed == 77);
  CHECK(cfg.synthetic.fraud_motifs == std::set<Motif>{Motif::kCycle, Motif::kStar});
  CHECK(cfg.train.features.ablation == Ablation::kNoTopology);
  CHECK(cfg.train.tau == 1.5);
  CHECK(cfg.csv_path == "edges.csv");
  CHECK(cfg.lab.depths == std::vector<std::size_t>{1, 3, 5});
  CHECK(config_from_json(config_to_json(cfg)) == cfg);

  for (const auto& key : config_keys()) CHECK(config_to_json(cfg).find("\"" + key + "\"") != std::string::npos);

  CHECK_THROWS_AS(set_config_value(cfg, "no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(cfg, "seed", "\"abc\""), ConfigError);
  CHECK_THROWS_AS(set_config_value(cfg, "model.ablation", "bogus"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{\"seed\": 1, \"extra\": 2}"), ConfigError);
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("seeds flow from the root seed") {
  RunConfig a, b;
  a.seed = 1;
  b.seed = 2;
  CHECK(a.train_config().seed == 1);
  CHECK(a.synthetic_config().seed != b.synthetic_config().seed);
  CHECK(a.synthetic_config().seed == derive_seed(1, "dataset"));
}

TEST_CASE("dataset round trip") {
  const auto records = sample_records();
  std::stringstream buf;
  write_dataset(buf, records);
  const auto back = read_dataset(buf);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].id == records[i].id);
    CHECK(back[i].split == records[i].split);
    CHECK(back[i].graph.label == records[i].graph.label);
    CHECK(back[i].graph.motif == records[i].graph.motif);
    CHECK(back[i].graph.graph == records[i].graph.graph);
  }
  std::stringstream again;
  write_dataset(again, back);
  CHECK(again.str() == buf.str());

  std::istringstream bad("{\"id\":\"x\"}\n");
  try {
    read_dataset(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  std::istringstream broken(buf.str().substr(0, buf.str().find('\n') + 1) + "{oops\n");
  try {
    read_dataset(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("model round trip preserves scores") {
  const auto model = sample_model();
  const auto text = model_to_json(model);
  const auto back = model_from_json(text);
  CHECK(model_to_json(back) == text);
  CHECK(back.params.values == model.params.values);
  CHECK(back.tau == model.tau);
  CHECK(back.config == model.config);
  for (const auto& r : sample_records()) {
    const auto g = preprocess(r.graph.graph, {});
    CHECK(anomaly_score(g, back) == anomaly_score(g, model));
  }
  CHECK_THROWS_AS(model_from_json("{\"format\":\"other\"}"), ParseError);
  CHECK(train_config_from_json(train_config_to_json(model.config)) == model.config);
}

TEST_CASE("scores, diagrams and verdicts round trip") {
  ScoreRecord s{"g1", 1, 0.25, 1, 0.2, 0.7, 0.1, 0.05, 0.1, {}};
  s.top_features.push_back({{0, 0.0, 0.5, 1}, 0.5, 0.25});
  std::stringstream buf;
  write_scores(buf, std::span(&s, 1));
  const auto back = read_scores(buf);
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == "g1");
  CHECK(back[0].score == 0.25);
  CHECK(back[0].top_features.size() == 1);
  CHECK(back[0].top_features[0].point == s.top_features[0].point);

  PersistenceDiagram d;
  d.features = {{0, 0.0, 0.4, 2}, {0, 0.0, kInfinity, 1}, {1, 0.3, 0.5, 1}};
  std::stringstream dbuf;
  write_diagram(dbuf, "g1", d);
  write_diagram(dbuf, "g2", PersistenceDiagram{});
  const auto diagrams = read_diagrams(dbuf);
  CHECK(diagrams.at("g1").features == d.features);

  Verdict v{"stability", true, {{"max_ratio", 0.5}, {"n", 3.0}}, 9};
  const auto vb = verdict_from_json(verdict_to_json(v));
  CHECK(vb.name == v.name);
  CHECK(vb.passed);
  CHECK(vb.statistics == v.statistics);
  CHECK(vb.seed == 9);
}

TEST_CASE("density container") {
  qtgnn::Rng rng(63);
  std::vector<DensityMatrix> states{test::random_mixed(1, rng), test::random_mixed(3, rng)};
  std::stringstream buf;
  write_densities(buf, states);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 4 + 4 + 8 + (8 + 4 * 16) + (8 + 64 * 16));
  const auto back = read_densities(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[1].matrix() == states[1].matrix());
  std::istringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_densities(truncated), ParseError);
  std::istringstream wrong("XXXX");
  CHECK_THROWS_AS(read_densities(wrong), ParseError);
}

TEST_CASE("training log columns") {
  std::vector<TrainStep> log{{0, 0.1, 1.0, 0.7, 0.2, 0.1, 0.5}};
  std::ostringstream out;
  write_training_log(out, log);
  CHECK(out.str().rfind("step,eta,loss,l_sup,l_unsup,reg,grad_norm\n0,0.1,1,0.7,0.2,0.1,0.5\n", 0) == 0);
}
