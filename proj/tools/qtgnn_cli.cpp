#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtgnn/config.hpp"
#include "qtgnn/error.hpp"
#include "qtgnn/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kData = 3;
constexpr int kFailure = 4;

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  bool print_config = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON file of dotted config keys");
  cmd->add_option("--set", c.sets, "Override one key, e.g. --set train.t_max=50")->take_all();
  cmd->add_option("--seed", c.seed, "Root seed");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--threads", c.threads, "Worker threads");
  cmd->add_flag("--print-config", c.print_config, "Print the resolved configuration and exit");
}

qtgnn::RunConfig resolve(const Common& c) {
  qtgnn::RunConfig cfg = c.config_path.empty() ? qtgnn::RunConfig{} : qtgnn::load_config(c.config_path);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw qtgnn::ConfigError("--set expects key=value, got '" + s + "'");
    qtgnn::set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.output_dir = *c.out;
  if (c.threads) cfg.threads = *c.threads;
  cfg.validate();
  return cfg;
}

void print_metrics(const qtgnn::MetricsReport& m) {
  std::printf("f1=%.6f accuracy=%.6f precision=%.6f recall=%.6f mcc=%.6f roc_auc=%.6f log_loss=%.6f\n", m.f1,
              m.accuracy, m.precision, m.recall, m.mcc, m.roc_auc, m.log_loss);
}

void print_verdict(const qtgnn::Verdict& v) {
  std::printf("%s %s\n", v.passed ? "PASS" : "FAIL", v.name.c_str());
  for (const auto& [k, x] : v.statistics) std::printf("  %s = %.6g\n", k.c_str(), x);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-topological graph anomaly detection"};
  app.require_subcommand(1);

  Common common;
  std::string dataset, model, scores, split = "test", experiment;

  auto* gen = app.add_subcommand("generate", "Write a seeded dataset");
  add_common(gen, common);

  auto* tr = app.add_subcommand("train", "Train a model on the train split");
  add_common(tr, common);
  tr->add_option("--dataset", dataset, "Dataset JSON lines")->required();

  auto* sc = app.add_subcommand("score", "Score graphs with a trained model");
  add_common(sc, common);
  sc->add_option("--model", model, "Model JSON")->required();
  sc->add_option("--dataset", dataset, "Dataset JSON lines")->required();
  sc->add_option("--split", split, "train, test or all");

  auto* ev = app.add_subcommand("eval", "Metrics of a scores file");
  add_common(ev, common);
  ev->add_option("--scores", scores, "Scores JSON lines")->required();

  auto* lab = app.add_subcommand("lab", "Run a convergence-lab experiment");
  add_common(lab, common);
  std::string names;
  for (const auto& n : qtgnn::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  lab->add_option("experiment", experiment, "One of: " + names)->required();

  auto* emb = app.add_subcommand("embed", "Write final layer states and feature vectors");
  add_common(emb, common);
  emb->add_option("--dataset", dataset, "Dataset JSON lines")->required();
  emb->add_option("--model", model, "Model JSON; initial parameters when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const qtgnn::RunConfig cfg = resolve(common);
    if (common.print_config) {
      std::cout << qtgnn::config_to_json(cfg) << '\n';
      return kOk;
    }
    if (*gen) {
      qtgnn::cmd_generate(cfg);
    } else if (*tr) {
      qtgnn::cmd_train(cfg, dataset);
    } else if (*sc) {
      qtgnn::cmd_score(cfg, model, dataset, split);
    } else if (*ev) {
      print_metrics(qtgnn::cmd_eval(cfg, scores));
    } else if (*lab) {
      const qtgnn::Verdict v = qtgnn::cmd_lab(cfg, experiment);
      print_verdict(v);
      if (!v.passed) return kFailure;
    } else if (*emb) {
      const std::filesystem::path m = model;
      qtgnn::cmd_embed(cfg, dataset, model.empty() ? nullptr : &m);
    }
    return kOk;
  } catch (const qtgnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const qtgnn::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const qtgnn::ExperimentFailure& e) {
    std::cerr << "experiment failure: " << e.what() << '\n';
    return kFailure;
  } catch (const qtgnn::TrainingError& e) {
    std::cerr << "training failure: " << e.what() << '\n';
    return kFailure;
  } catch (const qtgnn::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
