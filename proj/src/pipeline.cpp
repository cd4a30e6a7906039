#include "qtgnn/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qtgnn/convergence.hpp"
#include "qtgnn/error.hpp"
#include "qtgnn/rng.hpp"

namespace qtgnn {

namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << bytes;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

/// Writes every output, then a manifest naming them. Timestamps live only
/// in the manifest so data files stay byte-identical across reruns.
class OutputSet {
 public:
  OutputSet(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw DataError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
  }

  void add(const std::string& name, const std::string& bytes) {
    write_file(fs::path(cfg_.output_dir) / name, bytes);
    outputs_.push_back({{"path", name}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a64(bytes)}});
  }

  void finish(Json extra = Json::object()) {
    Json doc{{"command", command_},
             {"seed", cfg_.seed},
             {"created", utc_timestamp()},
             {"config", Json::parse(config_to_json(cfg_))},
             {"outputs", outputs_}};
    for (auto& [k, v] : extra.items()) doc[k] = v;
    write_file(fs::path(cfg_.output_dir) / ("manifest_" + command_ + ".json"), doc.dump(2) + "\n");
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  Json outputs_ = Json::array();
};

std::string graph_id(std::size_t k) {
  std::ostringstream out;
  out << 'g' << std::setw(6) << std::setfill('0') << k;
  return out.str();
}

void assign_splits(std::vector<DatasetRecord>& records, double test_fraction, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "split"));
  for (int label : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].graph.label == label) idx.push_back(i);
    }
    rng.shuffle(idx.begin(), idx.end());
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k) records[idx[k]].split = k < n_test ? "test" : "train";
  }
}

struct ScoredGraph {
  ScoreRecord record;
  PersistenceDiagram diagram;
  std::vector<LandscapeFunction> landscapes;
};

ScoredGraph score_one(const DatasetRecord& r, const TrainedModel& model, const PreprocessConfig& pre,
                      std::optional<double> tau) {
  const TransactionGraph g = preprocess(r.graph.graph, pre);
  const ScoreBreakdown sb = score_graph(g, model);
  const AttributionReport ar = attribute(g, model);
  ScoredGraph out;
  auto& rec = out.record;
  rec.id = r.id;
  rec.label = r.graph.label;
  rec.score = sb.score;
  rec.tau = tau.value_or(model.tau);
  rec.decision = decide(sb.score, rec.tau);
  rec.probability = sb.probability;
  rec.feature_term = sb.feature_term;
  rec.landscape_term = sb.landscape_term;
  rec.w2_term = sb.w2_term;
  rec.top_features = ar.top;
  out.diagram = sb.features.diagram;
  out.landscapes = ar.landscapes;
  return out;
}

std::vector<ScoredGraph> score_all(std::span<const DatasetRecord> records, const TrainedModel& model,
                                   const PreprocessConfig& pre, std::optional<double> tau, std::size_t threads) {
  return parallel_map<ScoredGraph>(records.size(), threads, [&](std::size_t i) {
    return score_one(records[i], model, pre, tau);
  });
}

std::vector<double> anomaly_scores(std::span<const LabeledGraph> graphs, const TrainedModel& model,
                                   std::size_t threads) {
  return parallel_map<double>(graphs.size(), threads,
                              [&](std::size_t i) { return anomaly_score(graphs[i].graph, model); });
}

std::vector<int> labels_of(std::span<const LabeledGraph> graphs) {
  std::vector<int> y;
  for (const auto& g : graphs) y.push_back(g.label);
  return y;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

// Eight-account graph whose node states feed the stability experiment.
DistanceMatrix lab_distance_matrix(std::uint64_t seed) {
  SyntheticConfig sc;
  sc.n_graphs = 64;
  sc.n_accounts = 8;
  sc.n_transactions = 12;
  sc.fraud_ratio = 0.01;
  sc.fraud_motifs = {};
  sc.seed = derive_seed(seed, "stability_graph");
  for (const auto& lg : generate_synthetic(sc)) {
    if (lg.graph.node_count() != 8) continue;
    const TransactionGraph g = preprocess(lg.graph, {});
    Rng rng(derive_seed(seed, "stability_layers"));
    std::vector<LayerParams> layers(2, LayerParams::zeros(g, -1.0));
    for (auto& l : layers) {
      for (auto& [k, v] : l.edge) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
      for (auto& v : l.node) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    const auto out = forward(encode_state(g, {std::numbers::pi / 4}).rho, layers, g);
    const auto states = node_reductions(out.rho);
    return distance_matrix(states, WeightMatrix::identity(2));
  }
  throw StateError("no eight-account graph among the stability candidates");
}

ExperimentResult barren_plateau_experiment(const RunConfig& cfg) {
  const auto& depths = cfg.lab.depths;
  const auto random = barren_plateau_scan(depths, cfg.lab.trials, InitKind::kRandom, cfg.seed, cfg.lab.scan_channel_p);
  const auto ident =
      barren_plateau_scan(depths, cfg.lab.trials, InitKind::kIdentityProximal, cfg.seed, cfg.lab.scan_channel_p);
  std::string csv = "depth,init,mean,variance\n";
  std::vector<double> x, v;
  for (const auto& r : random) {
    csv += csv_row({std::to_string(r.depth), "random", format_double(r.mean), format_double(r.variance)});
    x.push_back(static_cast<double>(r.depth));
    v.push_back(r.variance);
  }
  for (const auto& r : ident) {
    csv += csv_row({std::to_string(r.depth), "identity_proximal", format_double(r.mean), format_double(r.variance)});
  }
  const SpearmanResult s = spearman(x, v);
  const double last_random = random.back().variance, last_ident = ident.back().variance;
  Verdict verdict{"barren_plateau",
                  s.rho < 0.0 && s.p_value < 0.05 && last_ident > last_random,
                  {{"spearman_rho", s.rho},
                   {"p_value", s.p_value},
                   {"random_variance_last", last_random},
                   {"identity_variance_last", last_ident},
                   {"max_depth", static_cast<double>(depths.back())}},
                  cfg.seed};
  return {verdict, csv};
}

ExperimentResult contractivity_experiment(const RunConfig& cfg) {
  const TransactionGraph g = scan_graph();
  Rng rng(derive_seed(cfg.seed, "contractivity_layer"));
  LayerParams layer = LayerParams::zeros(g);
  for (auto& [k, v] : layer.edge) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
  for (auto& v : layer.node) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
  for (auto& [k, v] : layer.triangle) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const auto r = contractivity_check(g, layer, cfg.lab.contract_channel_p, cfg.lab.pairs, cfg.seed);
  std::string csv = "iteration,gap,bound\n";
  for (std::size_t t = 0; t < r.gaps.size(); ++t) {
    const double bound = std::pow(r.alpha_hat, static_cast<double>(t)) * r.gaps[0];
    csv += csv_row({std::to_string(t), format_double(r.gaps[t]), format_double(bound)});
  }
  Verdict verdict{"contractivity",
                  r.bounded && r.offdiag_contracts && r.geometric,
                  {{"alpha_hat", r.alpha_hat},
                   {"max_random_ratio", r.max_random_ratio},
                   {"max_offdiag_ratio", r.max_offdiag_ratio},
                   {"channel_p", cfg.lab.contract_channel_p},
                   {"pairs", static_cast<double>(cfg.lab.pairs)}},
                  cfg.seed};
  return {verdict, csv};
}

ExperimentResult stability_experiment(const RunConfig& cfg) {
  const DistanceMatrix base = lab_distance_matrix(cfg.seed);
  std::string csv = "delta,trial,distance\n";
  Verdict verdict{"stability", true, {}, cfg.seed};
  for (double delta : cfg.lab.deltas) {
    const auto r = stability_check(base, delta, cfg.lab.stability_trials, cfg.seed, cfg.train.features.max_dim);
    for (std::size_t t = 0; t < r.distances.size(); ++t) {
      csv += csv_row({format_double(delta), std::to_string(t), format_double(r.distances[t])});
    }
    verdict.passed = verdict.passed && r.passed;
    verdict.statistics.emplace_back("max_ratio@" + format_double(delta), r.max_ratio);
  }
  return {verdict, csv};
}

double full_supervised_loss(std::span<const LabeledGraph> data, const ModelParams& p, const TrainConfig& cfg,
                            const PersistenceDiagram* d_normal) {
  std::vector<Example> batch;
  for (const auto& lg : data) batch.push_back({extract_features(lg.graph, p, cfg.features, d_normal).phi, lg.label});
  return loss(batch, p, FeatureVector::Zero(batch.front().phi.size()), cfg).sup;
}

ExperimentResult descent_experiment(const RunConfig& cfg) {
  SyntheticConfig sc;
  sc.n_graphs = 200;
  sc.n_accounts = 6;
  sc.n_transactions = 6;
  sc.fraud_ratio = 0.5;
  sc.fraud_motifs = {Motif::kCycle, Motif::kStar};
  sc.seed = derive_seed(cfg.seed, "dataset");
  std::vector<LabeledGraph> data = generate_synthetic(sc);
  for (auto& lg : data) lg.graph = preprocess(lg.graph, cfg.preprocess);
  TrainConfig tc = cfg.train_config();
  tc.t_max = cfg.lab.steps;
  tc.eta0 = cfg.lab.descent_eta0;
  tc.features.capacity = std::max<std::size_t>(tc.features.capacity, 6);

  const TrainedModel model = train(data, tc);
  ModelParams initial = initial_params(tc);
  const PersistenceDiagram* ref = tc.features.topology_enabled() ? &model.reference.d_normal : nullptr;
  const double l0 = full_supervised_loss(data, initial, tc, ref);
  const double l1 = full_supervised_loss(data, model.params, tc, ref);

  std::string csv = "step,eta,loss,l_sup,grad_norm,sum_eta,sum_eta_grad2\n";
  double sum_eta = 0.0, sum_g = 0.0;
  for (const auto& s : model.log) {
    sum_eta += s.eta;
    sum_g += s.eta * s.grad_norm * s.grad_norm;
    csv += csv_row({std::to_string(s.step), format_double(s.eta), format_double(s.loss), format_double(s.l_sup),
                    format_double(s.grad_norm), format_double(sum_eta), format_double(sum_g)});
  }
  Verdict verdict{"descent", false, {}, cfg.seed};
  verdict.statistics = {{"initial_l_sup", l0}, {"final_l_sup", l1}, {"l_sup_ratio", l1 / l0},
                        {"steps", static_cast<double>(model.log.size())}};
  bool sublinear = false;
  try {
    const DescentReport d = descent_check(model.log);
    verdict.statistics.emplace_back("eta_sum_slope", d.eta_sum_slope);
    verdict.statistics.emplace_back("eta_sq_ratio", d.eta_sq_ratio);
    verdict.statistics.emplace_back("gradient_sum_ratio", d.gradient_sum_ratio);
    sublinear = d.sublinear;
  } catch (const InsufficientDataError&) {
    sublinear = false;
  }
  verdict.passed = l1 < 0.7 * l0 && sublinear;
  return {verdict, csv};
}

ExperimentResult pl_experiment(const RunConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "pl"));
  const Eigen::Index n = 200, d = 5;
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd w(d);
  for (Eigen::Index j = 0; j < d; ++j) w(j) = rng.normal();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
  }
  Eigen::VectorXd y = x * w;
  for (Eigen::Index i = 0; i < n; ++i) y(i) += 0.1 * rng.normal();
  const PlReport r = pl_demo(x, y, 1e-2, 200);
  std::string csv = "step,gap,bound\n";
  for (std::size_t t = 0; t < r.gaps.size(); ++t) {
    const double bound = std::pow(1.0 - r.mu / r.smoothness, static_cast<double>(t)) * r.gaps[0];
    csv += csv_row({std::to_string(t), format_double(r.gaps[t]), format_double(bound)});
  }
  Verdict verdict{"pl", r.geometric, {{"mu", r.mu}, {"smoothness", r.smoothness}, {"final_gap", r.gaps.back()}},
                  cfg.seed};
  return {verdict, csv};
}

ExperimentResult benchmark_experiment(const RunConfig& cfg) {
  const BenchmarkReport b = run_benchmark(cfg);
  std::string csv = "model,roc_auc\n";
  csv += csv_row({"full", format_double(b.full_auc)});
  csv += csv_row({"no_topology", format_double(b.no_topology_auc)});
  csv += csv_row({"degree_baseline", format_double(b.degree_auc)});
  Verdict verdict{"benchmark",
                  b.passed,
                  {{"full_auc", b.full_auc},
                   {"no_topology_auc", b.no_topology_auc},
                   {"degree_auc", b.degree_auc},
                   {"test_positives", static_cast<double>(b.test_positives)},
                   {"test_size", static_cast<double>(b.test_size)}},
                  cfg.seed};
  return {verdict, csv};
}

}  // namespace

std::vector<DatasetRecord> build_dataset(const RunConfig& cfg) {
  cfg.validate();
  std::vector<DatasetRecord> records;
  if (cfg.csv_path) {
    std::ifstream in(*cfg.csv_path);
    if (!in) throw DataError("cannot read " + *cfg.csv_path);
    const TransactionGraph source = parse_edge_list(in);
    for (std::size_t k = 0; k < cfg.sample_count; ++k) {
      DatasetRecord r;
      r.id = graph_id(k);
      r.graph.seed = derive_seed(cfg.seed, "sampling", k);
      r.graph.graph = sample_subgraph(source, cfg.kappa, r.graph.seed);
      for (const auto& e : r.graph.graph.edges) {
        if (e.label == Label::kFraud) r.graph.label = 1;
      }
      records.push_back(std::move(r));
    }
  } else {
    auto graphs = generate_synthetic(cfg.synthetic_config());
    for (std::size_t k = 0; k < graphs.size(); ++k) records.push_back({graph_id(k), "", std::move(graphs[k])});
  }
  assign_splits(records, cfg.test_fraction, cfg.seed);
  return records;
}

std::vector<LabeledGraph> select_split(std::span<const DatasetRecord> records, std::string_view split,
                                       const PreprocessConfig& pre) {
  std::vector<LabeledGraph> out;
  for (const auto& r : records) {
    if (split != "all" && r.split != split) continue;
    LabeledGraph lg = r.graph;
    lg.graph = preprocess(lg.graph, pre);
    out.push_back(std::move(lg));
  }
  return out;
}

std::vector<ScoreRecord> score_records(std::span<const DatasetRecord> records, const TrainedModel& model,
                                       const PreprocessConfig& pre, std::optional<double> tau, std::size_t threads) {
  std::vector<ScoreRecord> out;
  for (auto& s : score_all(records, model, pre, tau, threads)) out.push_back(std::move(s.record));
  return out;
}

MetricsReport evaluate_scores(std::span<const ScoreRecord> scores, std::size_t k, std::optional<double> tau) {
  if (scores.empty()) throw InsufficientDataError("no scores to evaluate");
  EvalInput in;
  for (const auto& s : scores) {
    in.scores.push_back(s.score);
    in.probabilities.push_back(s.probability);
    in.labels.push_back(s.label);
  }
  in.k = k;
  in.tau = tau.value_or(scores.front().tau);
  return evaluate_metrics(in);
}

std::vector<std::pair<double, double>> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0 || neg == 0) throw UndefinedMetricError("ROC curve needs both classes");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    pts.emplace_back(fp / neg, tp / pos);
    i = j;
  }
  return pts;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"barren_plateau", "contractivity", "stability",
                                                 "descent",        "pl",            "benchmark"};
  return names;
}

ExperimentResult run_experiment(std::string_view name, const RunConfig& cfg) {
  cfg.validate();
  if (name == "barren_plateau") return barren_plateau_experiment(cfg);
  if (name == "contractivity") return contractivity_experiment(cfg);
  if (name == "stability") return stability_experiment(cfg);
  if (name == "descent") return descent_experiment(cfg);
  if (name == "pl") return pl_experiment(cfg);
  if (name == "benchmark") return benchmark_experiment(cfg);
  std::string known;
  for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown experiment '" + std::string(name) + "'; expected one of: " + known);
}

BenchmarkReport run_benchmark(const RunConfig& cfg) {
  if (cfg.csv_path) throw ConfigError("the benchmark runs on synthetic data only");
  const auto records = build_dataset(cfg);
  const auto train_set = select_split(records, "train", cfg.preprocess);
  const auto test_set = select_split(records, "test", cfg.preprocess);
  const auto y = labels_of(test_set);

  BenchmarkReport r;
  r.test_size = test_set.size();
  r.test_positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));

  TrainConfig full = cfg.train_config();
  full.features.ablation = Ablation::kFull;
  r.full_auc = roc_auc(anomaly_scores(test_set, train(train_set, full), cfg.threads), y);

  TrainConfig plain = cfg.train_config();
  plain.features.ablation = Ablation::kNoTopology;
  r.no_topology_auc = roc_auc(anomaly_scores(test_set, train(train_set, plain), cfg.threads), y);

  DegreeBaseline baseline;
  baseline.fit(train_set);
  std::vector<double> b;
  for (const auto& lg : test_set) b.push_back(baseline.probability(lg.graph));
  r.degree_auc = roc_auc(b, y);

  r.passed = r.full_auc >= 0.85 && r.full_auc > r.no_topology_auc && r.full_auc > r.degree_auc;
  return r;
}

void cmd_generate(const RunConfig& cfg) {
  const auto records = build_dataset(cfg);
  std::ostringstream data;
  write_dataset(data, records);
  const auto positives = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.graph.label == 1; });
  OutputSet out(cfg, "generate");
  out.add("dataset.jsonl", data.str());
  out.finish({{"graphs", records.size()}, {"positives", positives}});
}

void cmd_train(const RunConfig& cfg, const fs::path& dataset) {
  cfg.validate();
  std::istringstream in(read_file(dataset));
  const auto records = read_dataset(in);
  const auto train_set = select_split(records, "train", cfg.preprocess);
  if (train_set.empty()) throw InsufficientDataError("dataset has no training records");
  const TrainedModel model = train(train_set, cfg.train_config());
  std::ostringstream log;
  write_training_log(log, model.log);
  OutputSet out(cfg, "train");
  out.add("model.json", model_to_json(model));
  out.add("training_log.csv", log.str());
  out.finish({{"steps", model.log.size()}, {"tau", model.tau}});
}

void cmd_score(const RunConfig& cfg, const fs::path& model_path, const fs::path& dataset, std::string_view split) {
  cfg.validate();
  if (split != "train" && split != "test" && split != "all") throw ConfigError("split must be train, test or all");
  const TrainedModel model = model_from_json(read_file(model_path));
  std::istringstream in(read_file(dataset));
  auto records = read_dataset(in);
  std::erase_if(records, [&](const DatasetRecord& r) { return split != "all" && r.split != split; });
  const auto scored = score_all(records, model, cfg.preprocess, cfg.eval_tau, cfg.threads);

  std::ostringstream scores, diagrams, lands;
  bool header = true;
  for (const auto& s : scored) {
    write_scores(scores, std::span(&s.record, 1));
    write_diagram(diagrams, s.record.id, s.diagram);
    write_landscape_csv(lands, s.record.id, s.landscapes, header);
    header = false;
  }
  if (header) lands << "graph_id,dim,x,y\n";
  OutputSet out(cfg, "score");
  out.add("scores.jsonl", scores.str());
  out.add("diagrams.jsonl", diagrams.str());
  out.add("landscapes.csv", lands.str());
  out.finish({{"records", scored.size()}, {"split", std::string(split)}});
}

MetricsReport cmd_eval(const RunConfig& cfg, const fs::path& scores_path) {
  cfg.validate();
  std::istringstream in(read_file(scores_path));
  const auto scores = read_scores(in);
  if (scores.empty()) throw InsufficientDataError("scores file is empty");
  if (cfg.eval_k > scores.size()) throw ConfigError("eval.k exceeds the number of scored graphs");
  const MetricsReport m = evaluate_scores(scores, cfg.eval_k, cfg.eval_tau);

  std::vector<double> s;
  std::vector<int> y;
  for (const auto& r : scores) {
    s.push_back(r.score);
    y.push_back(r.label);
  }
  std::string roc = "fpr,tpr\n";
  for (const auto& [f, t] : roc_curve(s, y)) roc += csv_row({format_double(f), format_double(t)});

  Json report{{"f1", m.f1},
              {"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"mcc", m.mcc},
              {"log_loss", m.log_loss},
              {"roc_auc", m.roc_auc},
              {"fpr", m.fpr},
              {"precision_at_k", m.precision_at_k},
              {"k", cfg.eval_k},
              {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"fn", m.confusion.fn}, {"tn", m.confusion.tn}}},
              {"degenerate", m.degenerate}};
  OutputSet out(cfg, "eval");
  out.add("metrics.csv", metrics_csv_header() + "\n" + metrics_csv_row(m) + "\n");
  out.add("metrics.json", report.dump(2) + "\n");
  out.add("roc.csv", roc);
  out.finish();
  return m;
}

Verdict cmd_lab(const RunConfig& cfg, std::string_view experiment) {
  const ExperimentResult r = run_experiment(experiment, cfg);
  OutputSet out(cfg, "lab_" + std::string(experiment));
  out.add("lab_" + std::string(experiment) + ".csv", r.csv);
  out.add("lab_" + std::string(experiment) + ".json", verdict_to_json(r.verdict));
  out.finish({{"passed", r.verdict.passed}});
  return r.verdict;
}

void cmd_embed(const RunConfig& cfg, const fs::path& dataset, const fs::path* model_path) {
  cfg.validate();
  std::istringstream in(read_file(dataset));
  const auto records = read_dataset(in);
  TrainedModel model;
  if (model_path) {
    model = model_from_json(read_file(*model_path));
  } else {
    model.config = cfg.train_config();
    model.params = initial_params(model.config);
  }
  const FeatureConfig& fc = model.config.features;
  const PersistenceDiagram* d_normal =
      model.trained && fc.topology_enabled() && !model.reference.empty() ? &model.reference.d_normal : nullptr;
  struct Embedded {
    DensityMatrix rho;
    FeatureVector phi;
  };
  const auto embedded = parallel_map<Embedded>(records.size(), cfg.threads, [&](std::size_t i) {
    const TransactionGraph g = preprocess(records[i].graph.graph, cfg.preprocess);
    const GraphBinding b = bind_graph(g, fc.capacity);
    std::vector<LayerParams> layers;
    for (std::size_t l = 0; l < fc.layers; ++l) layers.push_back(layer_params(model.params, b, l));
    const DensityMatrix rho0 = encode_state(g, {model.params.theta_e()}).rho;
    auto result = forward(rho0, layers, g, fc.ablation == Ablation::kLinearUnitary);
    return Embedded{std::move(result.rho), extract_features(g, model.params, fc, d_normal).phi};
  });
  std::vector<DensityMatrix> states;
  std::ostringstream features;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    states.push_back(embedded[i].rho);
    Json phi = Json::array();
    for (Eigen::Index j = 0; j < embedded[i].phi.size(); ++j) phi.push_back(embedded[i].phi(j));
    features << Json{{"graph_id", records[i].id}, {"label", records[i].graph.label}, {"phi", phi}}.dump() << '\n';
  }
  std::ostringstream bin;
  write_densities(bin, states);
  OutputSet out(cfg, "embed");
  out.add("densities.qtdm", bin.str());
  out.add("features.jsonl", features.str());
  out.finish({{"records", records.size()}});
}

}  // namespace qtgnn
