#include "qtgnn/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qtgnn/error.hpp"
#include "qtgnn/rng.hpp"

namespace qtgnn {

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) - y z without overflow.
double bce_from_logit(double z, int y) {
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - (y == 1 ? z : 0.0);
}

double effective_lambda1(const TrainConfig& cfg) {
  return cfg.features.ablation == Ablation::kSupervisedOnly ? 0.0 : cfg.lambda1;
}

double effective_alpha(const TrainConfig& cfg) {
  return cfg.features.topology_enabled() ? cfg.alpha : 0.0;
}

double effective_beta(const TrainConfig& cfg) {
  return cfg.features.topology_enabled() ? cfg.beta : 0.0;
}

std::vector<LandscapeFunction> landscapes_of(const PersistenceDiagram& d, int max_dim) {
  std::vector<LandscapeFunction> out;
  for (int k = 0; k <= max_dim; ++k) out.push_back(landscape(d, k));
  return out;
}

const PersistenceDiagram* normal_diagram(const NormalReference& ref, const FeatureConfig& cfg) {
  return cfg.topology_enabled() && !ref.empty() ? &ref.d_normal : nullptr;
}

// At most `cap` indices out of n, evenly spaced (cap == 0 keeps all).
std::vector<std::size_t> spread(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (cap == 0 || n <= cap) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t i = 0; i < cap; ++i) idx.push_back(i * n / cap);
  return idx;
}

struct Evaluated {
  LossTerms terms;
  std::vector<double> grad;
};

Evaluated evaluate(std::span<const BatchItem> batch, const ModelParams& p, const NormalReference& snapshot,
                   const TrainConfig& cfg, bool with_gradient) {
  if (batch.empty()) throw ArgumentError("batch is empty");
  const auto& lay = p.layout;
  const PersistenceDiagram* dn = normal_diagram(snapshot, cfg.features);
  const double lambda1 = effective_lambda1(cfg);

  std::vector<FeatureProbe> probes;
  probes.reserve(batch.size());
  std::vector<Example> examples;
  for (const auto& item : batch) {
    probes.emplace_back(*item.graph, p, cfg.features, dn);
    examples.push_back({probes.back().base().phi, item.label});
  }
  FeatureVector centroid = snapshot.centroid;
  if (centroid.size() == 0) centroid = FeatureVector::Zero(static_cast<Eigen::Index>(lay.feature_dim()));

  Evaluated out;
  out.terms = loss(examples, p, centroid, cfg);
  if (!std::isfinite(out.terms.total)) throw TrainingError(0, "loss is not finite");
  if (!with_gradient) return out;

  out.grad.assign(lay.size(), 0.0);
  const auto b = static_cast<double>(batch.size());
  const double n_normal = static_cast<double>(std::count_if(
      examples.begin(), examples.end(), [](const Example& e) { return e.label == 0; }));
  const Eigen::VectorXd head = p.head();
  const double h = cfg.fd_step;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const FeatureVector& phi = examples[i].phi;
    const Eigen::VectorXd z = p.standardize(phi);
    const double residual = head_probability(phi, p) - examples[i].label;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      out.grad[lay.head_index(static_cast<std::size_t>(j))] += residual * z(j) / b;
    }
    out.grad[lay.bias_index()] += residual / b;

    Eigen::VectorXd dphi = residual / b * (p.head_scale.size() ? Eigen::VectorXd(head.cwiseQuotient(p.head_scale)) : head);
    if (examples[i].label == 0 && lambda1 > 0.0) dphi += lambda1 * 2.0 * (phi - centroid) / n_normal;
    for (std::size_t idx : probes[i].active()) {
      const FeatureVector plus = probes[i].shifted(idx, h);
      const FeatureVector minus = probes[i].shifted(idx, -h);
      const double g = dphi.dot(plus - minus) / (2.0 * h);
      if (!std::isfinite(g)) throw TrainingError(idx, "non-finite derivative");
      out.grad[idx] += g;
    }
  }
  for (std::size_t idx = 0; idx < lay.size(); ++idx) {
    if (lay.regularized(idx)) out.grad[idx] += 2.0 * cfg.lambda2 * p[idx];
    if (!std::isfinite(out.grad[idx])) throw TrainingError(idx, "non-finite gradient");
  }
  return out;
}

ScoreBreakdown score_features(GraphFeatures f, const std::vector<LandscapeFunction>& lands,
                              const TrainedModel& model, std::optional<std::size_t> exclude) {
  const NormalReference& ref = model.reference;
  if (!model.trained || ref.empty()) throw StateError("model has no normal reference");
  const double alpha = effective_alpha(model.config);
  const double beta = effective_beta(model.config);
  ScoreBreakdown out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < ref.members.size(); ++m) {
    if (exclude && *exclude == m) continue;
    const double feat = (f.phi - ref.members[m]).squaredNorm();
    if (feat >= best) continue;
    double land = 0.0;
    if (alpha > 0.0) {
      for (std::size_t k = 0; k < lands.size(); ++k) land += landscape_l1(lands[k], ref.landscapes[m][k]);
      land *= alpha;
    }
    if (feat + land < best) {
      best = feat + land;
      out.feature_term = feat;
      out.landscape_term = land;
      out.nearest = m;
    }
  }
  if (!std::isfinite(best)) best = out.feature_term = out.landscape_term = 0.0;
  const FeatureLayout fl(model.config.features);
  out.w2_term = beta > 0.0 ? beta * f.phi(static_cast<Eigen::Index>(fl.w2())) : 0.0;
  out.score = best + out.w2_term;
  out.probability = head_probability(f.phi, model.params);
  out.features = std::move(f);
  return out;
}

// Index of the tent attaining the landscape at x among dimension-k points,
// or nullopt where the landscape vanishes.
std::optional<std::size_t> dominant_point(const PersistenceDiagram& d, int k, double x) {
  std::optional<std::size_t> arg;
  double best = 0.0;
  for (std::size_t i = 0; i < d.features.size(); ++i) {
    const auto& p = d.features[i];
    if (p.dim != k) continue;
    const double v = p.mult * std::min(x - p.birth, p.death - x);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return arg;
}

// Center and scale of the head input, from a seeded sample of the training
// graphs at the initial parameters. Constant features keep scale 1.
void fit_head_standardization(ModelParams& p, std::span<const BatchItem> items, const TrainConfig& cfg) {
  std::vector<std::size_t> idx(items.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(derive_seed(cfg.seed, "standardize"));
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(std::min(idx.size(), cfg.snapshot_size));
  std::sort(idx.begin(), idx.end());
  std::vector<FeatureVector> rows;
  for (std::size_t i : idx) rows.push_back(extract_features(*items[i].graph, p, cfg.features, nullptr).phi);
  const auto dim = rows.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim), var = Eigen::VectorXd::Zero(dim);
  for (const auto& r : rows) mean += r / static_cast<double>(rows.size());
  for (const auto& r : rows) var += (r - mean).cwiseAbs2() / static_cast<double>(rows.size());
  p.head_center = mean;
  p.head_scale = var.cwiseSqrt().unaryExpr([](double v) { return v > 1e-12 ? v : 1.0; });
}

}  // namespace

std::string_view to_string(Schedule s) {
  switch (s) {
    case Schedule::kAdaptive:
      return "adaptive";
    case Schedule::kDecay:
      return "decay";
    case Schedule::kConstant:
      return "constant";
  }
  return "adaptive";
}

Schedule schedule_from_string(std::string_view s) {
  if (s == "adaptive") return Schedule::kAdaptive;
  if (s == "decay") return Schedule::kDecay;
  if (s == "constant") return Schedule::kConstant;
  throw ConfigError("unknown schedule '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  features.validate();
  if (lambda1 < 0 || lambda2 < 0) throw ConfigError("lambda1 and lambda2 must be non-negative");
  if (!(eta0 > 0)) throw ConfigError("eta0 must be positive");
  if (!(sigma > 0)) throw ConfigError("sigma must be positive");
  if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  if (alpha < 0 || beta < 0) throw ConfigError("alpha and beta must be non-negative");
  if (!(eps_conv > 0)) throw ConfigError("eps_conv must be positive");
  if (!(tau_quantile > 0 && tau_quantile <= 1)) throw ConfigError("tau_quantile must lie in (0, 1]");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (refresh_every == 0) throw ConfigError("refresh_every must be positive");
  if (snapshot_size == 0) throw ConfigError("snapshot_size must be positive");
  if (!(fd_step > 0)) throw ConfigError("fd_step must be positive");
  if (!(init_scale >= 0)) throw ConfigError("init_scale must be non-negative");
  if (tau && std::isnan(*tau)) throw ConfigError("tau must not be NaN");
}

PersistenceDiagram medoid_diagram(std::span<const PersistenceDiagram> diagrams) {
  if (diagrams.empty()) throw StateError("no diagrams to summarize");
  const std::size_t m = diagrams.size();
  std::vector<double> total(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double w = wasserstein2(diagrams[i], diagrams[j]);
      total[i] += w * w;
      total[j] += w * w;
    }
  }
  const auto best = std::min_element(total.begin(), total.end()) - total.begin();
  return diagrams[static_cast<std::size_t>(best)];
}

NormalReference build_reference(std::span<const TransactionGraph* const> normals, const ModelParams& p,
                                const FeatureConfig& cfg) {
  if (normals.empty()) throw StateError("reference needs at least one normal graph");
  NormalReference ref;
  std::vector<PersistenceDiagram> diagrams;
  for (const auto* g : normals) {
    GraphFeatures f = extract_features(*g, p, cfg, nullptr);
    ref.members.push_back(std::move(f.phi));
    diagrams.push_back(std::move(f.diagram));
  }
  if (cfg.topology_enabled()) {
    std::vector<PersistenceDiagram> pool;
    for (std::size_t i : spread(diagrams.size(), 64)) pool.push_back(diagrams[i]);
    ref.d_normal = medoid_diagram(pool);
    const auto w2 = static_cast<Eigen::Index>(FeatureLayout(cfg).w2());
    for (std::size_t m = 0; m < diagrams.size(); ++m) {
      ref.members[m](w2) = wasserstein2(diagrams[m], ref.d_normal);
    }
  }
  for (const auto& d : diagrams) ref.landscapes.push_back(landscapes_of(d, cfg.max_dim));
  ref.centroid = FeatureVector::Zero(ref.members.front().size());
  for (const auto& phi : ref.members) ref.centroid += phi;
  ref.centroid /= static_cast<double>(ref.members.size());
  return ref;
}

double kernel_similarity(const FeatureVector& phi, const NormalReference& ref, double sigma) {
  if (ref.empty()) throw StateError("normal reference is empty");
  if (!(sigma > 0)) throw ArgumentError("sigma must be positive");
  double k = 1.0;
  for (const auto& m : ref.members) {
    if (m.size() != phi.size()) throw ArgumentError("feature length mismatch");
    k = std::min(k, std::exp(-(phi - m).squaredNorm() / (sigma * sigma)));
  }
  return k;
}

Hypothesis hypothesis_test(const FeatureVector& phi, const NormalReference& ref, double delta, double sigma) {
  return kernel_similarity(phi, ref, sigma) >= delta ? Hypothesis::kH0 : Hypothesis::kH1;
}

double head_logit(const FeatureVector& phi, const ModelParams& p) {
  if (static_cast<std::size_t>(phi.size()) != p.layout.feature_dim()) {
    throw ArgumentError("feature length does not match the head");
  }
  return p.head().dot(p.standardize(phi)) + p.bias();
}

double head_probability(const FeatureVector& phi, const ModelParams& p) {
  return logistic(head_logit(phi, p));
}

LossTerms loss(std::span<const Example> batch, const ModelParams& p, const FeatureVector& centroid,
               const TrainConfig& cfg) {
  if (batch.empty()) throw ArgumentError("batch is empty");
  LossTerms t;
  std::size_t normals = 0;
  for (const auto& e : batch) {
    t.sup += bce_from_logit(head_logit(e.phi, p), e.label);
    if (e.label == 0) {
      t.unsup += (e.phi - centroid).squaredNorm();
      ++normals;
    }
  }
  t.sup /= static_cast<double>(batch.size());
  if (normals > 0) t.unsup /= static_cast<double>(normals);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (p.layout.regularized(i)) t.reg += p[i] * p[i];
  }
  t.total = t.sup + effective_lambda1(cfg) * t.unsup + cfg.lambda2 * t.reg;
  return t;
}

LossTerms batch_loss(std::span<const BatchItem> batch, const ModelParams& p, const NormalReference& snapshot,
                     const TrainConfig& cfg) {
  return evaluate(batch, p, snapshot, cfg, false).terms;
}

std::vector<double> gradient(std::span<const BatchItem> batch, const ModelParams& p,
                             const NormalReference& snapshot, const TrainConfig& cfg) {
  return evaluate(batch, p, snapshot, cfg, true).grad;
}

ModelParams initial_params(const TrainConfig& cfg) {
  const FeatureConfig& fc = cfg.features;
  ModelParams p{ParameterLayout(fc.capacity, fc.layers, FeatureLayout(fc).size()), {}, {}, {}};
  const auto& lay = p.layout;
  p.values.assign(lay.size(), 0.0);
  p.values[lay.theta_e_index()] = cfg.theta_e_init;
  Rng rng(derive_seed(cfg.seed, "init"));
  for (std::size_t i = 1; i < lay.head_offset(); ++i) {
    p.values[i] = lay.is_logit(i) ? cfg.channel_logit_init : rng.uniform(-cfg.init_scale, cfg.init_scale);
  }
  return p;
}

TrainedModel train(std::span<const LabeledGraph> dataset, const TrainConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  std::vector<const TransactionGraph*> normals;
  std::vector<BatchItem> items;
  for (const auto& lg : dataset) {
    items.push_back({&lg.graph, lg.label});
    if (lg.label == 0) normals.push_back(&lg.graph);
  }
  if (normals.empty() || normals.size() == items.size()) {
    throw ConfigError("training data needs both normal and fraud graphs");
  }

  TrainedModel model;
  model.config = cfg;
  model.params = initial_params(cfg);
  fit_head_standardization(model.params, items, cfg);

  std::vector<std::size_t> snap_idx(normals.size());
  for (std::size_t i = 0; i < snap_idx.size(); ++i) snap_idx[i] = i;
  Rng snap_rng(derive_seed(cfg.seed, "snapshot"));
  snap_rng.shuffle(snap_idx.begin(), snap_idx.end());
  snap_idx.resize(std::min(snap_idx.size(), cfg.snapshot_size));
  std::sort(snap_idx.begin(), snap_idx.end());
  std::vector<const TransactionGraph*> snap_graphs;
  for (std::size_t i : snap_idx) snap_graphs.push_back(normals[i]);

  Rng batch_rng(derive_seed(cfg.seed, "training"));
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();

  NormalReference snapshot;
  std::vector<double> history;
  bool stalled = false;
  for (std::size_t t = 0; t < cfg.t_max; ++t) {
    if (t % cfg.refresh_every == 0) snapshot = build_reference(snap_graphs, model.params, cfg.features);
    std::vector<BatchItem> batch;
    while (batch.size() < std::min(cfg.batch_size, items.size())) {
      if (cursor == order.size()) {
        batch_rng.shuffle(order.begin(), order.end());
        cursor = 0;
      }
      batch.push_back(items[order[cursor++]]);
    }
    const Evaluated ev = evaluate(batch, model.params, snapshot, cfg, true);
    double norm2 = 0.0;
    for (double g : ev.grad) norm2 += g * g;

    history.push_back(ev.terms.total);
    if (history.size() > 5) {
      const double before = history[history.size() - 6];
      if (before - ev.terms.total < 1e-4 * std::abs(before)) stalled = true;
    }
    const double decayed = cfg.eta0 / std::sqrt(static_cast<double>(t) + 1.0);
    double eta = cfg.eta0;
    if (cfg.schedule == Schedule::kDecay || (cfg.schedule == Schedule::kAdaptive && stalled)) eta = decayed;

    const TrainStep step{t, eta, ev.terms.total, ev.terms.sup, ev.terms.unsup, ev.terms.reg, std::sqrt(norm2)};
    model.log.push_back(step);
    if (step.grad_norm < cfg.eps_conv) break;
    for (std::size_t i = 0; i < ev.grad.size(); ++i) model.params.values[i] -= eta * ev.grad[i];
    if (on_step && !on_step(step)) break;
  }
  model.trained = true;
  finalize_reference(model, normals);
  return model;
}

void finalize_reference(TrainedModel& model, std::span<const TransactionGraph* const> normals) {
  const TrainConfig& cfg = model.config;
  std::vector<const TransactionGraph*> kept;
  for (std::size_t i : spread(normals.size(), cfg.max_reference)) kept.push_back(normals[i]);
  model.reference = build_reference(kept, model.params, cfg.features);
  model.trained = true;
  if (cfg.tau) {
    model.tau = *cfg.tau;
    return;
  }
  const auto& ref = model.reference;
  if (ref.members.size() < 2) {
    model.tau = 0.0;
    return;
  }
  // Leave-one-out scores of the reference members themselves.
  std::vector<double> scores;
  for (std::size_t m = 0; m < ref.members.size(); ++m) {
    GraphFeatures f{ref.members[m], {}};
    scores.push_back(score_features(std::move(f), ref.landscapes[m], model, m).score);
  }
  std::sort(scores.begin(), scores.end());
  const double pos = cfg.tau_quantile * static_cast<double>(scores.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, scores.size() - 1);
  model.tau = scores[lo] + (pos - static_cast<double>(lo)) * (scores[hi] - scores[lo]);
}

ScoreBreakdown score_graph(const TransactionGraph& g, const TrainedModel& model,
                           std::optional<std::size_t> exclude) {
  if (!model.trained || model.reference.empty()) throw StateError("model has not been trained");
  const FeatureConfig& fc = model.config.features;
  GraphFeatures f = extract_features(g, model.params, fc, normal_diagram(model.reference, fc));
  const auto lands = landscapes_of(f.diagram, fc.max_dim);
  return score_features(std::move(f), lands, model, exclude);
}

double anomaly_score(const TransactionGraph& g, const TrainedModel& model) {
  return score_graph(g, model).score;
}

int decide(double s, double tau) { return s > tau ? 1 : 0; }

AttributionReport attribute(const TransactionGraph& g, const TrainedModel& model) {
  const ScoreBreakdown sb = score_graph(g, model);
  const FeatureConfig& fc = model.config.features;
  const double alpha = effective_alpha(model.config);
  const PersistenceDiagram& d = sb.features.diagram;

  AttributionReport r;
  r.landscapes = landscapes_of(d, fc.max_dim);
  for (int k = 0; k <= fc.max_dim; ++k) {
    std::vector<double> gk;
    for (double x : fc.eps_grid) gk.push_back(landscape_gradient(d, k, x));
    r.gradients.push_back(std::move(gk));
  }
  std::vector<double> contribution(d.features.size(), 0.0);
  const auto& other = model.reference.landscapes[sb.nearest];
  for (int k = 0; k <= fc.max_dim; ++k) {
    const auto& f = r.landscapes[static_cast<std::size_t>(k)];
    const auto& h = other[static_cast<std::size_t>(k)];
    std::vector<double> xs;
    for (const auto* l : {&f, &h}) {
      for (const auto& bp : l->breakpoints) xs.push_back(bp.first);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    auto credit = [&](double a, double b, double area) {
      const auto who = dominant_point(d, k, (a + b) / 2.0);
      if (who) {
        contribution[*who] += alpha * area;
      } else {
        r.residual += alpha * area;
      }
    };
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double x0 = xs[i], x1 = xs[i + 1];
      const double v0 = f(x0) - h(x0), v1 = f(x1) - h(x1);
      if (v0 * v1 >= 0.0) {
        credit(x0, x1, (std::abs(v0) + std::abs(v1)) / 2.0 * (x1 - x0));
      } else {
        const double xc = x0 + (x1 - x0) * std::abs(v0) / (std::abs(v0) + std::abs(v1));
        credit(x0, xc, std::abs(v0) / 2.0 * (xc - x0));
        credit(xc, x1, std::abs(v1) / 2.0 * (x1 - xc));
      }
    }
  }
  for (std::size_t i = 0; i < d.features.size(); ++i) {
    const auto& p = d.features[i];
    if (!std::isfinite(p.death)) continue;
    r.features.push_back({p, (p.death - p.birth) * p.mult, contribution[i]});
  }
  std::stable_sort(r.features.begin(), r.features.end(),
                   [](const AttributedFeature& a, const AttributedFeature& b) { return a.persistence > b.persistence; });
  r.top.assign(r.features.begin(), r.features.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(3, r.features.size())));
  r.landscape_term = sb.landscape_term;
  return r;
}

std::vector<double> DegreeBaseline::statistics(const TransactionGraph& g) {
  const auto deg = g.degrees();
  const double n = static_cast<double>(deg.size());
  double mean = 0.0, max = 0.0;
  for (auto v : deg) {
    mean += static_cast<double>(v);
    max = std::max(max, static_cast<double>(v));
  }
  mean = n > 0 ? mean / n : 0.0;
  double var = 0.0;
  for (auto v : deg) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
  var = n > 0 ? var / n : 0.0;
  return {n, static_cast<double>(g.edge_count()), mean, max, std::sqrt(var)};
}

void DegreeBaseline::fit(std::span<const LabeledGraph> data, double l2, std::size_t iterations) {
  if (data.empty()) throw ArgumentError("baseline needs training data");
  std::vector<std::vector<double>> x;
  for (const auto& lg : data) x.push_back(statistics(lg.graph));
  const std::size_t dim = x.front().size();
  const double n = static_cast<double>(x.size());
  mean_.assign(dim, 0.0);
  scale_.assign(dim, 0.0);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < dim; ++j) mean_[j] += row[j] / n;
  }
  for (const auto& row : x) {
    for (std::size_t j = 0; j < dim; ++j) scale_[j] += (row[j] - mean_[j]) * (row[j] - mean_[j]) / n;
  }
  for (auto& s : scale_) s = s > 0 ? std::sqrt(s) : 1.0;
  for (auto& row : x) {
    for (std::size_t j = 0; j < dim; ++j) row[j] = (row[j] - mean_[j]) / scale_[j];
  }
  weights_.assign(dim, 0.0);
  bias_ = 0.0;
  const double lr = 0.5;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> gw(dim, 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double z = bias_;
      for (std::size_t j = 0; j < dim; ++j) z += weights_[j] * x[i][j];
      const double r = logistic(z) - data[i].label;
      for (std::size_t j = 0; j < dim; ++j) gw[j] += r * x[i][j] / n;
      gb += r / n;
    }
    for (std::size_t j = 0; j < dim; ++j) weights_[j] -= lr * (gw[j] + 2.0 * l2 * weights_[j]);
    bias_ -= lr * gb;
  }
}

double DegreeBaseline::probability(const TransactionGraph& g) const {
  if (weights_.empty()) throw StateError("baseline has not been fitted");
  const auto s = statistics(g);
  double z = bias_;
  for (std::size_t j = 0; j < s.size(); ++j) z += weights_[j] * (s[j] - mean_[j]) / scale_[j];
  return logistic(z);
}

}  // namespace qtgnn
