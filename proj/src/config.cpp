#include "qtgnn/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "qtgnn/error.hpp"
#include "qtgnn/rng.hpp"

namespace qtgnn {

namespace {

using Json = nlohmann::ordered_json;

struct Entry {
  std::string key;
  std::function<Json(const RunConfig&)> get;
  std::function<void(RunConfig&, const Json&)> set;
};

template <typename T>
T as(const Json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(key + ": expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          throw ConfigError(key + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(key + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(key + ": expected a string");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

template <typename T>
std::vector<T> as_list(const Json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key + ": expected a list");
  std::vector<T> out;
  for (const auto& x : v) out.push_back(as<T>(x, key));
  return out;
}

template <typename T, typename Field>
Entry scalar(std::string key, Field field) {
  return {key, [field](const RunConfig& c) { return Json(field(const_cast<RunConfig&>(c))); },
          [field, key](RunConfig& c, const Json& v) { field(c) = as<T>(v, key); }};
}

template <typename T, typename Field>
Entry optional_scalar(std::string key, Field field) {
  return {key,
          [field](const RunConfig& c) {
            const auto& o = field(const_cast<RunConfig&>(c));
            return o ? Json(*o) : Json(nullptr);
          },
          [field, key](RunConfig& c, const Json& v) {
            if (v.is_null()) {
              field(c).reset();
            } else {
              field(c) = as<T>(v, key);
            }
          }};
}

template <typename T, typename Field>
Entry list(std::string key, Field field) {
  return {key, [field](const RunConfig& c) { return Json(field(const_cast<RunConfig&>(c))); },
          [field, key](RunConfig& c, const Json& v) { field(c) = as_list<T>(v, key); }};
}

#define QTGNN_FIELD(expr) [](RunConfig& c) -> auto& { return expr; }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(scalar<std::uint64_t>("seed", QTGNN_FIELD(c.seed)));
    t.push_back(optional_scalar<std::string>("dataset.csv", QTGNN_FIELD(c.csv_path)));

    t.push_back(scalar<std::size_t>("synthetic.n_graphs", QTGNN_FIELD(c.synthetic.n_graphs)));
    t.push_back(scalar<std::size_t>("synthetic.n_accounts", QTGNN_FIELD(c.synthetic.n_accounts)));
    t.push_back(scalar<std::size_t>("synthetic.n_transactions", QTGNN_FIELD(c.synthetic.n_transactions)));
    t.push_back(scalar<double>("synthetic.fraud_ratio", QTGNN_FIELD(c.synthetic.fraud_ratio)));
    t.push_back({"synthetic.motifs",
                 [](const RunConfig& c) {
                   Json out = Json::array();
                   for (Motif m : c.synthetic.fraud_motifs) out.push_back(std::string(to_string(m)));
                   return out;
                 },
                 [](RunConfig& c, const Json& v) {
                   std::set<Motif> motifs;
                   for (const auto& name : as_list<std::string>(v, "synthetic.motifs")) {
                     try {
                       motifs.insert(motif_from_string(name));
                     } catch (const Error& e) {
                       throw ConfigError(std::string("synthetic.motifs: ") + e.what());
                     }
                   }
                   c.synthetic.fraud_motifs = motifs;
                 }});

    t.push_back(scalar<std::int64_t>("preprocess.window", QTGNN_FIELD(c.preprocess.window)));
    t.push_back(scalar<double>("preprocess.filter_threshold", QTGNN_FIELD(c.preprocess.filter_threshold)));
    t.push_back(scalar<bool>("preprocess.min_max_normalize", QTGNN_FIELD(c.preprocess.min_max_normalize)));

    t.push_back(scalar<double>("sampling.kappa", QTGNN_FIELD(c.kappa)));
    t.push_back(scalar<std::size_t>("sampling.count", QTGNN_FIELD(c.sample_count)));
    t.push_back(scalar<double>("split.test_fraction", QTGNN_FIELD(c.test_fraction)));

    t.push_back(scalar<std::size_t>("model.capacity", QTGNN_FIELD(c.train.features.capacity)));
    t.push_back(scalar<std::size_t>("model.layers", QTGNN_FIELD(c.train.features.layers)));
    t.push_back(list<double>("model.eps_grid", QTGNN_FIELD(c.train.features.eps_grid)));
    t.push_back(scalar<int>("model.max_dim", QTGNN_FIELD(c.train.features.max_dim)));
    t.push_back(scalar<double>("model.eps_max", QTGNN_FIELD(c.train.features.eps_max)));
    t.push_back({"model.ablation",
                 [](const RunConfig& c) { return Json(std::string(to_string(c.train.features.ablation))); },
                 [](RunConfig& c, const Json& v) {
                   try {
                     c.train.features.ablation = ablation_from_string(as<std::string>(v, "model.ablation"));
                   } catch (const ConfigError&) {
                     throw;
                   } catch (const Error& e) {
                     throw ConfigError(std::string("model.ablation: ") + e.what());
                   }
                 }});

    t.push_back(scalar<double>("train.lambda1", QTGNN_FIELD(c.train.lambda1)));
    t.push_back(scalar<double>("train.lambda2", QTGNN_FIELD(c.train.lambda2)));
    t.push_back(scalar<double>("train.eta0", QTGNN_FIELD(c.train.eta0)));
    t.push_back(scalar<double>("train.sigma", QTGNN_FIELD(c.train.sigma)));
    t.push_back(scalar<double>("train.delta", QTGNN_FIELD(c.train.delta)));
    t.push_back(optional_scalar<double>("train.tau", QTGNN_FIELD(c.train.tau)));
    t.push_back(scalar<double>("train.tau_quantile", QTGNN_FIELD(c.train.tau_quantile)));
    t.push_back(scalar<double>("train.alpha", QTGNN_FIELD(c.train.alpha)));
    t.push_back(scalar<double>("train.beta", QTGNN_FIELD(c.train.beta)));
    t.push_back(scalar<std::size_t>("train.t_max", QTGNN_FIELD(c.train.t_max)));
    t.push_back(scalar<double>("train.eps_conv", QTGNN_FIELD(c.train.eps_conv)));
    t.push_back({"train.schedule", [](const RunConfig& c) { return Json(std::string(to_string(c.train.schedule))); },
                 [](RunConfig& c, const Json& v) {
                   try {
                     c.train.schedule = schedule_from_string(as<std::string>(v, "train.schedule"));
                   } catch (const ConfigError&) {
                     throw;
                   } catch (const Error& e) {
                     throw ConfigError(std::string("train.schedule: ") + e.what());
                   }
                 }});
    t.push_back(scalar<std::size_t>("train.batch_size", QTGNN_FIELD(c.train.batch_size)));
    t.push_back(scalar<std::size_t>("train.refresh_every", QTGNN_FIELD(c.train.refresh_every)));
    t.push_back(scalar<std::size_t>("train.snapshot_size", QTGNN_FIELD(c.train.snapshot_size)));
    t.push_back(scalar<std::size_t>("train.max_reference", QTGNN_FIELD(c.train.max_reference)));
    t.push_back(scalar<double>("train.fd_step", QTGNN_FIELD(c.train.fd_step)));
    t.push_back(scalar<double>("train.theta_e_init", QTGNN_FIELD(c.train.theta_e_init)));
    t.push_back(scalar<double>("train.channel_logit_init", QTGNN_FIELD(c.train.channel_logit_init)));
    t.push_back(scalar<double>("train.init_scale", QTGNN_FIELD(c.train.init_scale)));

    t.push_back(scalar<std::size_t>("eval.k", QTGNN_FIELD(c.eval_k)));
    t.push_back(optional_scalar<double>("eval.tau", QTGNN_FIELD(c.eval_tau)));
    t.push_back(scalar<std::size_t>("run.threads", QTGNN_FIELD(c.threads)));
    t.push_back(scalar<std::string>("run.output_dir", QTGNN_FIELD(c.output_dir)));

    t.push_back(list<std::size_t>("lab.depths", QTGNN_FIELD(c.lab.depths)));
    t.push_back(scalar<std::size_t>("lab.trials", QTGNN_FIELD(c.lab.trials)));
    t.push_back(scalar<double>("lab.scan_channel_p", QTGNN_FIELD(c.lab.scan_channel_p)));
    t.push_back(scalar<std::size_t>("lab.pairs", QTGNN_FIELD(c.lab.pairs)));
    t.push_back(scalar<double>("lab.contract_channel_p", QTGNN_FIELD(c.lab.contract_channel_p)));
    t.push_back(list<double>("lab.deltas", QTGNN_FIELD(c.lab.deltas)));
    t.push_back(scalar<std::size_t>("lab.stability_trials", QTGNN_FIELD(c.lab.stability_trials)));
    t.push_back(scalar<std::size_t>("lab.steps", QTGNN_FIELD(c.lab.steps)));
    t.push_back(scalar<double>("lab.descent_eta0", QTGNN_FIELD(c.lab.descent_eta0)));
    return t;
  }();
  return table;
}

#undef QTGNN_FIELD

const Entry& find_entry(std::string_view key) {
  for (const auto& e : entries()) {
    if (e.key == key) return e;
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (csv_path && csv_path->empty()) throw ConfigError("dataset.csv must not be empty");
  if (!csv_path) synthetic.validate();
  preprocess.validate();
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("sampling.kappa must lie in (0, 1]");
  if (csv_path && sample_count == 0) throw ConfigError("sampling.count must be positive");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ConfigError("split.test_fraction must lie in [0, 1)");
  train.validate();
  if (eval_k == 0) throw ConfigError("eval.k must be positive");
  if (threads == 0) throw ConfigError("run.threads must be positive");
  if (output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
  if (lab.depths.empty()) throw ConfigError("lab.depths must not be empty");
  for (std::size_t d : lab.depths) {
    if (d == 0) throw ConfigError("lab.depths entries must be positive");
  }
  if (lab.trials < 2) throw ConfigError("lab.trials must be at least 2");
  if (!(lab.descent_eta0 > 0.0)) throw ConfigError("lab.descent_eta0 must be positive");
  if (!(lab.scan_channel_p >= 0.0 && lab.scan_channel_p <= 1.0)) throw ConfigError("lab.scan_channel_p must lie in [0, 1]");
  if (!(lab.contract_channel_p > 0.0 && lab.contract_channel_p <= 1.0)) {
    throw ConfigError("lab.contract_channel_p must lie in (0, 1]");
  }
  for (double d : lab.deltas) {
    if (!(d > 0.0 && d <= 0.1)) throw ConfigError("lab.deltas entries must lie in (0, 0.1]");
  }
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

SyntheticConfig RunConfig::synthetic_config() const {
  SyntheticConfig s = synthetic;
  s.seed = derive_seed(seed, "dataset");
  return s;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const Entry& e = find_entry(key);
  const auto parse = [](std::string_view text) {
    Json v = Json::parse(text.begin(), text.end(), nullptr, false);
    return v.is_discarded() ? Json(std::string(text)) : v;
  };
  const Json v = parse(value);
  if (!v.is_string() || value.find(',') == std::string_view::npos) {
    e.set(cfg, v);
    return;
  }
  // bare comma lists, e.g. synthetic.motifs=cycle,star
  try {
    e.set(cfg, v);
  } catch (const ConfigError&) {
    Json list = Json::array();
    std::size_t start = 0;
    while (start <= value.size()) {
      const std::size_t end = std::min(value.find(',', start), value.size());
      list.push_back(parse(value.substr(start, end - start)));
      start = end + 1;
    }
    e.set(cfg, list);
  }
}

std::string config_to_json(const RunConfig& cfg) {
  Json out = Json::object();
  for (const auto& e : entries()) out[e.key] = e.get(cfg);
  return out.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text) {
  Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("configuration is not valid JSON");
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object of dotted keys");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) find_entry(key).set(cfg, value);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str());
}

}  // namespace qtgnn
