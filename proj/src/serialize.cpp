#include "qtgnn/serialize.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string_view>

#include <json.hpp>

#include "qtgnn/error.hpp"

namespace qtgnn {

namespace {

using Json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little, "binary densities assume a little-endian host");

Json parse_line(const std::string& line, std::size_t lineno) {
  Json doc = Json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError(lineno, "not a JSON object");
  return doc;
}

template <typename T>
T field(const Json& doc, const char* key, std::size_t lineno) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(lineno, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(lineno, std::string("field '") + key + "' has the wrong type");
  }
}

Json number(double x) {
  if (std::isfinite(x)) return Json(x);
  return Json(nullptr);
}

double number_or_infinity(const Json& v) { return v.is_null() ? kInfinity : v.get<double>(); }

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from(const Json& v) {
  const auto values = v.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json point_json(const PersistencePoint& p) {
  return Json{{"dim", p.dim}, {"birth", p.birth}, {"death", number(p.death)}, {"mult", p.mult}};
}

PersistencePoint point_from(const Json& j) {
  return {j.at("dim").get<int>(), j.at("birth").get<double>(), number_or_infinity(j.at("death")),
          j.at("mult").get<int>()};
}

Json diagram_json(const PersistenceDiagram& d) {
  Json out = Json::array();
  for (const auto& p : d.features) out.push_back(point_json(p));
  return out;
}

PersistenceDiagram diagram_from(const Json& j) {
  PersistenceDiagram d;
  for (const auto& p : j) d.features.push_back(point_from(p));
  return d;
}

Json attributed_json(const AttributedFeature& f) {
  Json out = point_json(f.point);
  out["persistence"] = f.persistence;
  out["contribution"] = f.contribution;
  return out;
}

std::string_view label_name(Label l) { return l == Label::kFraud ? "fraud" : "normal"; }

Label label_from(const std::string& s, std::size_t lineno) {
  if (s == "fraud") return Label::kFraud;
  if (s == "normal") return Label::kNormal;
  throw ParseError(lineno, "unknown edge label '" + s + "'");
}

template <typename T>
void put(std::ostream& out, T x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof x);
}

template <typename T>
T take(std::istream& in, const char* what) {
  T x{};
  if (!in.read(reinterpret_cast<char*>(&x), sizeof x)) throw ParseError(0, std::string("truncated ") + what);
  return x;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_dataset(std::ostream& out, std::span<const DatasetRecord> records) {
  for (const auto& r : records) {
    const TransactionGraph& g = r.graph.graph;
    Json edges = Json::array();
    for (const auto& e : g.edges) {
      Json je{{"src", g.nodes[e.src]}, {"dst", g.nodes[e.dst]}, {"amount", e.weight}, {"t", e.timestamp}};
      if (e.label) je["label"] = std::string(label_name(*e.label));
      edges.push_back(std::move(je));
    }
    Json triangles = Json::array();
    for (const auto& t : g.triangles) {
      triangles.push_back(
          {{"a", g.nodes[t.i]}, {"b", g.nodes[t.j]}, {"c", g.nodes[t.k]}, {"weight", t.weight}, {"t", t.timestamp}});
    }
    Json doc{{"id", r.id},
             {"split", r.split},
             {"label", r.graph.label},
             {"seed", r.graph.seed},
             {"motif", r.graph.motif ? Json(std::string(to_string(*r.graph.motif))) : Json(nullptr)},
             {"nodes", g.nodes},
             {"edges", std::move(edges)},
             {"triangles", std::move(triangles)}};
    out << doc.dump() << '\n';
  }
}

std::vector<DatasetRecord> read_dataset(std::istream& in) {
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Json doc = parse_line(line, lineno);
    DatasetRecord r;
    r.id = field<std::string>(doc, "id", lineno);
    r.split = field<std::string>(doc, "split", lineno);
    r.graph.label = field<int>(doc, "label", lineno);
    if (r.graph.label != 0 && r.graph.label != 1) throw ParseError(lineno, "label must be 0 or 1");
    r.graph.seed = field<std::uint64_t>(doc, "seed", lineno);
    const auto motif = doc.find("motif");
    if (motif != doc.end() && !motif->is_null()) {
      try {
        r.graph.motif = motif_from_string(motif->get<std::string>());
      } catch (const Error& e) {
        throw ParseError(lineno, e.what());
      }
    }
    try {
      GraphBuilder b;
      for (const auto& id : field<std::vector<std::string>>(doc, "nodes", lineno)) b.add_node(id);
      for (const auto& e : doc.at("edges")) {
        std::optional<Label> label;
        if (e.contains("label")) label = label_from(e.at("label").get<std::string>(), lineno);
        b.add_edge(e.at("src").get<std::string>(), e.at("dst").get<std::string>(), e.at("amount").get<double>(),
                   e.at("t").get<std::int64_t>(), label);
      }
      for (const auto& t : doc.at("triangles")) {
        b.add_triangle(t.at("a").get<std::string>(), t.at("b").get<std::string>(), t.at("c").get<std::string>(),
                       t.at("weight").get<double>(), t.at("t").get<std::int64_t>());
      }
      r.graph.graph = b.finish();
    } catch (const ParseError&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("malformed graph: ") + e.what());
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string train_config_to_json(const TrainConfig& cfg) {
  RunConfig rc;
  rc.seed = cfg.seed;
  rc.train = cfg;
  const Json all = Json::parse(config_to_json(rc));
  Json out = Json::object();
  for (const auto& [key, value] : all.items()) {
    if (key == "seed" || key.starts_with("train.") || key.starts_with("model.")) out[key] = value;
  }
  return out.dump();
}

TrainConfig train_config_from_json(std::string_view text) { return config_from_json(text).train_config(); }

std::string model_to_json(const TrainedModel& model) {
  const NormalReference& ref = model.reference;
  Json members = Json::array();
  for (const auto& m : ref.members) members.push_back(vector_json(m));
  Json lands = Json::array();
  for (const auto& per_member : ref.landscapes) {
    Json row = Json::array();
    for (const auto& l : per_member) {
      Json bps = Json::array();
      for (const auto& [x, y] : l.breakpoints) bps.push_back({x, y});
      row.push_back({{"dim", l.dim}, {"breakpoints", std::move(bps)}});
    }
    lands.push_back(std::move(row));
  }
  Json doc{{"format", "qtgnn-model"},
           {"version", 1},
           {"config", Json::parse(train_config_to_json(model.config))},
           {"trained", model.trained},
           {"tau", number(model.tau)},
           {"params", model.params.values},
           {"head_center", vector_json(model.params.head_center)},
           {"head_scale", vector_json(model.params.head_scale)},
           {"reference",
            {{"members", std::move(members)},
             {"landscapes", std::move(lands)},
             {"d_normal", diagram_json(ref.d_normal)},
             {"centroid", vector_json(ref.centroid)}}}};
  return doc.dump() + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  const Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError(1, "model is not a JSON object");
  if (doc.value("format", "") != "qtgnn-model") throw ParseError(1, "not a qtgnn model document");
  try {
    TrainedModel m;
    m.config = train_config_from_json(doc.at("config").dump());
    m.trained = doc.at("trained").get<bool>();
    m.tau = number_or_infinity(doc.at("tau"));
    const FeatureConfig& fc = m.config.features;
    m.params.layout = ParameterLayout(fc.capacity, fc.layers, FeatureLayout(fc).size());
    m.params.values = doc.at("params").get<std::vector<double>>();
    if (m.params.values.size() != m.params.layout.size()) throw ParseError(1, "parameter count does not match the configuration");
    m.params.head_center = vector_from(doc.at("head_center"));
    m.params.head_scale = vector_from(doc.at("head_scale"));
    const Json& ref = doc.at("reference");
    for (const auto& v : ref.at("members")) m.reference.members.push_back(vector_from(v));
    for (const auto& row : ref.at("landscapes")) {
      std::vector<LandscapeFunction> per_member;
      for (const auto& l : row) {
        LandscapeFunction f;
        f.dim = l.at("dim").get<int>();
        for (const auto& bp : l.at("breakpoints")) f.breakpoints.emplace_back(bp.at(0).get<double>(), bp.at(1).get<double>());
        per_member.push_back(std::move(f));
      }
      m.reference.landscapes.push_back(std::move(per_member));
    }
    m.reference.d_normal = diagram_from(ref.at("d_normal"));
    m.reference.centroid = vector_from(ref.at("centroid"));
    return m;
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("malformed model: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(1, std::string("model configuration: ") + e.what());
  }
}

void write_scores(std::ostream& out, std::span<const ScoreRecord> records) {
  for (const auto& r : records) {
    Json top = Json::array();
    for (const auto& f : r.top_features) top.push_back(attributed_json(f));
    Json doc{{"graph_id", r.id},
             {"label", r.label},
             {"score", r.score},
             {"decision", r.decision},
             {"tau", number(r.tau)},
             {"probability", r.probability},
             {"feature_term", r.feature_term},
             {"landscape_term", r.landscape_term},
             {"w2_term", r.w2_term},
             {"top_features", std::move(top)}};
    out << doc.dump() << '\n';
  }
}

std::vector<ScoreRecord> read_scores(std::istream& in) {
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Json doc = parse_line(line, lineno);
    ScoreRecord r;
    r.id = field<std::string>(doc, "graph_id", lineno);
    r.label = field<int>(doc, "label", lineno);
    r.score = field<double>(doc, "score", lineno);
    r.decision = field<int>(doc, "decision", lineno);
    r.tau = doc.contains("tau") ? number_or_infinity(doc.at("tau")) : 0.0;
    r.probability = doc.value("probability", 0.5);
    r.feature_term = doc.value("feature_term", 0.0);
    r.landscape_term = doc.value("landscape_term", 0.0);
    r.w2_term = doc.value("w2_term", 0.0);
    if (doc.contains("top_features")) {
      try {
        for (const auto& f : doc.at("top_features")) {
          r.top_features.push_back(
              {point_from(f), f.at("persistence").get<double>(), f.at("contribution").get<double>()});
        }
      } catch (const nlohmann::json::exception&) {
        throw ParseError(lineno, "malformed top_features");
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_diagram(std::ostream& out, const std::string& id, const PersistenceDiagram& d) {
  for (const auto& p : d.features) {
    Json doc{{"graph_id", id}};
    doc.update(point_json(p));
    out << doc.dump() << '\n';
  }
}

std::map<std::string, PersistenceDiagram> read_diagrams(std::istream& in) {
  std::map<std::string, PersistenceDiagram> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const Json doc = parse_line(line, lineno);
    try {
      out[field<std::string>(doc, "graph_id", lineno)].features.push_back(point_from(doc));
    } catch (const nlohmann::json::exception&) {
      throw ParseError(lineno, "malformed diagram feature");
    }
  }
  return out;
}

void write_landscape_csv(std::ostream& out, const std::string& id, std::span<const LandscapeFunction> lands,
                         bool header) {
  if (header) out << "graph_id,dim,x,y\n";
  for (const auto& l : lands) {
    for (const auto& [x, y] : l.breakpoints) {
      out << id << ',' << l.dim << ',' << format_double(x) << ',' << format_double(y) << '\n';
    }
  }
}

void write_training_log(std::ostream& out, std::span<const TrainStep> log) {
  out << "step,eta,loss,l_sup,l_unsup,reg,grad_norm\n";
  for (const auto& s : log) {
    out << s.step << ',' << format_double(s.eta) << ',' << format_double(s.loss) << ',' << format_double(s.l_sup)
        << ',' << format_double(s.l_unsup) << ',' << format_double(s.reg) << ',' << format_double(s.grad_norm)
        << '\n';
  }
}

std::string verdict_to_json(const Verdict& v) {
  Json stats = Json::object();
  for (const auto& [k, x] : v.statistics) stats[k] = number(x);
  Json doc{{"name", v.name}, {"passed", v.passed}, {"statistics", std::move(stats)}, {"seed", v.seed}};
  return doc.dump(2) + "\n";
}

Verdict verdict_from_json(std::string_view text) {
  const Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError(1, "verdict is not a JSON object");
  Verdict v;
  v.name = field<std::string>(doc, "name", 1);
  v.passed = field<bool>(doc, "passed", 1);
  v.seed = field<std::uint64_t>(doc, "seed", 1);
  const auto stats = doc.find("statistics");
  if (stats == doc.end() || !stats->is_object()) throw ParseError(1, "statistics must be an object");
  for (const auto& [k, x] : stats->items()) {
    if (!x.is_number() && !x.is_null()) throw ParseError(1, "statistic '" + k + "' is not a number");
    v.statistics.emplace_back(k, x.is_null() ? std::nan("") : x.get<double>());
  }
  return v;
}

void write_densities(std::ostream& out, std::span<const DensityMatrix> states) {
  out.write("QTDM", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, states.size());
  for (const auto& rho : states) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(rho.qubits()));
    const auto& m = rho.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        put<double>(out, m(r, c).real());
        put<double>(out, m(r, c).imag());
      }
    }
  }
}

std::vector<DensityMatrix> read_densities(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "QTDM", 4) != 0) throw ParseError(0, "not a QTDM density file");
  const auto version = take<std::uint32_t>(in, "header");
  if (version != 1) throw ParseError(0, "unsupported QTDM version " + std::to_string(version));
  const auto count = take<std::uint64_t>(in, "header");
  std::vector<DensityMatrix> out;
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto qubits = take<std::uint64_t>(in, "matrix header");
    if (qubits == 0 || qubits > 16) throw ParseError(0, "implausible qubit count " + std::to_string(qubits));
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double re = take<double>(in, "matrix payload");
        const double im = take<double>(in, "matrix payload");
        m(r, c) = Complex(re, im);
      }
    }
    out.emplace_back(std::move(m));
  }
  return out;
}

}  // namespace qtgnn
