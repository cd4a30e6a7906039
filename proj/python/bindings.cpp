#include <filesystem>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qtgnn/config.hpp"
#include "qtgnn/error.hpp"
#include "qtgnn/graph.hpp"
#include "qtgnn/matching.hpp"
#include "qtgnn/metrics.hpp"
#include "qtgnn/pipeline.hpp"
#include "qtgnn/quantum_state.hpp"
#include "qtgnn/topology.hpp"

namespace py = pybind11;
using namespace qtgnn;

namespace {

using PointTuple = std::tuple<int, double, double>;

PersistenceDiagram to_diagram(const std::vector<PointTuple>& pts) {
  PersistenceDiagram d;
  for (const auto& [k, b, e] : pts) d.features.push_back({k, b, e, 1});
  d.normalize();
  return d;
}

std::vector<PointTuple> from_diagram(const PersistenceDiagram& d) {
  std::vector<PointTuple> out;
  for (const auto& p : d.features) {
    for (int m = 0; m < p.mult; ++m) out.emplace_back(p.dim, p.birth, p.death);
  }
  return out;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict stats;
  for (const auto& [k, x] : v.statistics) stats[py::str(k)] = x;
  py::dict out;
  out["name"] = v.name;
  out["passed"] = v.passed;
  out["seed"] = v.seed;
  out["statistics"] = stats;
  return out;
}

py::dict metrics_dict(const MetricsReport& m) {
  py::dict out;
  out["roc_auc"] = m.roc_auc;
  out["precision_at_k"] = m.precision_at_k;
  out["fpr"] = m.fpr;
  out["accuracy"] = m.accuracy;
  out["precision"] = m.precision;
  out["recall"] = m.recall;
  out["f1"] = m.f1;
  out["mcc"] = m.mcc;
  out["log_loss"] = m.log_loss;
  out["degenerate"] = m.degenerate;
  return out;
}

}  // namespace

PYBIND11_MODULE(_qtgnn, m) {
  m.doc() = "Quantum-topological graph anomaly detection";

  auto base = py::register_exception<Error>(m, "QtgnnError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());

  m.def("config_keys", &config_keys);
  m.def("default_config", [] { return config_to_json(RunConfig{}); });
  m.def("resolve_config", [](const std::string& json) {
    RunConfig cfg = config_from_json(json);
    cfg.validate();
    return config_to_json(cfg);
  });

  m.def("generate", [](const std::string& json) { cmd_generate(config_from_json(json)); });
  m.def("train", [](const std::string& json, const std::filesystem::path& dataset) {
    cmd_train(config_from_json(json), dataset);
  });
  m.def("score", [](const std::string& json, const std::filesystem::path& model, const std::filesystem::path& dataset,
                    const std::string& split) { cmd_score(config_from_json(json), model, dataset, split); });
  m.def("evaluate", [](const std::string& json, const std::filesystem::path& scores) {
    return metrics_dict(cmd_eval(config_from_json(json), scores));
  });
  m.def("embed", [](const std::string& json, const std::filesystem::path& dataset,
                    std::optional<std::filesystem::path> model) {
    cmd_embed(config_from_json(json), dataset, model ? &*model : nullptr);
  });
  m.def("experiment_names", &experiment_names);
  m.def("run_experiment", [](const std::string& name, const std::string& json) {
    RunConfig cfg = config_from_json(json);
    cfg.validate();
    const ExperimentResult r = run_experiment(name, cfg);
    py::dict out = verdict_dict(r.verdict);
    out["csv"] = r.csv;
    return out;
  });

  m.def("parse_edge_list",
        [](const std::string& text, bool preprocessed) {
          TransactionGraph g = parse_edge_list(std::string_view(text));
          if (preprocessed) g = preprocess(g, {});
          std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
          for (const auto& e : g.edges) edges.emplace_back(e.src, e.dst, e.weight);
          py::dict out;
          out["nodes"] = g.nodes;
          out["edges"] = edges;
          return out;
        },
        py::arg("text"), py::arg("preprocessed") = true);

  m.def("encode_edge_list", [](const std::string& text, double theta_e) {
    const TransactionGraph g = preprocess(parse_edge_list(std::string_view(text)), {});
    const EncodedState s = encode_state(g, {theta_e});
    return py::make_tuple(s.rho.matrix(), s.qubit_ids);
  });
  m.def("von_neumann_entropy", [](const ComplexMatrix& rho) { return von_neumann_entropy(DensityMatrix(rho)); });
  m.def("partial_trace", [](const ComplexMatrix& rho, const std::vector<std::size_t>& keep) {
    return partial_trace(DensityMatrix(rho), std::span<const std::size_t>(keep)).matrix();
  });

  m.def("persistence",
        [](const Eigen::MatrixXd& d, double eps_max, int max_dim) {
          DistanceMatrix dm{d};
          dm.validate();
          return from_diagram(persistence(vietoris_rips(dm, eps_max, max_dim)));
        },
        py::arg("distances"), py::arg("eps_max"), py::arg("max_dim") = 1);
  m.def("bottleneck_distance", [](const std::vector<PointTuple>& a, const std::vector<PointTuple>& b) {
    return bottleneck_distance(to_diagram(a), to_diagram(b));
  });
  m.def("wasserstein2", [](const std::vector<PointTuple>& a, const std::vector<PointTuple>& b) {
    return wasserstein2(to_diagram(a), to_diagram(b));
  });

  m.def("roc_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return roc_auc(s, y); });
  m.def("log_loss", [](const std::vector<double>& p, const std::vector<int>& y) { return log_loss(p, y); });
  m.def("evaluate_metrics",
        [](std::vector<double> scores, std::vector<double> probabilities, std::vector<int> labels, std::size_t k,
           double tau) {
          return metrics_dict(evaluate_metrics({std::move(scores), std::move(probabilities), std::move(labels), k, tau}));
        },
        py::arg("scores"), py::arg("probabilities"), py::arg("labels"), py::arg("k") = 1, py::arg("tau") = 0.0);
}
