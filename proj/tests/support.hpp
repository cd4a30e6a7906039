#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qtgnn/graph.hpp"
#include "qtgnn/quantum_conv.hpp"
#include "qtgnn/quantum_state.hpp"
#include "qtgnn/rng.hpp"
#include "qtgnn/topology.hpp"

namespace test {

/// Connected random graph on n nodes with a few extra edges and, when
/// possible, one triangle. Preprocessed.
inline qtgnn::TransactionGraph random_graph(std::size_t n, qtgnn::Rng& rng) {
  qtgnn::GraphBuilder b;
  auto id = [](std::size_t k) { return "a" + std::to_string(k); };
  for (std::size_t k = 0; k < n; ++k) b.add_node(id(k));
  for (std::size_t k = 1; k < n; ++k) {
    b.add_edge(id(rng.index(k)), id(k), rng.uniform(1.0, 100.0), rng.integer(0, 50));
  }
  const std::size_t extra = n > 2 ? rng.index(n) : 0;
  for (std::size_t e = 0; e < extra; ++e) {
    const std::size_t u = rng.index(n), v = rng.index(n);
    if (u != v) b.add_edge(id(u), id(v), rng.uniform(1.0, 100.0), rng.integer(0, 50));
  }
  if (n >= 3 && rng.bernoulli(0.5)) b.add_triangle(id(0), id(1), id(2), rng.uniform(0.1, 1.0), 0);
  return qtgnn::preprocess(b.finish(), {});
}

inline qtgnn::LayerParams random_layer(const qtgnn::TransactionGraph& g, qtgnn::Rng& rng, double scale = 3.14159) {
  qtgnn::LayerParams l = qtgnn::LayerParams::zeros(g, rng.uniform(-3.0, 3.0));
  for (auto& [k, v] : l.edge) v = rng.uniform(-scale, scale);
  for (auto& v : l.node) v = rng.uniform(-scale, scale);
  for (auto& [k, v] : l.triangle) v = rng.uniform(-scale, scale);
  return l;
}

inline qtgnn::ComplexVector random_pure(std::size_t qubits, qtgnn::Rng& rng) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  qtgnn::ComplexVector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = {rng.normal(), rng.normal()};
  return psi.normalized();
}

/// Mixture of a few random pure states.
inline qtgnn::DensityMatrix random_mixed(std::size_t qubits, qtgnn::Rng& rng, int rank = 3) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  qtgnn::ComplexMatrix m = qtgnn::ComplexMatrix::Zero(dim, dim);
  double total = 0.0;
  std::vector<double> w;
  for (int r = 0; r < rank; ++r) total += w.emplace_back(rng.uniform(0.05, 1.0));
  for (int r = 0; r < rank; ++r) {
    const auto psi = random_pure(qubits, rng);
    m += (w[static_cast<std::size_t>(r)] / total) * psi * psi.adjoint();
  }
  return qtgnn::DensityMatrix(m);
}

inline double max_abs(const qtgnn::ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Random filtered complex closed under faces, at most `cap` simplices.
/// Vertices enter at 0; a simplex enters no earlier than its faces.
inline qtgnn::FilteredComplex random_complex(qtgnn::Rng& rng, std::size_t cap = 30) {
  const std::size_t n = 3 + rng.index(4);
  std::set<std::vector<std::uint32_t>> simplices;
  for (std::uint32_t v = 0; v < n; ++v) simplices.insert({v});
  for (int attempt = 0; attempt < 12; ++attempt) {
    const std::size_t size = 2 + rng.index(std::min<std::size_t>(3, n - 1));
    std::set<std::uint32_t> picked;
    while (picked.size() < size) picked.insert(static_cast<std::uint32_t>(rng.index(n)));
    const std::vector<std::uint32_t> top(picked.begin(), picked.end());
    std::set<std::vector<std::uint32_t>> closure;
    for (std::uint32_t mask = 1; mask < (1u << top.size()); ++mask) {
      std::vector<std::uint32_t> face;
      for (std::size_t b = 0; b < top.size(); ++b) {
        if (mask & (1u << b)) face.push_back(top[b]);
      }
      if (!simplices.count(face)) closure.insert(face);
    }
    if (simplices.size() + closure.size() > cap) continue;
    simplices.insert(closure.begin(), closure.end());
  }
  std::map<std::vector<std::uint32_t>, double> value;
  for (std::size_t size = 1; size <= 4; ++size) {
    for (const auto& s : simplices) {
      if (s.size() != size) continue;
      double f = 0.0;
      if (s.size() == 2) f = static_cast<double>(1 + rng.index(8)) / 8.0;
      if (s.size() > 2) {
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
          auto face = s;
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
          f = std::max(f, value.at(face));
        }
        if (rng.bernoulli(0.5)) f += 1.0 / 8.0;
      }
      value[s] = f;
    }
  }
  qtgnn::FilteredComplex c;
  c.n_vertices = n;
  c.max_dim = 0;
  for (const auto& [s, f] : value) {
    c.simplices.push_back({s, f});
    c.max_dim = std::max(c.max_dim, static_cast<int>(s.size()) - 1);
  }
  std::sort(c.simplices.begin(), c.simplices.end(), [](const qtgnn::Simplex& a, const qtgnn::Simplex& b) {
    if (a.filtration != b.filtration) return a.filtration < b.filtration;
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    return a.vertices < b.vertices;
  });
  return c;
}

/// Random finite diagram of one dimension with up to `max_points` points.
inline qtgnn::PersistenceDiagram random_diagram(qtgnn::Rng& rng, std::size_t max_points, int dim = 0) {
  qtgnn::PersistenceDiagram d;
  const std::size_t m = rng.index(max_points + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double b = rng.uniform(0.0, 1.0);
    d.features.push_back({dim, b, b + rng.uniform(0.0, 0.6), 1});
  }
  d.normalize();
  return d;
}

inline std::vector<std::pair<double, double>> points_of(const qtgnn::PersistenceDiagram& d) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : d.features) {
    for (int m = 0; m < p.mult; ++m) out.emplace_back(p.birth, p.death);
  }
  return out;
}

}  // namespace test
