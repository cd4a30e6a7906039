#include "qtgnn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "qtgnn/error.hpp"
#include "qtgnn/matching.hpp"

namespace qtgnn {

namespace {

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
};

// Symmetric difference of two sorted index lists (addition over Z2).
void add_column(std::vector<std::size_t>& into, const std::vector<std::size_t>& other) {
  std::vector<std::size_t> out;
  out.reserve(into.size() + other.size());
  std::set_symmetric_difference(into.begin(), into.end(), other.begin(), other.end(),
                                std::back_inserter(out));
  into.swap(out);
}

void require_finite(const PersistenceDiagram& d) {
  for (const auto& p : d.features) {
    if (!std::isfinite(p.death)) throw ArgumentError("diagram has essential classes; truncate first");
  }
}

std::vector<std::pair<double, double>> expand(const PersistenceDiagram& d, int k) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : d.features) {
    if (p.dim != k) continue;
    for (int m = 0; m < p.mult; ++m) pts.emplace_back(p.birth, p.death);
  }
  return pts;
}

std::vector<int> dims_of(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  std::vector<int> dims;
  for (const auto* d : {&a, &b}) {
    for (const auto& p : d->features) dims.push_back(p.dim);
  }
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  return dims;
}

double linf(const std::pair<double, double>& p, const std::pair<double, double>& q) {
  return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
}

double diag_linf(const std::pair<double, double>& p) { return (p.second - p.first) / 2.0; }

double diag_sq(const std::pair<double, double>& p) {
  const double h = p.second - p.first;
  return h * h / 2.0;
}

}  // namespace

WeightMatrix::WeightMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
  if (w_.rows() == 0 || w_.rows() != w_.cols()) throw ArgumentError("weight matrix must be square");
  if (!w_.allFinite()) throw ArgumentError("weight matrix has non-finite entries");
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ArgumentError("weight matrix must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(w_);
  if (llt.info() != Eigen::Success) throw ArgumentError("weight matrix must be positive definite");
}

WeightMatrix WeightMatrix::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return WeightMatrix(Eigen::MatrixXd::Identity(n, n));
}

double weighted_fidelity(const DensityMatrix& rho_i, const DensityMatrix& rho_j,
                         const WeightMatrix& w) {
  if (rho_i.dim() != rho_j.dim() || rho_i.dim() != w.dim()) {
    throw ArgumentError("fidelity operands have different dimensions");
  }
  const ComplexMatrix s = psd_sqrt(rho_i.matrix());
  const ComplexMatrix wc = w.matrix().cast<Complex>();
  const ComplexMatrix m = s * wc * rho_j.matrix() * wc * s;
  const ComplexMatrix herm = (m + m.adjoint()) / 2.0;
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues();
  const double root_trace = ev.cwiseMax(0.0).cwiseSqrt().sum();
  const double scale = static_cast<double>(w.dim()) / w.matrix().trace();
  return std::clamp(root_trace * root_trace * scale * scale, 0.0, 1.0);
}

void DistanceMatrix::validate() const {
  if (d.rows() != d.cols()) throw ValidationError("distance matrix must be square");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw ValidationError("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
        throw ValidationError("distance matrix entries must be finite and non-negative");
      }
      if (std::abs(d(i, j) - d(j, i)) > 1e-12) throw ValidationError("distance matrix must be symmetric");
    }
  }
}

DistanceMatrix distance_matrix(std::span<const DensityMatrix> states, const WeightMatrix& w) {
  if (states.size() < 2) throw ArgumentError("distance matrix needs at least two states");
  const auto n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd raw(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double f = weighted_fidelity(states[static_cast<std::size_t>(i)],
                                         states[static_cast<std::size_t>(j)], w);
      raw(i, j) = std::sqrt(std::max(0.0, 1.0 - f));
    }
  }
  DistanceMatrix out{Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out.d(i, j) = out.d(j, i) = (raw(i, j) + raw(j, i)) / 2.0;
  }
  return out;
}

std::size_t FilteredComplex::count(int k, double eps) const {
  return static_cast<std::size_t>(std::count_if(simplices.begin(), simplices.end(), [&](const Simplex& s) {
    return s.dim() == k && s.filtration <= eps;
  }));
}

FilteredComplex vietoris_rips(const DistanceMatrix& d, double eps_max, int max_dim) {
  if (max_dim < 1 || max_dim > 2) throw ArgumentError("max_dim must be 1 or 2");
  if (d.size() > 64) throw CapacityError("Rips complex limited to 64 points");
  d.validate();
  FilteredComplex c;
  c.n_vertices = d.size();
  c.max_dim = max_dim;
  c.eps_max = eps_max;
  const std::size_t top = static_cast<std::size_t>(max_dim) + 2;  // vertices in the largest simplex

  // Depth-first clique extension in lexicographic order.
  std::vector<std::uint32_t> current;
  auto extend = [&](auto&& self, double filt) -> void {
    c.simplices.push_back({current, filt});
    if (current.size() == top) return;
    for (auto v = current.back() + 1; v < d.size(); ++v) {
      double f = filt;
      bool ok = true;
      for (auto u : current) {
        const double duv = d(u, v);
        if (duv > eps_max) {
          ok = false;
          break;
        }
        f = std::max(f, duv);
      }
      if (!ok) continue;
      current.push_back(v);
      self(self, f);
      current.pop_back();
    }
  };
  for (std::uint32_t v = 0; v < d.size(); ++v) {
    current = {v};
    extend(extend, 0.0);
  }
  std::stable_sort(c.simplices.begin(), c.simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.filtration != b.filtration) return a.filtration < b.filtration;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
  });
  return c;
}

std::size_t PersistenceDiagram::count(int k) const {
  std::size_t total = 0;
  for (const auto& p : features) {
    if (p.dim == k) total += static_cast<std::size_t>(p.mult);
  }
  return total;
}

PersistenceDiagram PersistenceDiagram::of_dim(int k) const {
  PersistenceDiagram out;
  for (const auto& p : features) {
    if (p.dim == k) out.features.push_back(p);
  }
  return out;
}

PersistenceDiagram PersistenceDiagram::truncated(double eps_max) const {
  PersistenceDiagram out = *this;
  for (auto& p : out.features) {
    if (p.essential()) p.death = std::max(eps_max, p.birth);
  }
  out.normalize();
  return out;
}

void PersistenceDiagram::normalize() {
  for (const auto& p : features) {
    if (p.birth > p.death || p.mult < 1) throw ValidationError("invalid persistence point");
  }
  std::sort(features.begin(), features.end(), [](const PersistencePoint& a, const PersistencePoint& b) {
    return std::tie(a.dim, a.birth, a.death) < std::tie(b.dim, b.birth, b.death);
  });
  std::vector<PersistencePoint> merged;
  for (const auto& p : features) {
    if (!merged.empty() && merged.back().dim == p.dim && merged.back().birth == p.birth &&
        merged.back().death == p.death) {
      merged.back().mult += p.mult;
    } else {
      merged.push_back(p);
    }
  }
  features.swap(merged);
}

PersistenceDiagram persistence(const FilteredComplex& c) {
  const auto& s = c.simplices;
  PersistenceDiagram out;
  auto emit = [&](int dim, double b, double d) {
    if (d > b) out.features.push_back({dim, b, d, 1});
  };

  std::map<std::vector<std::uint32_t>, std::size_t> index;
  for (std::size_t k = 0; k < s.size(); ++k) index.emplace(s[k].vertices, k);

  // H0 by union-find; every vertex is born at 0, so the merge kills an
  // arbitrary but consistent root.
  UnionFind uf(c.n_vertices);
  std::vector<char> positive(s.size(), 0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].dim() != 1) continue;
    const auto a = uf.find(s[k].vertices[0]);
    const auto b = uf.find(s[k].vertices[1]);
    if (a == b) {
      positive[k] = 1;
      continue;
    }
    uf.parent[std::max(a, b)] = std::min(a, b);
    emit(0, 0.0, s[k].filtration);
  }
  for (std::size_t v = 0; v < c.n_vertices; ++v) {
    if (uf.find(v) == v) out.features.push_back({0, 0.0, kInfinity, 1});
  }

  // Higher dimensions by column reduction of the boundaries of 2- and
  // higher simplices.
  std::vector<char> paired(s.size(), 0);
  std::map<std::size_t, std::vector<std::size_t>> by_low;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].dim() < 2) continue;
    std::vector<std::size_t> col;
    const auto& verts = s[k].vertices;
    for (std::size_t drop = 0; drop < verts.size(); ++drop) {
      std::vector<std::uint32_t> face;
      for (std::size_t t = 0; t < verts.size(); ++t) {
        if (t != drop) face.push_back(verts[t]);
      }
      col.push_back(index.at(face));
    }
    std::sort(col.begin(), col.end());
    while (!col.empty()) {
      auto it = by_low.find(col.back());
      if (it == by_low.end()) break;
      add_column(col, it->second);
    }
    if (col.empty()) {
      positive[k] = 1;
      continue;
    }
    const std::size_t low = col.back();
    paired[low] = 1;
    emit(s[low].dim(), s[low].filtration, s[k].filtration);
    by_low.emplace(low, std::move(col));
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    const int dim = s[k].dim();
    if (dim >= 1 && dim <= c.max_dim && positive[k] && !paired[k]) {
      out.features.push_back({dim, s[k].filtration, kInfinity, 1});
    }
  }
  out.normalize();
  return out;
}

int betti_at(const PersistenceDiagram& d, int k, double eps) {
  int total = 0;
  for (const auto& p : d.features) {
    if (p.dim == k && p.birth <= eps && eps < p.death) total += p.mult;
  }
  return total;
}

int betti_at(const FilteredComplex& c, int k, double eps) {
  if (k < 0 || k > c.max_dim) throw ArgumentError("homology dimension out of range");
  return betti_at(persistence(c), k, eps);
}

int euler_characteristic(const PersistenceDiagram& d, double eps) {
  int chi = 0;
  for (const auto& p : d.features) {
    if (p.birth <= eps && eps < p.death) chi += (p.dim % 2 == 0 ? 1 : -1) * p.mult;
  }
  return chi;
}

int euler_characteristic(const FilteredComplex& c, double eps) {
  return euler_characteristic(persistence(c), eps);
}

long alternating_simplex_count(const FilteredComplex& c, double eps) {
  long chi = 0;
  for (const auto& s : c.simplices) {
    if (s.filtration <= eps) chi += s.dim() % 2 == 0 ? 1 : -1;
  }
  return chi;
}

double LandscapeFunction::operator()(double x) const {
  if (breakpoints.empty() || x <= breakpoints.front().first || x >= breakpoints.back().first) {
    if (!breakpoints.empty() && x == breakpoints.front().first) return breakpoints.front().second;
    if (!breakpoints.empty() && x == breakpoints.back().first) return breakpoints.back().second;
    return 0.0;
  }
  auto hi = std::upper_bound(breakpoints.begin(), breakpoints.end(), x,
                             [](double v, const auto& bp) { return v < bp.first; });
  auto lo = hi - 1;
  const double t = (x - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

std::vector<double> LandscapeFunction::sample(std::span<const double> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((*this)(x));
  return out;
}

LandscapeFunction landscape(const PersistenceDiagram& d, int k) {
  LandscapeFunction f;
  f.dim = k;
  struct Tent {
    double b, d, mu;
  };
  std::vector<Tent> tents;
  for (const auto& p : d.features) {
    if (p.dim != k) continue;
    if (!std::isfinite(p.death)) throw ArgumentError("landscape needs finite points");
    if (p.death > p.birth) tents.push_back({p.birth, p.death, static_cast<double>(p.mult)});
  }
  if (tents.empty()) return f;

  auto value = [&](double x) {
    double v = 0.0;
    for (const auto& t : tents) v = std::max(v, t.mu * std::min(x - t.b, t.d - x));
    return v;
  };
  double lo = kInfinity, hi = -kInfinity;
  std::vector<double> xs;
  for (const auto& t : tents) {
    lo = std::min(lo, t.b);
    hi = std::max(hi, t.d);
    xs.insert(xs.end(), {t.b, t.d, (t.b + t.d) / 2.0});
  }
  // Every crossing between rising (mu (x - b)) and falling (mu (d - x)) sides.
  for (std::size_t i = 0; i < tents.size(); ++i) {
    for (std::size_t j = 0; j < tents.size(); ++j) {
      const auto& a = tents[i];
      const auto& b = tents[j];
      xs.push_back((a.mu * a.b + b.mu * b.d) / (a.mu + b.mu));
      if (j > i && a.mu != b.mu) {
        xs.push_back((a.mu * a.b - b.mu * b.b) / (a.mu - b.mu));
        xs.push_back((a.mu * a.d - b.mu * b.d) / (a.mu - b.mu));
      }
    }
  }
  std::erase_if(xs, [&](double x) { return !(x >= lo && x <= hi); });
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  for (double x : xs) {
    const double v = x == lo || x == hi ? 0.0 : std::max(0.0, value(x));
    if (f.breakpoints.size() >= 2) {
      const auto& [x0, y0] = f.breakpoints[f.breakpoints.size() - 2];
      const auto& [x1, y1] = f.breakpoints.back();
      const double predicted = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
      if (std::abs(predicted - v) <= 1e-14 * std::max(1.0, std::abs(v))) f.breakpoints.pop_back();
    }
    f.breakpoints.emplace_back(x, v);
  }
  return f;
}

double landscape_gradient(const PersistenceDiagram& d, int k, double x) {
  double total = 0.0;
  for (const auto& p : d.features) {
    if (p.dim != k || x < p.birth || x > p.death) continue;
    const double gap = p.death - p.birth;
    total += p.mult * (gap > 0 ? 1.0 : (gap < 0 ? -1.0 : 0.0));
  }
  return total;
}

double landscape_l1(const LandscapeFunction& f, const LandscapeFunction& g) {
  std::vector<double> xs;
  for (const auto* h : {&f, &g}) {
    for (const auto& bp : h->breakpoints) xs.push_back(bp.first);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double dx = xs[i + 1] - xs[i];
    const double h0 = f(xs[i]) - g(xs[i]);
    const double h1 = f(xs[i + 1]) - g(xs[i + 1]);
    if (h0 * h1 >= 0.0) {
      total += (std::abs(h0) + std::abs(h1)) / 2.0 * dx;
    } else {
      total += (h0 * h0 + h1 * h1) / (2.0 * (std::abs(h0) + std::abs(h1))) * dx;
    }
  }
  return total;
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int k) {
  require_finite(a);
  require_finite(b);
  const auto pa = expand(a, k);
  const auto pb = expand(b, k);
  const std::size_t m = pa.size(), n = pb.size(), size = m + n;
  if (size == 0) return 0.0;

  std::vector<double> candidates{0.0};
  for (const auto& p : pa) candidates.push_back(diag_linf(p));
  for (const auto& q : pb) candidates.push_back(diag_linf(q));
  for (const auto& p : pa) {
    for (const auto& q : pb) candidates.push_back(linf(p, q));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Rows: points of a, then diagonal copies of b. Columns: points of b, then
  // diagonal copies of a.
  auto feasible = [&](double c) {
    std::vector<std::vector<char>> allowed(size, std::vector<char>(size, 0));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) allowed[i][j] = linf(pa[i], pb[j]) <= c;
      allowed[i][n + i] = diag_linf(pa[i]) <= c;
    }
    for (std::size_t j = 0; j < n; ++j) {
      allowed[m + j][j] = diag_linf(pb[j]) <= c;
      for (std::size_t i = 0; i < m; ++i) allowed[m + j][n + i] = 1;
    }
    return has_perfect_matching(allowed);
  };
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  double best = 0.0;
  for (int k : dims_of(a, b)) best = std::max(best, bottleneck_distance(a, b, k));
  return best;
}

namespace {

double wasserstein2_squared(const PersistenceDiagram& a, const PersistenceDiagram& b, int k) {
  require_finite(a);
  require_finite(b);
  const auto pa = expand(a, k);
  const auto pb = expand(b, k);
  const std::size_t m = pa.size(), n = pb.size();
  const auto size = static_cast<Eigen::Index>(m + n);
  if (size == 0) return 0.0;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double db = pa[i].first - pb[j].first;
      const double dd = pa[i].second - pb[j].second;
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = db * db + dd * dd;
    }
    for (std::size_t t = 0; t < m; ++t) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n + t)) = diag_sq(pa[i]);
    }
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      cost(static_cast<Eigen::Index>(m + t), static_cast<Eigen::Index>(j)) = diag_sq(pb[j]);
    }
  }
  const auto assignment = hungarian(cost);
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    total += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(assignment[r]));
  }
  return total;
}

}  // namespace

double wasserstein2(const PersistenceDiagram& a, const PersistenceDiagram& b, int k) {
  return std::sqrt(wasserstein2_squared(a, b, k));
}

double wasserstein2(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  double total = 0.0;
  for (int k : dims_of(a, b)) total += wasserstein2_squared(a, b, k);
  return std::sqrt(total);
}

}  // namespace qtgnn
