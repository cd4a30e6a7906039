#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtgnn/quantum_state.hpp"

namespace qtgnn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Symmetric positive-definite weight on the state space. The fidelity is
/// rescaled by (dim / Tr W)^2 so any positive multiple of I gives Uhlmann.
class WeightMatrix {
 public:
  /// Throws ArgumentError unless `w` is symmetric positive definite.
  explicit WeightMatrix(Eigen::MatrixXd w);
  static WeightMatrix identity(std::size_t dim);

  const Eigen::MatrixXd& matrix() const { return w_; }
  std::size_t dim() const { return static_cast<std::size_t>(w_.rows()); }

 private:
  Eigen::MatrixXd w_;
};

double weighted_fidelity(const DensityMatrix& rho_i, const DensityMatrix& rho_j,
                         const WeightMatrix& w);

/// Symmetric dissimilarity with an exactly zero diagonal.
struct DistanceMatrix {
  Eigen::MatrixXd d;

  std::size_t size() const { return static_cast<std::size_t>(d.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Throws ValidationError on asymmetry, a non-zero diagonal or negative entries.
  void validate() const;
};

/// d(i, j) = sqrt(1 - F_w(rho_i, rho_j)).
DistanceMatrix distance_matrix(std::span<const DensityMatrix> states, const WeightMatrix& w);

struct Simplex {
  std::vector<std::uint32_t> vertices;  // sorted
  double filtration = 0.0;

  int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

struct FilteredComplex {
  std::size_t n_vertices = 0;
  int max_dim = 1;
  double eps_max = kInfinity;
  /// In (filtration, dimension, lexicographic) order.
  std::vector<Simplex> simplices;

  /// Number of k-simplices with filtration <= eps.
  std::size_t count(int k, double eps) const;
};

/// Rips complex with simplices up to dimension max_dim + 1.
FilteredComplex vietoris_rips(const DistanceMatrix& d, double eps_max, int max_dim = 1);

struct PersistencePoint {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;
  int mult = 1;

  bool essential() const { return death == kInfinity; }
  bool operator==(const PersistencePoint&) const = default;
};

struct PersistenceDiagram {
  /// Sorted by (dim, birth, death); identical points are merged into `mult`.
  std::vector<PersistencePoint> features;

  /// Total multiplicity of dimension-k points.
  std::size_t count(int k) const;
  PersistenceDiagram of_dim(int k) const;
  /// Essential deaths replaced by `eps_max`.
  PersistenceDiagram truncated(double eps_max) const;
  /// Sorts and merges coincident points. Throws ValidationError if birth > death.
  void normalize();
};

PersistenceDiagram persistence(const FilteredComplex& c);

int betti_at(const PersistenceDiagram& d, int k, double eps);
int betti_at(const FilteredComplex& c, int k, double eps);

/// Sum of (-1)^k beta_k(eps) from the diagram.
int euler_characteristic(const PersistenceDiagram& d, double eps);
int euler_characteristic(const FilteredComplex& c, double eps);
/// Sum of (-1)^k (number of k-simplices with filtration <= eps), k <= max_dim + 1.
long alternating_simplex_count(const FilteredComplex& c, double eps);

/// Piecewise-linear function given by its breakpoints; zero outside them.
struct LandscapeFunction {
  int dim = 0;
  std::vector<std::pair<double, double>> breakpoints;

  double operator()(double x) const;
  std::vector<double> sample(std::span<const double> xs) const;
};

/// Upper envelope of mult * max(0, min(x - b, d - x)) over the finite
/// dimension-k points. Throws ArgumentError on essential points.
LandscapeFunction landscape(const PersistenceDiagram& d, int k);

/// Sum over dimension-k points of mult * 1[b <= x <= d] * sign(d - b).
double landscape_gradient(const PersistenceDiagram& d, int k, double x);

/// Exact integral of |f - g|.
double landscape_l1(const LandscapeFunction& f, const LandscapeFunction& g);

/// Largest per-dimension bottleneck distance. Both diagrams must be finite.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int k);

/// sqrt of the summed per-dimension squared 2-Wasserstein costs.
double wasserstein2(const PersistenceDiagram& a, const PersistenceDiagram& b);
double wasserstein2(const PersistenceDiagram& a, const PersistenceDiagram& b, int k);

}  // namespace qtgnn
