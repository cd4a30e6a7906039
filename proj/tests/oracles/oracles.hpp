#pragma once

// Brute-force references for the test suites. Deliberately independent of
// the library: plain vectors in, plain numbers out.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

/// A simplex as its vertex list. The complex must be closed under faces.
using Simplex = std::vector<int>;

/// Betti numbers b_0..b_top over GF(2) by Gaussian elimination on the full
/// boundary matrices: b_k = dim C_k - rank d_k - rank d_{k+1}.
std::vector<int> homology_bruteforce(const std::vector<Simplex>& complex);

/// Finite diagram point (birth, death).
using Point = std::pair<double, double>;

struct MatchingCosts {
  double bottleneck = 0.0;
  double w2 = 0.0;
};

/// Exact bottleneck (L-infinity ground metric) and 2-Wasserstein (Euclidean
/// ground metric) distances by enumerating every partial matching; unmatched
/// points go to their nearest diagonal point. At most six points per diagram.
MatchingCosts matching_bruteforce(const std::vector<Point>& a, const std::vector<Point>& b);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> finite_difference_gradient(const std::function<double(const std::vector<double>&)>& f,
                                               const std::vector<double>& x, double step);

/// Closed-form Uhlmann fidelity of two single-qubit states from their Bloch
/// vectors: (1 + r.s + sqrt((1 - |r|^2)(1 - |s|^2))) / 2.
double qubit_fidelity(const double r[3], const double s[3]);

}  // namespace oracle
