#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qtgnn {

/// Minimum-cost perfect assignment of rows to columns of a square cost
/// matrix (O(n^3) Hungarian method with potentials). Returns the column
/// assigned to each row.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost);

/// True when the bipartite graph with `allowed(r, c)` edges has a perfect
/// matching (augmenting paths).
bool has_perfect_matching(const std::vector<std::vector<char>>& allowed);

}  // namespace qtgnn
