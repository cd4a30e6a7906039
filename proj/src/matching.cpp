#include "qtgnn/matching.hpp"

#include <limits>

#include "qtgnn/error.hpp"

namespace qtgnn {

std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw ArgumentError("hungarian needs a square cost matrix");
  const auto n = static_cast<std::size_t>(cost.rows());
  if (n == 0) return {};
  if (!cost.allFinite()) throw ArgumentError("hungarian needs finite costs");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

namespace {

bool augment(std::size_t r, const std::vector<std::vector<char>>& allowed, std::vector<char>& seen,
             std::vector<std::size_t>& owner) {
  constexpr auto kFree = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < allowed[r].size(); ++c) {
    if (!allowed[r][c] || seen[c]) continue;
    seen[c] = 1;
    if (owner[c] == kFree || augment(owner[c], allowed, seen, owner)) {
      owner[c] = r;
      return true;
    }
  }
  return false;
}

}  // namespace

bool has_perfect_matching(const std::vector<std::vector<char>>& allowed) {
  const std::size_t n = allowed.size();
  for (const auto& row : allowed) {
    if (row.size() != n) throw ArgumentError("matching needs a square adjacency");
  }
  std::vector<std::size_t> owner(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<char> seen(n, 0);
    if (!augment(r, allowed, seen, owner)) return false;
  }
  return true;
}

}  // namespace qtgnn
