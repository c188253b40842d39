#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uos/selection.hpp"

namespace uos {

/// Table for the ordered-subsequence matching recursion. Entry (r, c) holds
/// the minimum squared distance between x[0..r] and a length-(r+1) ordered
/// subsequence of z[0..c]. Cells with c < r cannot host r+1 increasing
/// indices and are infeasible; they store an infinity sentinel that never
/// enters the recursion arithmetic (the fill is structured so only feasible
/// neighbours are read).
class DpTable {
 public:
  DpTable(int m, int n)
      : m_(m),
        n_(n),
        values_(static_cast<std::size_t>(m) * static_cast<std::size_t>(n),
                std::numeric_limits<double>::infinity()) {
    if (m < 1) throw std::invalid_argument("DpTable: m must be >= 1");
    if (m > n) throw std::invalid_argument("DpTable: m must not exceed n");
  }

  int rows() const noexcept { return m_; }
  int cols() const noexcept { return n_; }
  bool feasible(int r, int c) const noexcept { return c >= r; }

  double at(int r, int c) const {
    if (r < 0 || r >= m_ || c < 0 || c >= n_)
      throw std::invalid_argument("DpTable::at: out of range");
    return values_[index(r, c)];
  }

  double& cell(int r, int c) { return values_[index(r, c)]; }
  double cell(int r, int c) const { return values_[index(r, c)]; }

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(c);
  }

  int m_, n_;
  std::vector<double> values_;
};

/// Fills the matching table in O(mn).
///
/// Row 0: T[0][c] = min_{j <= c} |x_0 - z_j|^2 (running minimum).
/// Diagonal: T[r][r] = T[r-1][r-1] + |x_r - z_r|^2 (only one alignment).
/// Interior: T[r][c] = min{ T[r-1][c-1] + |x_r - z_c|^2, T[r][c-1] },
/// i.e. either z_c is matched to x_r or it is skipped.
inline DpTable fill_table(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  const int m = static_cast<int>(x.size());
  const int n = static_cast<int>(z.size());
  if (m < 1) throw std::invalid_argument("fill_table: x must be nonempty");
  if (m > n)
    throw std::invalid_argument("fill_table: x must not be longer than z");
  DpTable t(m, n);

  double run = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n; ++c) {
    const double d = x[0] - z[c];
    run = std::min(run, d * d);
    t.cell(0, c) = run;
  }
  for (int r = 1; r < m; ++r) {
    {
      const double d = x[r] - z[r];
      t.cell(r, r) = t.cell(r - 1, r - 1) + d * d;
    }
    for (int c = r + 1; c < n; ++c) {
      const double d = x[r] - z[c];
      const double take = t.cell(r - 1, c - 1) + d * d;
      const double skip = t.cell(r, c - 1);
      t.cell(r, c) = std::min(take, skip);
    }
  }
  return t;
}

/// Recovers the matched indices from a filled table using the min-index rule:
/// the last index is the smallest c with T[m-1][c] equal to T[m-1][n-1], and
/// each earlier index is the smallest feasible c achieving the same row value
/// left of the previously chosen index. Comparisons are exact: every
/// candidate equal to the row optimum was produced by the identical additive
/// chain along the optimal path (horizontal moves copy values bit for bit).
inline OrderedSelection backtrack(const DpTable& t, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& z) {
  const int m = t.rows();
  const int n = t.cols();
  if (static_cast<int>(x.size()) != m || static_cast<int>(z.size()) != n)
    throw std::invalid_argument("backtrack: table/vector size mismatch");

  std::vector<int> idx(static_cast<std::size_t>(m));
  int limit = n - 1;  // rightmost column available to the current row
  for (int r = m - 1; r >= 0; --r) {
    const double target = t.cell(r, limit);
    int c = limit;
    while (c - 1 >= r && t.cell(r, c - 1) == target) --c;
    idx[static_cast<std::size_t>(r)] = c;
    limit = c - 1;
  }
  return OrderedSelection(std::move(idx), n);
}

struct SelectionProjection {
  OrderedSelection selection;
  double cost;  // equals table corner T[m-1][n-1]
};

/// Projection onto the selection set: the ordered length-m subsequence of z
/// closest to x in squared l2 distance, with the matched indices.
inline SelectionProjection project_selection(const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& z) {
  DpTable t = fill_table(x, z);
  double c = t.cell(t.rows() - 1, t.cols() - 1);
  return SelectionProjection{backtrack(t, x, z), c};
}

}  // namespace uos
