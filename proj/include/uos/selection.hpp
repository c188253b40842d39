#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uos/rng.hpp"

namespace uos {

/// An ordered selection of m out of n positions: the row pattern of a 0-1
/// selection matrix S with a single 1 per row, strictly increasing column
/// indices. Equivalently the transpose of a lift-up embedding. Indices are
/// 0-based throughout the library.
class OrderedSelection {
 public:
  OrderedSelection(std::vector<int> indices, int n)
      : indices_(std::move(indices)), n_(n) {
    if (n_ < 1) throw std::invalid_argument("OrderedSelection: n must be >= 1");
    if (indices_.empty())
      throw std::invalid_argument("OrderedSelection: need at least one index");
    if (static_cast<int>(indices_.size()) > n_)
      throw std::invalid_argument("OrderedSelection: m exceeds n");
    int prev = -1;
    for (int idx : indices_) {
      if (idx < 0 || idx >= n_)
        throw std::invalid_argument("OrderedSelection: index out of [0, n)");
      if (idx <= prev)
        throw std::invalid_argument(
            "OrderedSelection: indices must be strictly increasing");
      prev = idx;
    }
  }

  static OrderedSelection full(int n) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    return OrderedSelection(std::move(idx), n);
  }

  // Keeps the first m positions; the reference selection in the
  // initialization-probability argument.
  static OrderedSelection first_m(int m, int n) {
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    return OrderedSelection(std::move(idx), n);
  }

  // Uniform over all C(n, m) selections: partial Fisher-Yates, then sort.
  static OrderedSelection random(int m, int n, std::mt19937_64& rng) {
    if (m < 1 || m > n)
      throw std::invalid_argument("OrderedSelection::random: need 1 <= m <= n");
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> idx(pool.begin(), pool.begin() + m);
    std::sort(idx.begin(), idx.end());
    return OrderedSelection(std::move(idx), n);
  }

  int m() const noexcept { return static_cast<int>(indices_.size()); }
  int n() const noexcept { return n_; }
  const std::vector<int>& indices() const noexcept { return indices_; }

  bool operator==(const OrderedSelection& other) const noexcept {
    return n_ == other.n_ && indices_ == other.indices_;
  }
  bool operator!=(const OrderedSelection& other) const noexcept {
    return !(*this == other);
  }

 private:
  std::vector<int> indices_;
  int n_;
};

/// S v: the subvector of v at the selected positions, order preserved.
inline Eigen::VectorXd apply_selection(const OrderedSelection& s,
                                       const Eigen::VectorXd& v) {
  if (v.size() != s.n())
    throw std::invalid_argument("apply_selection: vector length != n");
  Eigen::VectorXd out(s.m());
  const auto& idx = s.indices();
  for (int l = 0; l < s.m(); ++l) out[l] = v[idx[static_cast<std::size_t>(l)]];
  return out;
}

/// S M: row gather, so (S M) y = S (M y).
inline Eigen::MatrixXd select_rows(const OrderedSelection& s,
                                   const Eigen::MatrixXd& m) {
  if (m.rows() != s.n())
    throw std::invalid_argument("select_rows: matrix rows != n");
  Eigen::MatrixXd out(s.m(), m.cols());
  const auto& idx = s.indices();
  for (int l = 0; l < s.m(); ++l)
    out.row(l) = m.row(idx[static_cast<std::size_t>(l)]);
  return out;
}

/// L x = S^T x: embeds an m-vector at the selected positions, zero elsewhere.
inline Eigen::VectorXd lift(const OrderedSelection& s,
                            const Eigen::VectorXd& x) {
  if (x.size() != s.m())
    throw std::invalid_argument("lift: vector length != m");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n());
  const auto& idx = s.indices();
  for (int l = 0; l < s.m(); ++l) out[idx[static_cast<std::size_t>(l)]] = x[l];
  return out;
}

/// Similarity nu = tr(S^T S') / m: the fraction of positions where both
/// selections pick the same index.
inline double similarity(const OrderedSelection& s,
                         const OrderedSelection& s_prime) {
  if (s.m() != s_prime.m() || s.n() != s_prime.n())
    throw std::invalid_argument("similarity: selections must share (m, n)");
  int matches = 0;
  for (int l = 0; l < s.m(); ++l)
    if (s.indices()[static_cast<std::size_t>(l)] ==
        s_prime.indices()[static_cast<std::size_t>(l)])
      ++matches;
  return static_cast<double>(matches) / static_cast<double>(s.m());
}

}  // namespace uos
