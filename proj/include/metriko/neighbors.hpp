#pragma once

#include "metriko/core.hpp"
#include "metriko/dataset.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace metriko {

// Homogeneous / heterogeneous neighborhood sizes.
struct NeighborhoodSpec {
  std::size_t xi = 3;    // same-class neighbors
  std::size_t zeta = 1;  // other-class neighbors
  std::size_t k = 3;     // generic count (DMLMJ, LMNN)
};

using NeighborLists = std::vector<std::vector<Eigen::Index>>;

namespace detail {

// For each i, the `count` nearest j != i accepted by `keep`, ties to the smaller index.
// `cap` lets a sample use fewer neighbors when fewer candidates exist.
template <typename Keep>
NeighborLists select_neighbors(const Matrix& dist, std::size_t count, Keep&& keep, bool cap) {
  const Eigen::Index n = dist.rows();
  NeighborLists out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Eigen::Index>> cand;
  for (Eigen::Index i = 0; i < n; ++i) {
    cand.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && keep(i, j)) cand.emplace_back(dist(i, j), j);
    std::size_t take = count;
    if (cand.size() < count) {
      require(cap, ErrorKind::NeighborhoodTooLarge,
              "sample " + std::to_string(i) + " has only " + std::to_string(cand.size()) + " candidates, " +
                  std::to_string(count) + " requested");
      take = cand.size();
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
    for (std::size_t t = 0; t < take; ++t) out[static_cast<std::size_t>(i)].push_back(cand[t].second);
  }
  return out;
}

}  // namespace detail

inline NeighborLists same_class_neighbors(const Matrix& dist, const std::vector<int>& y, std::size_t k) {
  require(k >= 1, ErrorKind::BadArgument, "neighbor count must be at least 1");
  return detail::select_neighbors(dist, k, [&](Eigen::Index i, Eigen::Index j) { return y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)]; },
                                  false);
}

// Samples of large classes may have fewer than k other-class candidates; they get what exists.
inline NeighborLists other_class_neighbors(const Matrix& dist, const std::vector<int>& y, std::size_t k) {
  require(k >= 1, ErrorKind::BadArgument, "neighbor count must be at least 1");
  return detail::select_neighbors(dist, k, [&](Eigen::Index i, Eigen::Index j) { return y[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(j)]; },
                                  true);
}

// Weight matrix with w(i,j) = scale(i) for every j in lists[i].
inline Matrix neighbor_weights(const NeighborLists& lists, Eigen::Index n, bool average) {
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (lists[i].empty()) continue;
    const double s = average ? 1.0 / static_cast<double>(lists[i].size()) : 1.0;
    for (auto j : lists[i]) w(static_cast<Eigen::Index>(i), j) += s;
  }
  return w;
}

}  // namespace metriko
