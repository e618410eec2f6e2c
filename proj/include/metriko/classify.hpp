#pragma once

#include "metriko/core.hpp"
#include "metriko/dataset.hpp"
#include "metriko/metric.hpp"
#include "metriko/random.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace metriko {

// Flattened per-class centroids: row i belongs to class labels[i].
struct CentroidSet {
  Matrix centroids;
  std::vector<int> labels;
};

// Majority label; ties go to the smallest label.
inline int vote(const std::vector<int>& labels) {
  std::map<int, int> count;
  for (int l : labels) ++count[l];
  int best = 0, best_n = -1;
  for (const auto& [l, n] : count)
    if (n > best_n) {
      best = l;
      best_n = n;
    }
  return best;
}

// Indices of the k rows of `points` closest to q, ties to the smaller index.
inline std::vector<Eigen::Index> nearest_rows(const Matrix& points, const Eigen::RowVectorXd& q, std::size_t k) {
  const Eigen::Index n = points.rows();
  std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = {(points.row(i) - q).squaredNorm(), i};
  k = std::min<std::size_t>(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<Eigen::Index> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
  return out;
}

// Euclidean k-NN on already transformed data.
inline std::vector<int> knn_predict_batch(const Matrix& train_x, const std::vector<int>& train_y, std::size_t k,
                                          const Matrix& queries) {
  require(train_x.rows() > 0, ErrorKind::EmptyTrain, "knn: empty training set");
  require(k >= 1 && k <= static_cast<std::size_t>(train_x.rows()), ErrorKind::BadArgument, "knn: k must be in [1, N]");
  require(queries.cols() == train_x.cols(), ErrorKind::DimensionMismatch, "knn: query dimension differs");
  std::vector<int> out(static_cast<std::size_t>(queries.rows()));
  std::vector<int> lab;
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    lab.clear();
    for (auto i : nearest_rows(train_x, queries.row(q), k)) lab.push_back(train_y[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(q)] = vote(lab);
  }
  return out;
}

inline int knn_predict(const Dataset& train, const Metric& metric, std::size_t k, const Vector& x) {
  require(train.size() > 0, ErrorKind::EmptyTrain, "knn_predict: empty training set");
  require(k >= 1 && k <= static_cast<std::size_t>(train.size()), ErrorKind::BadArgument, "knn_predict: k must be in [1, N]");
  std::vector<std::pair<double, Eigen::Index>> d;
  d.reserve(static_cast<std::size_t>(train.size()));
  for (Eigen::Index i = 0; i < train.size(); ++i) d.emplace_back(metric.distance_sq(train.x.row(i).transpose(), x), i);
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<int> lab;
  for (std::size_t i = 0; i < k; ++i) lab.push_back(train.y[static_cast<std::size_t>(d[i].second)]);
  return vote(lab);
}

inline CentroidSet class_means(const Matrix& x, const std::vector<int>& y) {
  const auto members = class_members(y);
  CentroidSet c;
  c.centroids.resize(static_cast<Eigen::Index>(members.size()), x.cols());
  Eigen::Index r = 0;
  for (const auto& [label, idx] : members) {
    Vector m = Vector::Zero(x.cols());
    for (auto i : idx) m += x.row(i).transpose();
    c.centroids.row(r++) = (m / static_cast<double>(idx.size())).transpose();
    c.labels.push_back(label);
  }
  return c;
}

// Nearest centroid; ties to the smaller label, then the smaller row.
inline int ncmc_predict(const CentroidSet& centroids, const Metric& metric, const Vector& x) {
  require(centroids.centroids.rows() > 0, ErrorKind::EmptyTrain, "ncmc_predict: no centroids");
  double best = std::numeric_limits<double>::infinity();
  int label = 0;
  for (Eigen::Index i = 0; i < centroids.centroids.rows(); ++i) {
    const double d = metric.distance_sq(centroids.centroids.row(i).transpose(), x);
    const int l = centroids.labels[static_cast<std::size_t>(i)];
    if (d < best || (d == best && l < label)) {
      best = d;
      label = l;
    }
  }
  return label;
}

inline int ncm_predict(const Dataset& train, const Metric& metric, const Vector& x) {
  require(train.size() > 0, ErrorKind::EmptyTrain, "ncm_predict: empty training set");
  return ncmc_predict(class_means(train.x, train.y), metric, x);
}

// Euclidean nearest centroid on already transformed data.
inline std::vector<int> nearest_centroid_batch(const CentroidSet& c, const Matrix& queries) {
  require(c.centroids.rows() > 0, ErrorKind::EmptyTrain, "nearest centroid: no centroids");
  std::vector<int> out(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (Eigen::Index i = 0; i < c.centroids.rows(); ++i) {
      const double d = (c.centroids.row(i) - queries.row(q)).squaredNorm();
      const int l = c.labels[static_cast<std::size_t>(i)];
      if (d < best || (d == best && l < label)) {
        best = d;
        label = l;
      }
    }
    out[static_cast<std::size_t>(q)] = label;
  }
  return out;
}

struct KMeansResult {
  Matrix centroids;
  std::vector<Eigen::Index> assignment;
  std::vector<double> sse_trace;  // after each assignment step
};

inline KMeansResult kmeans_detailed(const Matrix& points, std::size_t k, std::uint64_t seed,
                                    std::size_t max_iters = 100) {
  const Eigen::Index n = points.rows();
  require(n > 0, ErrorKind::EmptyTrain, "kmeans: no points");
  require(k >= 1 && k <= static_cast<std::size_t>(n), ErrorKind::BadArgument, "kmeans: k must be in [1, N]");
  const auto kk = static_cast<Eigen::Index>(k);
  Rng rng(seed);

  // k-means++ seeding.
  Matrix c(kk, points.cols());
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  Eigen::Index first = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
  c.row(0) = points.row(first);
  used[static_cast<std::size_t>(first)] = true;
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (points.row(i) - c.row(0)).squaredNorm();
  for (Eigen::Index j = 1; j < kk; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2[i] <= 0) continue;
        acc += d2[i];
        pick = i;
        if (acc >= r) break;
      }
    }
    if (pick < 0)
      for (Eigen::Index i = 0; i < n && pick < 0; ++i)
        if (!used[static_cast<std::size_t>(i)]) pick = i;
    used[static_cast<std::size_t>(pick)] = true;
    c.row(j) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (points.row(i) - c.row(j)).squaredNorm());
  }

  KMeansResult res;
  res.assignment.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t it = 0; it < max_iters; ++it) {
    bool changed = false;
    double sse = 0.0;
    Vector own(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < kk; ++j) {
        const double d = (points.row(i) - c.row(j)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      if (res.assignment[static_cast<std::size_t>(i)] != best) changed = true;
      res.assignment[static_cast<std::size_t>(i)] = best;
      own[i] = bd;
      sse += bd;
    }
    res.sse_trace.push_back(sse);
    if (!changed && it > 0) break;

    Matrix sum = Matrix::Zero(kk, points.cols());
    std::vector<std::size_t> cnt(static_cast<std::size_t>(kk), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sum.row(res.assignment[static_cast<std::size_t>(i)]) += points.row(i);
      ++cnt[static_cast<std::size_t>(res.assignment[static_cast<std::size_t>(i)])];
    }
    for (Eigen::Index j = 0; j < kk; ++j) {
      if (cnt[static_cast<std::size_t>(j)] > 0) {
        c.row(j) = sum.row(j) / static_cast<double>(cnt[static_cast<std::size_t>(j)]);
      } else {
        Eigen::Index far = 0;
        own.maxCoeff(&far);
        c.row(j) = points.row(far);
        own[far] = 0.0;
      }
    }
  }
  res.centroids = c;
  return res;
}

inline Matrix kmeans(const Matrix& points, std::size_t k, std::uint64_t seed) {
  return kmeans_detailed(points, k, seed).centroids;
}

// k-means inside every class.
inline CentroidSet class_kmeans(const Matrix& x, const std::vector<int>& y, std::size_t per_class,
                                std::uint64_t seed) {
  CentroidSet out;
  std::vector<Eigen::RowVectorXd> rows;
  for (const auto& [label, idx] : class_members(y)) {
    require(idx.size() >= per_class, ErrorKind::ClassTooSmall,
            "class " + std::to_string(label) + " has fewer samples than centroids");
    Matrix pts(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    const Matrix c = kmeans(pts, per_class, seed + static_cast<std::uint64_t>(label));
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
      rows.push_back(c.row(j));
      out.labels.push_back(label);
    }
  }
  out.centroids.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.centroids.row(static_cast<Eigen::Index>(i)) = rows[i];
  return out;
}

inline double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  require(truth.size() == pred.size() && !truth.empty(), ErrorKind::DimensionMismatch, "accuracy: size mismatch");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += truth[i] == pred[i];
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

}  // namespace metriko
