#pragma once

#include "metriko/core.hpp"
#include "metriko/dataset.hpp"
#include "metriko/linalg.hpp"
#include "metriko/metric.hpp"
#include "metriko/neighbors.hpp"
#include "metriko/optim.hpp"

#include <string>
#include <vector>

namespace metriko {

struct FitResult {
  Metric metric;
  FitReport report;
};

// Scatter matrices of labeled data.
struct Scatter {
  Matrix within;   // sum over classes of centered outer products
  Matrix between;  // sum over classes of N_c (mu_c - mu)(mu_c - mu)^T
  Vector mean;
};

inline Scatter class_scatter(const Matrix& x, const std::vector<int>& y) {
  const Eigen::Index d = x.cols();
  Scatter s{Matrix::Zero(d, d), Matrix::Zero(d, d), x.colwise().mean().transpose()};
  for (const auto& [c, idx] : class_members(y)) {
    Matrix xc(static_cast<Eigen::Index>(idx.size()), d);
    for (std::size_t i = 0; i < idx.size(); ++i) xc.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    const Vector mu = xc.colwise().mean().transpose();
    const Matrix cen = xc.rowwise() - mu.transpose();
    s.within += cen.transpose() * cen;
    const Vector dm = mu - s.mean;
    s.between += static_cast<double>(idx.size()) * dm * dm.transpose();
  }
  return s;
}

inline FitResult fit_pca(const Dataset& data, Eigen::Index d_out) {
  Stopwatch clock;
  require(data.size() >= 1, ErrorKind::BadArgument, "fit_pca: empty dataset");
  check_d_out(d_out, data.dim());
  const Vector mean = data.x.colwise().mean().transpose();
  const Matrix cen = data.x.rowwise() - mean.transpose();
  const double denom = data.size() > 1 ? static_cast<double>(data.size() - 1) : 1.0;
  const Matrix cov = cen.transpose() * cen / denom;
  const TraceSolution t = trace_max(cov, d_out);
  FitReport rep;
  rep.converged = true;
  rep.values.assign(t.values.data(), t.values.data() + t.values.size());
  rep.final_objective = t.values.sum();
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {Metric::linear(t.l).with_offset(mean), rep};
}

inline FitResult fit_lda(const Dataset& data, Eigen::Index d_out) {
  Stopwatch clock;
  require_labeled(data, "fit_lda");
  const auto r = static_cast<Eigen::Index>(class_labels(data.y).size());
  require(r >= 2, ErrorKind::SingleClass, "fit_lda: need at least two classes");
  FitReport rep;
  const Eigen::Index cap = std::min<Eigen::Index>(r - 1, data.dim());
  if (d_out > cap) {
    rep.warnings.push_back("output dimension " + std::to_string(d_out) + " capped to " + std::to_string(cap));
    d_out = cap;
  }
  check_d_out(d_out, data.dim());
  const Scatter s = class_scatter(data.x, data.y);
  const TraceSolution t = trace_ratio(s.between, s.within, d_out);
  rep.converged = true;
  rep.values.assign(t.values.data(), t.values.data() + t.values.size());
  rep.final_objective = t.values.sum();
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {Metric::linear(t.l), rep};
}

// S and C of the average neighborhood margin, from a distance matrix and
// arbitrary sample coordinates (features or kernel columns).
struct MarginScatter {
  Matrix s;  // heterogeneous
  Matrix c;  // homogeneous
};

inline MarginScatter margin_scatter(const Matrix& coords, const Matrix& dist, const std::vector<int>& y,
                                    const NeighborhoodSpec& nb) {
  const Eigen::Index n = coords.rows();
  require(nb.xi >= 1 && nb.zeta >= 1, ErrorKind::BadArgument, "neighborhood sizes must be at least 1");
  require(nb.xi + 1 <= min_class_size(y), ErrorKind::NeighborhoodTooLarge,
          "xi = " + std::to_string(nb.xi) + " needs more samples in the smallest class");
  require(nb.zeta + min_class_size(y) <= y.size(), ErrorKind::NeighborhoodTooLarge,
          "zeta = " + std::to_string(nb.zeta) + " exceeds the number of other-class samples");
  const NeighborLists homo = same_class_neighbors(dist, y, nb.xi);
  const NeighborLists hetero = other_class_neighbors(dist, y, nb.zeta);
  return {weighted_outer_sum(coords, neighbor_weights(hetero, n, true)),
          weighted_outer_sum(coords, neighbor_weights(homo, n, true))};
}

inline FitResult fit_anmm(const Dataset& data, Eigen::Index d_out, const NeighborhoodSpec& nb = {}) {
  Stopwatch clock;
  require_labeled(data, "fit_anmm");
  check_d_out(d_out, data.dim());
  const MarginScatter ms = margin_scatter(data.x, pairwise_sq_dists(data.x), data.y, nb);
  const TraceSolution t = trace_max(symmetrize(ms.s - ms.c), d_out);
  FitReport rep;
  rep.converged = true;
  rep.values.assign(t.values.data(), t.values.data() + t.values.size());
  rep.final_objective = t.values.sum();
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {Metric::linear(t.l), rep};
}

// Sigma_S and Sigma_D over k-neighborhood pairs.
struct PairCovariances {
  Matrix sigma_s;
  Matrix sigma_d;
};

inline PairCovariances neighborhood_covariances(const Matrix& coords, const Matrix& dist, const std::vector<int>& y,
                                                std::size_t k) {
  require(k >= 1, ErrorKind::BadArgument, "k must be at least 1");
  require(k + 1 <= min_class_size(y), ErrorKind::NeighborhoodTooLarge,
          "k = " + std::to_string(k) + " needs more samples in the smallest class");
  const Eigen::Index n = coords.rows();
  const NeighborLists same = same_class_neighbors(dist, y, k);
  const NeighborLists diff = other_class_neighbors(dist, y, k);
  const Matrix ws = neighbor_weights(same, n, false);
  const Matrix wd = neighbor_weights(diff, n, false);
  require(wd.sum() > 0, ErrorKind::SingleClass, "no other-class neighbors");
  return {weighted_outer_sum(coords, ws) / ws.sum(), weighted_outer_sum(coords, wd) / wd.sum()};
}

inline FitResult fit_dmlmj(const Dataset& data, Eigen::Index d_out, const NeighborhoodSpec& nb = {}) {
  Stopwatch clock;
  require_labeled(data, "fit_dmlmj");
  check_d_out(d_out, data.dim());
  require(class_labels(data.y).size() >= 2, ErrorKind::SingleClass, "fit_dmlmj: need at least two classes");
  const PairCovariances pc = neighborhood_covariances(data.x, pairwise_sq_dists(data.x), data.y, nb.k);
  Matrix ss, sd;
  try {
    ss = regularize_pd(pc.sigma_s);
    sd = regularize_pd(pc.sigma_d);
  } catch (const Error& e) {
    throw Error(ErrorKind::SingularSigma, e.what());
  }
  const TraceSolution t = select_symmetric_ratio(simultaneous_diagonalize(sd, ss), d_out);
  FitReport rep;
  rep.converged = true;
  rep.values.assign(t.values.data(), t.values.data() + t.values.size());
  rep.final_objective = 0;
  for (double v : rep.values) rep.final_objective += v + 1.0 / v;
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {Metric::linear(t.l), rep};
}

}  // namespace metriko
