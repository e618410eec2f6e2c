#pragma once

#include "metriko/classify.hpp"
#include "metriko/core.hpp"
#include "metriko/dataset.hpp"
#include "metriko/dml_eigen.hpp"
#include "metriko/linalg.hpp"
#include "metriko/metric.hpp"
#include "metriko/neighbors.hpp"
#include "metriko/optim.hpp"
#include "metriko/random.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace metriko {

inline Matrix identity_rows(Eigen::Index d_out, Eigen::Index d) { return Matrix::Identity(d_out, d); }

// log(1 + exp(t)) without overflow.
inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Row-wise softmax of -d over off-diagonal entries; the diagonal gets 0.
inline Matrix neighbor_softmax(const Matrix& d) {
  const Eigen::Index n = d.rows();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) lo = std::min(lo, d(i, j));
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) s += (p(i, j) = std::exp(lo - d(i, j)));
    if (s > 0) p.row(i) /= s;
  }
  return p;
}

// Squared distances x_i^T M x_i + x_j^T M x_j - 2 x_i^T M x_j for PSD M.
inline Matrix metric_sq_dists(const Matrix& x, const Matrix& m) {
  const Matrix g = x * m * x.transpose();
  const Vector q = g.diagonal();
  Matrix d = -2.0 * g;
  d.colwise() += q;
  d.rowwise() += q.transpose();
  d.diagonal().setZero();
  return symmetrize(d).cwiseMax(0.0);
}

// ---------------------------------------------------------------- NCA

struct NcaProblem {
  const Matrix& x;
  const std::vector<int>& y;

  Matrix probabilities(const Matrix& l) const { return neighbor_softmax(pairwise_sq_dists(x * l.transpose())); }

  double value(const Matrix& l) const {
    const Matrix p = probabilities(l);
    double f = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j)
        if (j != i && y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)]) f += p(i, j);
    return f;
  }

  Matrix gradient(const Matrix& l) const {
    const Matrix p = probabilities(l);
    const Eigen::Index n = p.rows();
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double pi = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i && y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)]) pi += p(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        const bool same = k != i && y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(k)];
        w(i, k) = pi * p(i, k) - (same ? p(i, k) : 0.0);
      }
    }
    return 2.0 * l * weighted_outer_sum(x, w);
  }
};

inline OptimConfig nca_defaults() { return {0.001, 300, 1e-6, true}; }

inline FitResult fit_nca(const Dataset& data, Eigen::Index d_out, const OptimConfig& opt = nca_defaults()) {
  require_labeled(data, "fit_nca");
  require(data.size() >= 2, ErrorKind::BadArgument, "fit_nca: need at least two samples");
  check_d_out(d_out, data.dim());
  NcaProblem prob{data.x, data.y};
  auto res = ascend([&](const Matrix& l) { return prob.value(l); }, [&](const Matrix& l) { return prob.gradient(l); },
                    identity_rows(d_out, data.dim()), opt, [](Matrix l) { return l; });
  return {Metric::linear(res.state), res.report};
}

// ------------------------------------------------------ NCMML / NCMC

// Log-likelihood over a labeled set of centroids (class means for NCMML).
struct CentroidProblem {
  const Matrix& x;
  const std::vector<int>& y;
  const CentroidSet& centroids;

  struct Terms {
    Matrix p;  // N x K centroid posteriors
    Matrix q;  // posteriors renormalized within the true class
  };

  Terms terms(const Matrix& l) const {
    const Matrix zx = x * l.transpose();
    const Matrix zc = centroids.centroids * l.transpose();
    const Matrix d = pairwise_sq_dists(zx, zc);
    const Eigen::Index n = x.rows(), k = zc.rows();
    Terms t{Matrix(n, k), Matrix::Zero(n, k)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lo = d.row(i).minCoeff();
      double lo_own = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < k; ++j)
        if (centroids.labels[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)]) lo_own = std::min(lo_own, d(i, j));
      double s = 0.0, so = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        s += (t.p(i, j) = std::exp(-0.5 * (d(i, j) - lo)));
        if (centroids.labels[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)])
          so += (t.q(i, j) = std::exp(-0.5 * (d(i, j) - lo_own)));
      }
      t.p.row(i) /= s;
      t.q.row(i) /= so;
    }
    return t;
  }

  double value(const Matrix& l) const {
    const Matrix zx = x * l.transpose();
    const Matrix zc = centroids.centroids * l.transpose();
    const Matrix d = pairwise_sq_dists(zx, zc);
    double f = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      double lo_all = std::numeric_limits<double>::infinity(), lo_own = lo_all;
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        lo_all = std::min(lo_all, d(i, j));
        if (centroids.labels[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)]) lo_own = std::min(lo_own, d(i, j));
      }
      double all = 0.0, own = 0.0;
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        all += std::exp(-0.5 * (d(i, j) - lo_all));
        if (centroids.labels[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)])
          own += std::exp(-0.5 * (d(i, j) - lo_own));
      }
      f += (std::log(own) - 0.5 * lo_own) - (std::log(all) - 0.5 * lo_all);
    }
    return f / static_cast<double>(d.rows());
  }

  Matrix gradient(const Matrix& l) const {
    const Terms t = terms(l);
    const Eigen::Index n = x.rows(), k = t.p.cols();
    Matrix a(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        const bool own = centroids.labels[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)];
        a(i, j) = t.p(i, j) - (own ? t.q(i, j) : 0.0);
      }
    // sum_ij a_ij (m_j - x_i)(m_j - x_i)^T
    const Matrix& c = centroids.centroids;
    const Vector colsum = a.colwise().sum().transpose();
    const Vector rowsum = a.rowwise().sum();
    const Matrix cross = x.transpose() * a * c;
    const Matrix s = c.transpose() * colsum.asDiagonal() * c + x.transpose() * rowsum.asDiagonal() * x - cross -
                     cross.transpose();
    return l * s / static_cast<double>(n);
  }
};

inline OptimConfig ncm_defaults() { return {3.0, 300, 1e-6, true}; }

inline FitResult fit_ncmml(const Dataset& data, Eigen::Index d_out, const OptimConfig& opt = ncm_defaults()) {
  require_labeled(data, "fit_ncmml");
  require(class_labels(data.y).size() >= 2, ErrorKind::SingleClass, "fit_ncmml: need at least two classes");
  check_d_out(d_out, data.dim());
  const CentroidSet means = class_means(data.x, data.y);
  CentroidProblem prob{data.x, data.y, means};
  auto res = ascend([&](const Matrix& l) { return prob.value(l); }, [&](const Matrix& l) { return prob.gradient(l); },
                    identity_rows(d_out, data.dim()), opt, [](Matrix l) { return l; });
  return {Metric::linear(res.state), res.report};
}

struct NcmcResult {
  Metric metric;
  CentroidSet centroids;
  FitReport report;
};

inline NcmcResult fit_ncmc(const Dataset& data, Eigen::Index d_out, std::size_t centroids_per_class,
                           const OptimConfig& opt = ncm_defaults(), std::uint64_t seed = 0) {
  require_labeled(data, "fit_ncmc");
  require(centroids_per_class >= 1, ErrorKind::BadArgument, "fit_ncmc: need at least one centroid per class");
  check_d_out(d_out, data.dim());
  const CentroidSet cs = class_kmeans(data.x, data.y, centroids_per_class, seed);
  CentroidProblem prob{data.x, data.y, cs};
  auto res = ascend([&](const Matrix& l) { return prob.value(l); }, [&](const Matrix& l) { return prob.gradient(l); },
                    identity_rows(d_out, data.dim()), opt, [](Matrix l) { return l; });
  return {Metric::linear(res.state), cs, res.report};
}

// ---------------------------------------------------------------- MCML

struct McmlProblem {
  const Matrix& x;
  const std::vector<int>& y;
  std::vector<double> same_count;  // |class(i)| - 1

  McmlProblem(const Matrix& x_, const std::vector<int>& y_) : x(x_), y(y_) {
    const auto members = class_members(y);
    for (int label : y) same_count.push_back(static_cast<double>(members.at(label).size()) - 1.0);
  }

  bool used(Eigen::Index i) const { return same_count[static_cast<std::size_t>(i)] > 0; }

  // Sum over samples of KL(p0(.|i) || p^M(.|i)).
  double value(const Matrix& m) const {
    const Matrix d = metric_sq_dists(x, m);
    const Eigen::Index n = d.rows();
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used(i)) continue;
      const double ni = same_count[static_cast<std::size_t>(i)];
      double lo = std::numeric_limits<double>::infinity(), pull = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        lo = std::min(lo, d(i, j));
        if (y[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)]) pull += d(i, j);
      }
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) s += std::exp(lo - d(i, j));
      f += -std::log(ni) + pull / ni + (std::log(s) - lo);
    }
    return f;
  }

  Matrix gradient(const Matrix& m) const {
    const Matrix p = neighbor_softmax(metric_sq_dists(x, m));
    const Eigen::Index n = p.rows();
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used(i)) continue;
      const double ni = same_count[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool same = y[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(i)];
        w(i, j) = (same ? 1.0 / ni : 0.0) - p(i, j);
      }
    }
    return symmetrize(weighted_outer_sum(x, w));
  }
};

inline OptimConfig mcml_defaults() { return {0.001, 300, 1e-6, true}; }

inline FitResult fit_mcml(const Dataset& data, const OptimConfig& opt = mcml_defaults()) {
  require_labeled(data, "fit_mcml");
  McmlProblem prob(data.x, data.y);
  std::vector<std::string> warn;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    if (!prob.used(i)) {
      warn.push_back("sample " + std::to_string(i) + " is alone in its class and is skipped");
    }
  auto res = projected_gradient_psd([&](const Matrix& m) { return prob.value(m); },
                                    [&](const Matrix& m) { return prob.gradient(m); },
                                    Matrix::Identity(data.dim(), data.dim()), opt);
  res.report.warnings = std::move(warn);
  return {Metric::psd(res.state), res.report};
}

// ---------------------------------------------------------------- LDML

struct LdmlProblem {
  const Matrix& x;
  const std::vector<int>& y;
  double b;

  double value(const Matrix& m) const {
    const Matrix d = metric_sq_dists(x, m);
    double f = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
        const double t = b - d(i, j);
        f -= y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)] ? softplus(-t) : softplus(t);
      }
    return f;
  }

  Matrix gradient(const Matrix& m) const {
    const Matrix d = metric_sq_dists(x, m);
    const Eigen::Index n = d.rows();
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double yij = y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
        w(i, j) = sigmoid(b - d(i, j)) - yij;
      }
    return symmetrize(weighted_outer_sum(x, w));
  }
};

inline OptimConfig ldml_defaults() { return {0.001, 300, 1e-6, true}; }

inline FitResult fit_ldml(const Dataset& data, double b = 1.0, const OptimConfig& opt = ldml_defaults()) {
  require_labeled(data, "fit_ldml");
  require(b > 0, ErrorKind::BadArgument, "fit_ldml: threshold b must be positive");
  LdmlProblem prob{data.x, data.y, b};
  const Matrix init = Matrix::Identity(data.dim(), data.dim());
  auto res = ascend([&](const Matrix& m) { return prob.value(m); }, [&](const Matrix& m) { return prob.gradient(m); },
                    init, opt, [](const Matrix& m) { return psd_project(m); });
  return {Metric::psd(res.state), res.report};
}

// ---------------------------------------------------------------- LMNN

struct LmnnConfig {
  double mu = 0.5;
  std::size_t k = 3;
  MetricForm mode = MetricForm::PsdMatrix;
  Eigen::Index d_out = 0;  // LinearMap mode; 0 keeps the input dimension
  bool sgd = false;        // LinearMap mode only: per-sample steps
  std::uint64_t seed = 0;
};

inline NeighborLists lmnn_targets(const Matrix& x, const std::vector<int>& y, std::size_t k) {
  require(k >= 1, ErrorKind::BadArgument, "lmnn: k must be at least 1");
  require(min_class_size(y) > k, ErrorKind::ClassTooSmall,
          "lmnn: every class needs more than k = " + std::to_string(k) + " samples");
  return same_class_neighbors(pairwise_sq_dists(x), y, k);
}

// Objective and subgradient weights for the large-margin loss given a
// distance matrix over the rows of some coordinate matrix.
struct LmnnLoss {
  const std::vector<int>& y;
  const NeighborLists& targets;
  double mu;

  double value(const Matrix& d) const {
    const auto n = static_cast<Eigen::Index>(y.size());
    double pull = 0.0, push = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (auto j : targets[static_cast<std::size_t>(i)]) {
        pull += d(i, j);
        for (Eigen::Index l = 0; l < n; ++l)
          if (y[static_cast<std::size_t>(l)] != y[static_cast<std::size_t>(i)])
            push += std::max(0.0, 1.0 + d(i, j) - d(i, l));
      }
    return (1.0 - mu) * pull + mu * push;
  }

  // w(a,b) such that G = sum w(a,b) O_ab. A hinge at exactly 0 is inactive.
  Matrix weights(const Matrix& d, const std::vector<Eigen::Index>* rows = nullptr) const {
    const auto n = static_cast<Eigen::Index>(y.size());
    Matrix w = Matrix::Zero(n, n);
    auto one = [&](Eigen::Index i) {
      for (auto j : targets[static_cast<std::size_t>(i)]) {
        w(i, j) += 1.0 - mu;
        for (Eigen::Index l = 0; l < n; ++l) {
          if (y[static_cast<std::size_t>(l)] == y[static_cast<std::size_t>(i)]) continue;
          if (1.0 + d(i, j) - d(i, l) > 0.0) {
            w(i, j) += mu;
            w(i, l) -= mu;
          }
        }
      }
    };
    if (rows)
      for (auto i : *rows) one(i);
    else
      for (Eigen::Index i = 0; i < n; ++i) one(i);
    return w;
  }

  std::size_t active_count(const Matrix& d) const {
    std::size_t c = 0;
    const auto n = static_cast<Eigen::Index>(y.size());
    for (Eigen::Index i = 0; i < n; ++i)
      for (auto j : targets[static_cast<std::size_t>(i)])
        for (Eigen::Index l = 0; l < n; ++l)
          if (y[static_cast<std::size_t>(l)] != y[static_cast<std::size_t>(i)] && 1.0 + d(i, j) - d(i, l) > 0.0) ++c;
    return c;
  }
};

struct LmnnProblemM {
  const Matrix& x;
  LmnnLoss loss;
  double value(const Matrix& m) const { return loss.value(metric_sq_dists(x, m)); }
  Matrix subgradient(const Matrix& m) const {
    return symmetrize(weighted_outer_sum(x, loss.weights(metric_sq_dists(x, m))));
  }
};

struct LmnnProblemL {
  const Matrix& x;
  LmnnLoss loss;
  double value(const Matrix& l) const { return loss.value(pairwise_sq_dists(x * l.transpose())); }
  Matrix gradient(const Matrix& l) const {
    return 2.0 * l * weighted_outer_sum(x, loss.weights(pairwise_sq_dists(x * l.transpose())));
  }
};

inline OptimConfig lmnn_defaults() { return {0.001, 300, 1e-6, true}; }

namespace detail {

inline OptimResult<Matrix> lmnn_sgd(const Matrix& x, const LmnnProblemL& prob, const Matrix& init,
                                    const OptimConfig& opt, std::uint64_t seed) {
  Stopwatch clock;
  Rng rng(seed);
  Matrix l = init;
  double f = prob.value(l);
  Matrix best = l;
  double fbest = f;
  double eta = opt.learning_rate;
  FitReport rep;
  rep.objective_trace.push_back(f);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  for (std::size_t epoch = 1; epoch <= opt.max_iters; ++epoch) {
    rep.iterations = epoch;
    shuffle(order, rng);
    Matrix cand = l;
    std::vector<std::pair<Eigen::Index, double>> w;
    for (auto i : order) {
      const Matrix diff = (-x).rowwise() + x.row(i);  // row b: x_i - x_b
      const Vector di = (diff * cand.transpose()).rowwise().squaredNorm();
      const auto& y = prob.loss.y;
      const double mu = prob.loss.mu;
      w.clear();
      for (auto j : prob.loss.targets[static_cast<std::size_t>(i)]) {
        double wj = 1.0 - mu;
        for (Eigen::Index b = 0; b < x.rows(); ++b) {
          if (y[static_cast<std::size_t>(b)] == y[static_cast<std::size_t>(i)]) continue;
          if (1.0 + di[j] - di[b] > 0.0) {
            wj += mu;
            w.emplace_back(b, -mu);
          }
        }
        w.emplace_back(j, wj);
      }
      Matrix g = Matrix::Zero(cand.rows(), cand.cols());
      for (const auto& [b, wb] : w) {
        const Eigen::RowVectorXd v = diff.row(b);
        g.noalias() += (wb * (cand * v.transpose())) * v;
      }
      cand -= eta * 2.0 * g;
    }
    const double fn = prob.value(cand);
    if (!std::isfinite(fn) || fn > f) {
      eta *= 0.5;
      rep.objective_trace.push_back(fbest);
      if (eta < 1e-12) {
        rep.converged = true;
        break;
      }
      continue;
    }
    const double change = std::abs(f - fn);
    l = cand;
    f = fn;
    eta *= 1.01;
    if (f < fbest) {
      fbest = f;
      best = l;
    }
    rep.objective_trace.push_back(fbest);
    if (change <= opt.tol * std::max(1.0, std::abs(f))) {
      rep.converged = true;
      break;
    }
  }
  rep.final_objective = fbest;
  rep.elapsed = clock.seconds();
  return {best, rep};
}

}  // namespace detail

inline FitResult fit_lmnn(const Dataset& data, const LmnnConfig& cfg = {}, const OptimConfig& opt = lmnn_defaults()) {
  require_labeled(data, "fit_lmnn");
  require(cfg.mu > 0 && cfg.mu < 1, ErrorKind::BadArgument, "fit_lmnn: mu must be in (0, 1)");
  const NeighborLists targets = lmnn_targets(data.x, data.y, cfg.k);
  LmnnLoss loss{data.y, targets, cfg.mu};
  if (cfg.mode == MetricForm::PsdMatrix) {
    LmnnProblemM prob{data.x, loss};
    auto res = projected_gradient_psd([&](const Matrix& m) { return prob.value(m); },
                                      [&](const Matrix& m) { return prob.subgradient(m); },
                                      Matrix::Identity(data.dim(), data.dim()), opt);
    return {Metric::psd(res.state), res.report};
  }
  const Eigen::Index d_out = cfg.d_out > 0 ? cfg.d_out : data.dim();
  check_d_out(d_out, data.dim());
  LmnnProblemL prob{data.x, loss};
  const Matrix init = identity_rows(d_out, data.dim());
  auto res = cfg.sgd ? detail::lmnn_sgd(data.x, prob, init, opt, cfg.seed)
                     : descend([&](const Matrix& l) { return prob.value(l); },
                               [&](const Matrix& l) { return prob.gradient(l); }, init, opt,
                               [](Matrix l) { return l; });
  return {Metric::linear(res.state), res.report};
}

// Energy of assigning `label` to x_t. Target neighbors of x_t are its k
// nearest training samples of that class under the learned metric.
inline double lmnn_energy(const Dataset& data, const Metric& metric, const LmnnConfig& cfg,
                          const NeighborLists& targets, const Vector& x_t, int label) {
  const Eigen::Index n = data.size();
  const Matrix z = metric.transform(data.x);
  const Vector zt = metric.transform(x_t);
  Vector dt(n);
  for (Eigen::Index i = 0; i < n; ++i) dt[i] = (z.row(i).transpose() - zt).squaredNorm();

  std::vector<std::pair<double, Eigen::Index>> same;
  for (Eigen::Index i = 0; i < n; ++i)
    if (data.y[static_cast<std::size_t>(i)] == label) same.emplace_back(dt[i], i);
  require(same.size() >= cfg.k, ErrorKind::ClassTooSmall, "lmnn_energy: class has fewer than k samples");
  std::partial_sort(same.begin(), same.begin() + static_cast<std::ptrdiff_t>(cfg.k), same.end());

  double pull = 0.0, push = 0.0;
  for (std::size_t t = 0; t < cfg.k; ++t) {
    const double dj = same[t].first;
    pull += dj;
    for (Eigen::Index l = 0; l < n; ++l)
      if (data.y[static_cast<std::size_t>(l)] != label) push += std::max(0.0, 1.0 + dj - dt[l]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.y[static_cast<std::size_t>(i)] == label) continue;
    for (auto j : targets[static_cast<std::size_t>(i)]) {
      const double dij = (z.row(i) - z.row(j)).squaredNorm();
      push += std::max(0.0, 1.0 + dij - dt[i]);
    }
  }
  return (1.0 - cfg.mu) * pull + cfg.mu * push;
}

inline int lmnn_energy_predict(const Dataset& data, const Metric& metric, const LmnnConfig& cfg, const Vector& x_t) {
  require_labeled(data, "lmnn_energy_predict");
  const NeighborLists targets = lmnn_targets(data.x, data.y, cfg.k);
  int best = 0;
  double be = std::numeric_limits<double>::infinity();
  for (int c : class_labels(data.y)) {
    const double e = lmnn_energy(data, metric, cfg, targets, x_t, c);
    if (e < be) {
      be = e;
      best = c;
    }
  }
  return best;
}

}  // namespace metriko
