#pragma once

#include "metriko/core.hpp"
#include "metriko/dataset.hpp"
#include "metriko/dml_eigen.hpp"
#include "metriko/linalg.hpp"
#include "metriko/metric.hpp"
#include "metriko/optim.hpp"
#include "metriko/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace metriko {

using IndexPair = std::pair<Eigen::Index, Eigen::Index>;

struct PairConstraints {
  std::vector<IndexPair> similar;
  std::vector<IndexPair> dissimilar;
};

inline void validate(const PairConstraints& pc, Eigen::Index n) {
  auto ok = [&](const IndexPair& p) { return p.first >= 0 && p.second >= 0 && p.first < n && p.second < n; };
  for (const auto& p : pc.similar) require(ok(p), ErrorKind::BadArgument, "similar pair index out of range");
  for (const auto& p : pc.dissimilar) require(ok(p), ErrorKind::BadArgument, "dissimilar pair index out of range");
}

// Same-label pairs as S, different-label pairs as D; each capped at 40*d
// pairs drawn without replacement with a fixed seed.
inline PairConstraints supervised_pairs(const std::vector<int>& y, Eigen::Index d, std::uint64_t seed = 0) {
  PairConstraints pc;
  const auto n = static_cast<Eigen::Index>(y.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      (y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(j)] ? pc.similar : pc.dissimilar).emplace_back(i, j);
  const auto cap = static_cast<std::size_t>(40 * d);
  Rng rng(seed);
  for (auto* set : {&pc.similar, &pc.dissimilar}) {
    if (set->size() <= cap) continue;
    shuffle(*set, rng);
    set->resize(cap);
    std::sort(set->begin(), set->end());
  }
  return pc;
}

inline Vector pair_diff(const Matrix& x, const IndexPair& p) { return (x.row(p.first) - x.row(p.second)).transpose(); }

// Sum of (x_i - x_j)(x_i - x_j)^T over a pair list.
inline Matrix pair_scatter(const Matrix& x, const std::vector<IndexPair>& pairs) {
  Matrix s = Matrix::Zero(x.cols(), x.cols());
  for (const auto& p : pairs) {
    const Vector v = pair_diff(x, p);
    s.noalias() += v * v.transpose();
  }
  return s;
}

// ---------------------------------------------------------------- ITML

struct ItmlConfig {
  double u = 0.0;  // <= 0: 5th percentile of sampled squared distances
  double l = 0.0;  // <= 0: 95th percentile
  Matrix m0;       // empty: identity
  double slack_weight = 1.0;  // gamma; infinity gives hard constraints
  double tol = 1e-3;          // relative dual change between cycles
  std::uint64_t seed = 0;
};

// 5th and 95th percentiles of squared Euclidean distances over 1000 random pairs.
inline std::pair<double, double> default_itml_bounds(const Matrix& x, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  require(n >= 2, ErrorKind::BadArgument, "need at least two samples for distance bounds");
  Rng rng(seed);
  std::vector<double> d;
  d.reserve(1000);
  while (d.size() < 1000) {
    const std::size_t i = uniform_index(rng, n), j = uniform_index(rng, n);
    if (i == j) continue;
    d.push_back((x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).squaredNorm());
  }
  std::sort(d.begin(), d.end());
  return {d[50], d[950]};
}

inline double itml_max_violation(const Matrix& x, const PairConstraints& pc, const Matrix& m, double u, double l) {
  double v = 0.0;
  for (const auto& p : pc.similar) {
    const Vector w = pair_diff(x, p);
    v = std::max(v, w.dot(m * w) - u);
  }
  for (const auto& p : pc.dissimilar) {
    const Vector w = pair_diff(x, p);
    v = std::max(v, l - w.dot(m * w));
  }
  return v;
}

inline FitResult fit_itml(const Dataset& data, const PairConstraints& pc, const ItmlConfig& cfg = {},
                          std::size_t max_cycles = 1000) {
  Stopwatch clock;
  require(data.size() >= 1, ErrorKind::BadArgument, "fit_itml: empty dataset");
  validate(pc, data.size());
  const Eigen::Index d = data.dim();
  const Matrix m0 = cfg.m0.size() ? cfg.m0 : Matrix::Identity(d, d);
  require(m0.rows() == d && m0.cols() == d, ErrorKind::DimensionMismatch, "fit_itml: prior metric size");
  require(min_eigenvalue(m0) > 0, ErrorKind::NotPSD, "fit_itml: prior metric must be positive definite");
  require(cfg.slack_weight > 0, ErrorKind::BadArgument, "fit_itml: slack weight must be positive");

  double u = cfg.u, l = cfg.l;
  if (u <= 0 || l <= 0) {
    const auto [du, dl] = default_itml_bounds(data.x, cfg.seed);
    if (u <= 0) u = du;
    if (l <= 0) l = dl;
  }
  require(u > 0 && u < l, ErrorKind::BadArgument, "fit_itml: need 0 < u < l");

  FitReport rep;
  Matrix m = m0;
  if (pc.similar.empty() && pc.dissimilar.empty()) {
    rep.converged = true;
    rep.values = {0.0};
    rep.elapsed = clock.seconds();
    return {Metric::psd(m), rep};
  }

  struct Row {
    Vector v;
    double sign;  // +1 similar, -1 dissimilar
    double bound;
    double lambda = 0.0;
  };
  std::vector<Row> rows;
  for (const auto& p : pc.similar) rows.push_back({pair_diff(data.x, p), 1.0, u});
  for (const auto& p : pc.dissimilar) rows.push_back({pair_diff(data.x, p), -1.0, l});

  const double gamma = cfg.slack_weight;
  const double gamma_proj = std::isinf(gamma) ? 1.0 : gamma / (gamma + 1.0);
  std::vector<double> old(rows.size());
  for (std::size_t cycle = 1; cycle <= max_cycles; ++cycle) {
    rep.iterations = cycle;
    for (std::size_t t = 0; t < rows.size(); ++t) old[t] = rows[t].lambda;
    for (auto& r : rows) {
      const Vector mv = m * r.v;
      const double p = r.v.dot(mv);
      if (!(p > 1e-300)) continue;
      const double alpha = std::min(r.lambda, r.sign * gamma_proj * (1.0 / p - 1.0 / r.bound));
      r.lambda -= alpha;
      const double beta = r.sign * alpha / (1.0 - r.sign * alpha * p);
      if (!std::isinf(gamma)) r.bound = 1.0 / (1.0 / r.bound + r.sign * alpha / gamma);
      m.noalias() += beta * mv * mv.transpose();
    }
    m = symmetrize(m);
    double diff = 0.0, norm = 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      diff += std::abs(old[t] - rows[t].lambda);
      norm += std::abs(old[t]) + std::abs(rows[t].lambda);
    }
    const double ld = logdet_divergence(m0, m);
    rep.objective_trace.push_back(ld);
    if (norm == 0.0 || diff / norm < cfg.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.final_objective = rep.objective_trace.empty() ? 0.0 : rep.objective_trace.back();
  rep.values = {itml_max_violation(data.x, pc, m, u, l), u, l};
  rep.elapsed = clock.seconds();
  return {Metric::psd(m), rep};
}

// ---------------------------------------------------------------- LSI

struct LsiProblem {
  const Matrix& x;
  const PairConstraints& pc;
  Matrix xs;  // similarity scatter
  std::vector<Vector> dv;

  LsiProblem(const Matrix& x_, const PairConstraints& pc_) : x(x_), pc(pc_), xs(pair_scatter(x_, pc_.similar)) {
    for (const auto& p : pc.dissimilar) dv.push_back(pair_diff(x, p));
  }

  double value(const Matrix& m) const {
    double f = 0.0;
    for (const auto& v : dv) f += std::sqrt(std::max(0.0, v.dot(m * v)));
    return f;
  }

  Matrix gradient(const Matrix& m) const {
    Matrix g = Matrix::Zero(m.rows(), m.cols());
    for (const auto& v : dv) {
      const double dist = std::sqrt(std::max(0.0, v.dot(m * v)));
      if (dist > 1e-12) g.noalias() += (0.5 / dist) * v * v.transpose();
    }
    return g;
  }

  // Half-space {<X_S, M> <= 1} then PSD cone, alternated; finally scaled
  // into the half-space, which keeps it PSD.
  Matrix project(const Matrix& m) const {
    const double xs2 = xs.squaredNorm();
    std::vector<std::function<Matrix(const Matrix&)>> sets{
        [&](const Matrix& a) {
          const double excess = (xs.cwiseProduct(a)).sum() - 1.0;
          return excess > 0 ? Matrix(a - (excess / xs2) * xs) : a;
        },
        [](const Matrix& a) { return psd_project(a); }};
    Matrix out = iterated_projections(sets, symmetrize(m), 100, 1e-10).state;
    out = psd_project(out);
    const double s = (xs.cwiseProduct(out)).sum();
    if (s > 1.0) out /= s;
    return out;
  }
};

inline OptimConfig lsi_defaults() { return {0.1, 300, 1e-6, true}; }

inline FitResult fit_lsi(const Dataset& data, const PairConstraints& pc, const OptimConfig& opt = lsi_defaults()) {
  require(data.size() >= 1, ErrorKind::BadArgument, "fit_lsi: empty dataset");
  validate(pc, data.size());
  require(!pc.similar.empty(), ErrorKind::EmptyConstraints, "fit_lsi: similar set is empty");
  require(!pc.dissimilar.empty(), ErrorKind::EmptyConstraints, "fit_lsi: dissimilar set is empty");
  LsiProblem prob(data.x, pc);
  const double t = prob.xs.trace();
  require(t > 0, ErrorKind::EmptyConstraints, "fit_lsi: similar pairs are all coincident");
  const Matrix init = Matrix::Identity(data.dim(), data.dim()) / t;
  const double scale = init.norm();
  // Gradient rescaled to the size of the iterate, so the rate is unit free.
  auto res = ascend([&](const Matrix& m) { return prob.value(m); },
                    [&](const Matrix& m) {
                      const Matrix g = prob.gradient(m);
                      const double gn = g.norm();
                      return gn > 0 ? Matrix(g * (scale / gn)) : g;
                    },
                    init, opt, [&](const Matrix& m) { return prob.project(m); });
  return {Metric::psd(res.state), res.report};
}

// ------------------------------------------------------------- DML-eig

struct DmlEigResult {
  Metric metric;
  FitReport report;
  Vector u;  // weights over dissimilar pairs
};

namespace detail {

struct EigState {
  double lambda_max;
  Matrix s_star;
};

// Smoothed maximizer over {S PSD, tr S = 1}: softmax of eigenvalues with a
// temperature relative to the largest one.
inline EigState smoothed_max(const Matrix& z, double mu) {
  const SymEigen e = sym_eigen(z);
  const double top = e.values[0];
  const double temp = mu * std::max(std::abs(top), 1e-300);
  Vector w(e.values.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::exp((e.values[i] - top) / temp);
  w /= w.sum();
  return {top, compose(e, w)};
}

}  // namespace detail

inline DmlEigResult fit_dml_eig(const Dataset& data, const PairConstraints& pc, double mu_smooth = 1e-2,
                                std::size_t max_iters = 500) {
  Stopwatch clock;
  require(data.size() >= 1, ErrorKind::BadArgument, "fit_dml_eig: empty dataset");
  validate(pc, data.size());
  require(!pc.dissimilar.empty(), ErrorKind::EmptyConstraints, "fit_dml_eig: dissimilar set is empty");
  require(mu_smooth > 0, ErrorKind::BadArgument, "fit_dml_eig: smoothing must be positive");
  Matrix xs;
  Matrix b;
  try {
    xs = regularize_pd(pair_scatter(data.x, pc.similar), ErrorKind::SingularXS);
    b = inv_sqrt_pd(xs, ErrorKind::SingularXS);
  } catch (const Error& e) {
    throw Error(ErrorKind::SingularXS, e.what());
  }

  const auto nd = static_cast<Eigen::Index>(pc.dissimilar.size());
  Matrix w(nd, data.dim());  // row tau: X_S^-1/2 (x_i - x_j)
  for (Eigen::Index t = 0; t < nd; ++t) w.row(t) = (b * pair_diff(data.x, pc.dissimilar[static_cast<std::size_t>(t)])).transpose();

  Vector u = Vector::Constant(nd, 1.0 / static_cast<double>(nd));
  Vector best_u = u;
  double best = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  FitReport rep;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    rep.iterations = it;
    const Matrix z = w.transpose() * u.asDiagonal() * w;
    const detail::EigState st = detail::smoothed_max(symmetrize(z), mu_smooth);
    if (st.lambda_max < best) {
      best = st.lambda_max;
      best_u = u;
    }
    rep.objective_trace.push_back(best);
    const Vector g = (w * st.s_star).cwiseProduct(w).rowwise().sum();
    lower = std::max(lower, g.minCoeff());
    if (best - lower <= 1e-4 * std::abs(best)) {
      rep.converged = true;
      break;
    }
    const double gmax = g.cwiseAbs().maxCoeff();
    if (!(gmax > 0)) break;
    const double eta = 1.0 / (std::sqrt(static_cast<double>(it)) * gmax);
    Vector logu = u.array().log().matrix() - eta * g;
    logu.array() -= logu.maxCoeff();
    u = logu.array().exp().matrix();
    u /= u.sum();
  }
  const Matrix z = w.transpose() * best_u.asDiagonal() * w;
  const detail::EigState st = detail::smoothed_max(symmetrize(z), mu_smooth);
  Matrix m = symmetrize(b * st.s_star * b);
  const double s = (xs.cwiseProduct(m)).sum();
  if (s > 0) m /= s;
  rep.final_objective = best;
  rep.values = {best - lower};
  rep.elapsed = clock.seconds();
  return {Metric::psd(psd_project(m)), rep, best_u};
}

}  // namespace metriko
