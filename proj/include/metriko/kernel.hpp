#pragma once

#include "metriko/core.hpp"
#include "metriko/dataset.hpp"
#include "metriko/dml_eigen.hpp"
#include "metriko/dml_gradient.hpp"
#include "metriko/linalg.hpp"
#include "metriko/metric.hpp"
#include "metriko/neighbors.hpp"
#include "metriko/optim.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace metriko {

enum class KernelKind { Linear, Poly, Rbf, Laplacian };

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  int degree = 2;
  double coef0 = 1.0;
  double gamma = 0.0;  // 0 means 1/d, fixed when the kernel meets data
};

inline KernelSpec linear_kernel() { return {}; }
inline KernelSpec poly_kernel(int degree, double coef0 = 1.0) { return {KernelKind::Poly, degree, coef0, 0.0}; }
inline KernelSpec rbf_kernel(double gamma = 0.0) { return {KernelKind::Rbf, 2, 1.0, gamma}; }
inline KernelSpec laplacian_kernel(double gamma = 0.0) { return {KernelKind::Laplacian, 2, 1.0, gamma}; }

inline KernelSpec resolve(KernelSpec s, Eigen::Index d) {
  if (s.gamma <= 0.0) s.gamma = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, d));
  require(s.degree >= 1, ErrorKind::BadArgument, "kernel degree must be at least 1");
  return s;
}

// "linear", "poly-2", "poly-3:0.5" (coef0), "rbf", "rbf:0.5" (gamma), "laplacian", "laplacian:0.1".
inline KernelSpec parse_kernel(const std::string& text) {
  std::string head = text, arg;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    head = text.substr(0, colon);
    arg = text.substr(colon + 1);
  }
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (...) {
      used = 0;
    }
    require(used == s.size() && used > 0, ErrorKind::BadArgument, "bad kernel parameter in '" + text + "'");
    return v;
  };
  if (head == "linear" && arg.empty()) return linear_kernel();
  if (head == "rbf") return rbf_kernel(arg.empty() ? 0.0 : number(arg));
  if (head == "laplacian") return laplacian_kernel(arg.empty() ? 0.0 : number(arg));
  if (head.rfind("poly-", 0) == 0) {
    const double deg = number(head.substr(5));
    require(deg >= 1 && deg == std::floor(deg), ErrorKind::BadArgument, "poly degree must be a positive integer");
    return poly_kernel(static_cast<int>(deg), arg.empty() ? 1.0 : number(arg));
  }
  throw Error(ErrorKind::BadArgument, "unknown kernel '" + text + "'");
}

inline std::string to_string(const KernelSpec& s) {
  std::ostringstream os;
  os << std::setprecision(17);
  switch (s.kind) {
    case KernelKind::Linear: os << "linear"; break;
    case KernelKind::Poly: os << "poly-" << s.degree << ':' << s.coef0; break;
    case KernelKind::Rbf: os << "rbf"; if (s.gamma > 0) os << ':' << s.gamma; break;
    case KernelKind::Laplacian: os << "laplacian"; if (s.gamma > 0) os << ':' << s.gamma; break;
  }
  return os.str();
}

inline Matrix kernel_matrix(const KernelSpec& spec0, const Matrix& xa, const Matrix& xb) {
  require(xa.cols() == xb.cols(), ErrorKind::DimensionMismatch, "kernel_matrix: feature dimensions differ");
  const KernelSpec spec = resolve(spec0, xa.cols());
  switch (spec.kind) {
    case KernelKind::Linear: return xa * xb.transpose();
    case KernelKind::Poly: {
      Matrix g = xa * xb.transpose();
      return (g.array() + spec.coef0).pow(spec.degree).matrix();
    }
    case KernelKind::Rbf: return (-spec.gamma * pairwise_sq_dists(xa, xb).array()).exp().matrix();
    case KernelKind::Laplacian: {
      Matrix k(xa.rows(), xb.rows());
      for (Eigen::Index i = 0; i < xa.rows(); ++i)
        for (Eigen::Index j = 0; j < xb.rows(); ++j)
          k(i, j) = std::exp(-spec.gamma * (xa.row(i) - xb.row(j)).cwiseAbs().sum());
      return k;
    }
  }
  return {};
}

inline Matrix kernel_matrix(const KernelSpec& spec, const Matrix& x) { return symmetrize(kernel_matrix(spec, x, x)); }

inline double kernel_value(const KernelSpec& spec, const Vector& x, const Vector& y) {
  return kernel_matrix(spec, Matrix(x.transpose()), Matrix(y.transpose()))(0, 0);
}

inline double feature_dist_sq(const KernelSpec& spec, const Vector& x, const Vector& y) {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch, "feature_dist_sq: dimensions differ");
  if (spec.kind == KernelKind::Linear) return (x - y).squaredNorm();
  const double v = kernel_value(spec, x, x) + kernel_value(spec, y, y) - 2.0 * kernel_value(spec, x, y);
  return std::max(0.0, v);
}

// Feature-space squared distances between training points.
inline Matrix feature_dist_matrix(const KernelSpec& spec, const Matrix& x, const Matrix& gram) {
  if (spec.kind == KernelKind::Linear) return pairwise_sq_dists(x);
  const Vector q = gram.diagonal();
  Matrix d = -2.0 * gram;
  d.colwise() += q;
  d.rowwise() += q.transpose();
  d.diagonal().setZero();
  return symmetrize(d).cwiseMax(0.0);
}

constexpr Eigen::Index kMaxKernelSamples = 2500;

struct KernelModel {
  Matrix a;        // d' x N
  Matrix train_x;  // N x d
  KernelSpec spec;  // gamma resolved
};

struct KernelFitResult {
  KernelModel model;
  FitReport report;
};

inline Matrix kernel_transform(const KernelModel& model, const Matrix& x) {
  require(x.cols() == model.train_x.cols(), ErrorKind::DimensionMismatch,
          "kernel_transform: data has " + std::to_string(x.cols()) + " columns, model expects " +
              std::to_string(model.train_x.cols()));
  return kernel_matrix(model.spec, x, model.train_x) * model.a.transpose();
}

namespace detail {

inline void check_kernel_data(const Dataset& data, const char* who) {
  require_labeled(data, who);
  require(data.size() <= kMaxKernelSamples, ErrorKind::TooLarge,
          std::string(who) + ": " + std::to_string(data.size()) + " samples exceed the limit of " +
              std::to_string(kMaxKernelSamples));
}

// Orthonormal basis (rows) of the numerical range of a Gram matrix.
inline Matrix gram_range(const Matrix& gram) {
  const SymEigen e = sym_eigen(gram);
  const double top = std::max(0.0, e.values[0]);
  Eigen::Index r = 0;
  while (r < e.values.size() && e.values[r] > 1e-10 * top && e.values[r] > 0.0) ++r;
  require(r >= 1, ErrorKind::SingularB, "Gram matrix is zero");
  return e.vectors.topRows(r);
}

inline Matrix gram_regularize(const Matrix& m) {
  Matrix r = symmetrize(m);
  const double eps = 1e-8 * std::max(0.0, r.trace()) / static_cast<double>(r.rows());
  r.diagonal().array() += eps;
  return r;
}

}  // namespace detail

// KDA scatter pair: U between-class, V within-class, over Gram columns.
struct KernelScatter {
  Matrix u;
  Matrix v;
};

inline KernelScatter kda_scatter(const Matrix& gram, const std::vector<int>& y) {
  const Eigen::Index n = gram.rows();
  const Vector mu = gram.rowwise().mean();
  KernelScatter s{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (const auto& [c, idx] : class_members(y)) {
    Matrix kc(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) kc.col(static_cast<Eigen::Index>(j)) = gram.col(idx[j]);
    const Vector uc = kc.rowwise().mean();
    const Vector du = uc - mu;
    s.u += static_cast<double>(idx.size()) * du * du.transpose();
    const Matrix centered = kc.colwise() - uc;
    s.v += centered * centered.transpose();
  }
  return s;
}

inline KernelFitResult fit_kda(const Dataset& data, Eigen::Index d_out, const KernelSpec& spec0) {
  Stopwatch clock;
  detail::check_kernel_data(data, "fit_kda");
  const auto r = static_cast<Eigen::Index>(class_labels(data.y).size());
  require(r >= 2, ErrorKind::SingleClass, "fit_kda: need at least two classes");
  const KernelSpec spec = resolve(spec0, data.dim());
  const Matrix gram = kernel_matrix(spec, data.x);
  const KernelScatter ks = kda_scatter(gram, data.y);
  const Matrix q = detail::gram_range(gram);

  FitReport rep;
  const Eigen::Index cap = std::min<Eigen::Index>(r - 1, q.rows());
  if (d_out > cap) {
    rep.warnings.push_back("output dimension " + std::to_string(d_out) + " capped to " + std::to_string(cap));
    d_out = cap;
  }
  check_d_out(d_out, q.rows());
  const Matrix ur = symmetrize(q * ks.u * q.transpose());
  const Matrix vr = detail::gram_regularize(q * ks.v * q.transpose());
  const SimultaneousDiag sd = simultaneous_diagonalize(ur, vr);
  const Matrix a = sd.p.transpose().topRows(d_out) * q;
  rep.converged = true;
  rep.values.assign(sd.values.data(), sd.values.data() + d_out);
  for (double v : rep.values) rep.final_objective += v;
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {{a, data.x, spec}, rep};
}

inline KernelFitResult fit_kanmm(const Dataset& data, Eigen::Index d_out, const NeighborhoodSpec& nb,
                                 const KernelSpec& spec0) {
  Stopwatch clock;
  detail::check_kernel_data(data, "fit_kanmm");
  const KernelSpec spec = resolve(spec0, data.dim());
  const Matrix gram = kernel_matrix(spec, data.x);
  check_d_out(d_out, data.size());
  const MarginScatter ms = margin_scatter(gram, feature_dist_matrix(spec, data.x, gram), data.y, nb);
  const TraceSolution t = trace_max(symmetrize(ms.s - ms.c), d_out);
  FitReport rep;
  rep.converged = true;
  rep.values.assign(t.values.data(), t.values.data() + t.values.size());
  rep.final_objective = t.values.sum();
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {{t.l, data.x, spec}, rep};
}

inline KernelFitResult fit_kdmlmj(const Dataset& data, Eigen::Index d_out, const NeighborhoodSpec& nb,
                                  const KernelSpec& spec0) {
  Stopwatch clock;
  detail::check_kernel_data(data, "fit_kdmlmj");
  require(class_labels(data.y).size() >= 2, ErrorKind::SingleClass, "fit_kdmlmj: need at least two classes");
  const KernelSpec spec = resolve(spec0, data.dim());
  const Matrix gram = kernel_matrix(spec, data.x);
  const PairCovariances pc = neighborhood_covariances(gram, feature_dist_matrix(spec, data.x, gram), data.y, nb.k);
  const Matrix q = detail::gram_range(gram);
  check_d_out(d_out, q.rows());
  const Matrix ur = detail::gram_regularize(q * pc.sigma_s * q.transpose());
  const Matrix vr = detail::gram_regularize(q * pc.sigma_d * q.transpose());
  require(min_eigenvalue(ur) > 0, ErrorKind::SingularU, "fit_kdmlmj: U is singular");
  require(min_eigenvalue(vr) > 0, ErrorKind::SingularU, "fit_kdmlmj: V is singular");
  const TraceSolution t = select_symmetric_ratio(simultaneous_diagonalize(vr, ur, ErrorKind::SingularU), d_out);
  FitReport rep;
  rep.converged = true;
  rep.values.assign(t.values.data(), t.values.data() + t.values.size());
  for (double v : rep.values) rep.final_objective += v + 1.0 / v;
  rep.objective_trace = {rep.final_objective};
  rep.elapsed = clock.seconds();
  return {{t.l * q, data.x, spec}, rep};
}

// Large-margin loss over Gram columns with neighborhoods from feature distances.
struct KlmnnProblem {
  const Matrix& gram;
  LmnnLoss loss;
  double value(const Matrix& a) const { return loss.value(pairwise_sq_dists(gram * a.transpose())); }
  Matrix gradient(const Matrix& a) const {
    return 2.0 * a * weighted_outer_sum(gram, loss.weights(pairwise_sq_dists(gram * a.transpose())));
  }
};

inline NeighborLists klmnn_targets(const KernelSpec& spec, const Matrix& x, const Matrix& gram,
                                   const std::vector<int>& y, std::size_t k) {
  require(k >= 1, ErrorKind::BadArgument, "klmnn: k must be at least 1");
  require(min_class_size(y) > k, ErrorKind::ClassTooSmall,
          "klmnn: every class needs more than k = " + std::to_string(k) + " samples");
  return same_class_neighbors(feature_dist_matrix(spec, x, gram), y, k);
}

inline KernelFitResult fit_klmnn(const Dataset& data, Eigen::Index d_out, const LmnnConfig& cfg,
                                 const KernelSpec& spec0, const OptimConfig& opt = lmnn_defaults()) {
  detail::check_kernel_data(data, "fit_klmnn");
  require(cfg.mu > 0 && cfg.mu < 1, ErrorKind::BadArgument, "fit_klmnn: mu must be in (0, 1)");
  const KernelSpec spec = resolve(spec0, data.dim());
  const Matrix gram = kernel_matrix(spec, data.x);
  if (d_out <= 0) d_out = data.size();
  check_d_out(d_out, data.size());
  const NeighborLists targets = klmnn_targets(spec, data.x, gram, data.y, cfg.k);
  KlmnnProblem prob{gram, {data.y, targets, cfg.mu}};
  auto res = descend([&](const Matrix& a) { return prob.value(a); }, [&](const Matrix& a) { return prob.gradient(a); },
                     identity_rows(d_out, data.size()), opt, [](Matrix a) { return a; });
  return {{res.state, data.x, spec}, res.report};
}

// "kernel <spec>" then "a <rows> <cols>" and "train <rows> <cols>" blocks.
inline void save_kernel_model(std::ostream& os, const KernelModel& m) {
  os << "kernel " << to_string(m.spec) << '\n';
  os << "a " << m.a.rows() << ' ' << m.a.cols() << '\n';
  write_matrix_rows(os, m.a);
  os << "train " << m.train_x.rows() << ' ' << m.train_x.cols() << '\n';
  write_matrix_rows(os, m.train_x);
}

inline KernelModel load_kernel_model(std::istream& is) {
  std::string tag, spec;
  if (!(is >> tag >> spec) || tag != "kernel") throw Error(ErrorKind::ParseError, "kernel model header missing");
  KernelModel m;
  m.spec = parse_kernel(spec);
  Eigen::Index r = 0, c = 0;
  if (!(is >> tag >> r >> c) || tag != "a") throw Error(ErrorKind::ParseError, "coefficient block missing");
  m.a = read_matrix_rows(is, r, c);
  if (!(is >> tag >> r >> c) || tag != "train") throw Error(ErrorKind::ParseError, "training block missing");
  m.train_x = read_matrix_rows(is, r, c);
  require(m.a.cols() == m.train_x.rows(), ErrorKind::ParseError, "coefficient and training sizes disagree");
  m.spec = resolve(m.spec, m.train_x.cols());
  return m;
}

}  // namespace metriko
