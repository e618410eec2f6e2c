#pragma once

// Name-driven access to every learner: fit, transform, save, load.

#include "metriko/classify.hpp"
#include "metriko/dml_constrained.hpp"
#include "metriko/dml_eigen.hpp"
#include "metriko/dml_gradient.hpp"
#include "metriko/kernel.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace metriko {

struct LearnerOptions {
  Eigen::Index dim = 0;  // 0: the learner's natural maximum
  std::size_t k = 3;     // neighbors for ANMM, DMLMJ, LMNN and their kernel versions
  std::size_t centroids = 2;
  KernelSpec kernel;
  std::uint64_t seed = 0;
  bool lmnn_sgd = false;  // LMNN learns L with per-sample steps instead of M
};

struct Model {
  std::string algo;
  std::variant<KernelModel, Metric> map;  // KernelModel first: Metric has no default state
  std::optional<CentroidSet> centroids;  // NCMC only, in input coordinates
  FitReport report;

  Eigen::Index input_dim() const {
    if (auto m = std::get_if<Metric>(&map)) return m->input_dim();
    return std::get<KernelModel>(map).train_x.cols();
  }
  Matrix transform(const Matrix& x) const {
    if (auto m = std::get_if<Metric>(&map)) return m->transform(x);
    return kernel_transform(std::get<KernelModel>(map), x);
  }
  bool is_kernel() const { return std::holds_alternative<KernelModel>(map); }
};

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"euclidean", "pca",  "lda",   "anmm", "dmlmj", "lmnn",
                                              "nca",       "ncmml", "ncmc", "itml", "mcml",  "lsi",
                                              "dml-eig",   "ldml", "kda",   "kanmm", "kdmlmj", "klmnn"};
  return names;
}

inline bool is_kernel_algorithm(const std::string& algo) {
  return algo == "kda" || algo == "kanmm" || algo == "kdmlmj" || algo == "klmnn";
}

inline Model fit_model(const std::string& algo, const Dataset& data, const LearnerOptions& opt = {}) {
  const Eigen::Index d = data.dim();
  const Eigen::Index dim = opt.dim > 0 ? opt.dim : d;
  const NeighborhoodSpec nb{opt.k, opt.k, opt.k};
  auto wrap = [&](FitResult r) { return Model{algo, std::move(r.metric), std::nullopt, std::move(r.report)}; };
  auto wrap_kernel = [&](KernelFitResult r) { return Model{algo, std::move(r.model), std::nullopt, std::move(r.report)}; };

  if (algo == "euclidean") {
    FitReport rep;
    rep.converged = true;
    return {algo, Metric::identity(d), std::nullopt, rep};
  }
  if (algo == "pca") return wrap(fit_pca(data, dim));
  if (algo == "lda") {
    const auto cap = static_cast<Eigen::Index>(class_labels(data.y).size()) - 1;
    return wrap(fit_lda(data, opt.dim > 0 ? opt.dim : std::min(cap, d)));
  }
  if (algo == "anmm") return wrap(fit_anmm(data, dim, nb));
  if (algo == "dmlmj") return wrap(fit_dmlmj(data, dim, nb));
  if (algo == "lmnn") {
    LmnnConfig cfg;
    cfg.k = opt.k;
    cfg.seed = opt.seed;
    if (opt.lmnn_sgd || opt.dim > 0) {
      cfg.mode = MetricForm::LinearMap;
      cfg.d_out = dim;
      cfg.sgd = opt.lmnn_sgd;
    }
    return wrap(fit_lmnn(data, cfg));
  }
  if (algo == "nca") return wrap(fit_nca(data, dim));
  if (algo == "ncmml") return wrap(fit_ncmml(data, dim));
  if (algo == "ncmc") {
    NcmcResult r = fit_ncmc(data, dim, opt.centroids, ncm_defaults(), opt.seed);
    return {algo, std::move(r.metric), std::move(r.centroids), std::move(r.report)};
  }
  if (algo == "mcml") return wrap(fit_mcml(data));
  if (algo == "ldml") return wrap(fit_ldml(data));
  if (algo == "itml" || algo == "lsi" || algo == "dml-eig") {
    const PairConstraints pc = supervised_pairs(data.y, d, opt.seed);
    if (algo == "itml") {
      ItmlConfig cfg;
      cfg.seed = opt.seed;
      return wrap(fit_itml(data, pc, cfg));
    }
    if (algo == "lsi") return wrap(fit_lsi(data, pc));
    DmlEigResult r = fit_dml_eig(data, pc);
    return {algo, std::move(r.metric), std::nullopt, std::move(r.report)};
  }
  if (algo == "kda") {
    const auto cap = static_cast<Eigen::Index>(class_labels(data.y).size()) - 1;
    return wrap_kernel(fit_kda(data, opt.dim > 0 ? opt.dim : cap, opt.kernel));
  }
  if (algo == "kanmm") return wrap_kernel(fit_kanmm(data, dim, nb, opt.kernel));
  if (algo == "kdmlmj") return wrap_kernel(fit_kdmlmj(data, dim, nb, opt.kernel));
  if (algo == "klmnn") {
    LmnnConfig cfg;
    cfg.k = opt.k;
    return wrap_kernel(fit_klmnn(data, dim, cfg, opt.kernel));
  }
  throw Error(ErrorKind::BadArgument, "unknown algorithm '" + algo + "'");
}

// Layout: "model <algo>", optional "centroids <n> <d>" block (labels line,
// then rows), then the metric or kernel block.
inline void save_model(std::ostream& os, const Model& m) {
  os << "model " << m.algo << '\n';
  if (m.centroids) {
    const CentroidSet& c = *m.centroids;
    os << "centroids " << c.centroids.rows() << ' ' << c.centroids.cols() << '\n';
    for (std::size_t i = 0; i < c.labels.size(); ++i) os << (i ? " " : "") << c.labels[i];
    os << '\n';
    write_matrix_rows(os, c.centroids);
  }
  if (auto metric = std::get_if<Metric>(&m.map))
    save_metric(os, *metric);
  else
    save_kernel_model(os, std::get<KernelModel>(m.map));
}

inline Model load_model(std::istream& is) {
  Model m;
  std::string tag;
  if (!(is >> tag >> m.algo) || tag != "model") throw Error(ErrorKind::ParseError, "model header missing");
  auto pos = is.tellg();
  if (!(is >> tag)) throw Error(ErrorKind::ParseError, "model body missing");
  if (tag == "centroids") {
    Eigen::Index n = 0, d = 0;
    if (!(is >> n >> d) || n <= 0 || d <= 0) throw Error(ErrorKind::ParseError, "bad centroid header");
    CentroidSet c;
    c.labels.resize(static_cast<std::size_t>(n));
    for (auto& l : c.labels)
      if (!(is >> l)) throw Error(ErrorKind::ParseError, "bad centroid labels");
    c.centroids = read_matrix_rows(is, n, d);
    m.centroids = std::move(c);
    pos = is.tellg();
    if (!(is >> tag)) throw Error(ErrorKind::ParseError, "model body missing");
  }
  is.seekg(pos);
  if (tag == "kernel")
    m.map = load_kernel_model(is);
  else
    m.map = load_metric(is);
  return m;
}

}  // namespace metriko
