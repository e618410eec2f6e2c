#pragma once

// The four benchmark campaigns: basic (maximum dimension, k-NN), ncm
// (centroid classifiers), kernel, and dim (dimensionality sweep).

#include "metriko/harness.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace metriko {

struct BenchConfig {
  std::string experiment = "basic";
  std::vector<Dataset> datasets;
  std::vector<std::size_t> knn{3, 5, 7};
  std::vector<std::size_t> centroids{2, 3};
  std::vector<std::string> kernels{"linear", "poly-2", "poly-3", "rbf", "laplacian"};
  std::vector<std::string> dims{"1", "2", "3", "5", "10", "20", "30", "40", "50", "max", "r-1"};
  RunOptions run;
};

struct BenchOutput {
  std::string name;  // file stem
  ResultTable table;
  bool summary = true;
};

inline const std::vector<std::string>& bench_experiments() {
  static const std::vector<std::string> names{"basic", "ncm", "kernel", "dim"};
  return names;
}

inline std::string display_name(const std::string& algo) {
  if (algo == "euclidean") return "Euclidean";
  if (algo == "dml-eig") return "DML-eig";
  std::string s = algo;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

inline std::vector<AlgorithmSpec> basic_algorithms(std::size_t k, std::uint64_t seed) {
  std::vector<AlgorithmSpec> out;
  for (const char* a : {"euclidean", "lda", "itml", "dmlmj", "nca", "lmnn", "lsi", "dml-eig", "mcml", "ldml"}) {
    AlgorithmSpec s{display_name(a), a, {}, {ClassifierKind::Knn, k}};
    s.options.k = k;
    s.options.seed = seed;
    out.push_back(s);
  }
  return out;
}

inline std::vector<AlgorithmSpec> ncm_algorithms(const std::vector<std::size_t>& centroids, std::uint64_t seed) {
  std::vector<AlgorithmSpec> out;
  LearnerOptions o;
  o.seed = seed;
  out.push_back({"Euclidean + NCM", "euclidean", o, {ClassifierKind::Ncm, 1}});
  out.push_back({"NCMML", "ncmml", o, {ClassifierKind::Ncm, 1}});
  for (std::size_t c : centroids) {
    LearnerOptions oc = o;
    oc.centroids = c;
    const std::string tag = " (" + std::to_string(c) + " ctrd)";
    out.push_back({"Euclidean + NCMC" + tag, "euclidean", oc, {ClassifierKind::Ncmc, c}});
    out.push_back({"NCMC" + tag, "ncmc", oc, {ClassifierKind::Ncmc, c}});
  }
  return out;
}

inline std::vector<AlgorithmSpec> kernel_algorithms(const std::vector<std::string>& kernels, std::size_t k,
                                                    std::uint64_t seed) {
  std::vector<AlgorithmSpec> out;
  for (const auto& ks : kernels) {
    const KernelSpec spec = parse_kernel(ks);
    for (const char* a : {"kda", "kanmm", "kdmlmj", "klmnn"}) {
      AlgorithmSpec s{display_name(a) + " [" + ks + "]", a, {}, {ClassifierKind::Knn, k}};
      s.options.k = k;
      s.options.kernel = spec;
      s.options.seed = seed;
      out.push_back(s);
    }
  }
  return out;
}

// Resolves "max" and "r-1", drops dimensions above d, sorts and dedupes.
inline std::vector<Eigen::Index> resolve_dims(const std::vector<std::string>& dims, const Dataset& data) {
  std::set<Eigen::Index> out;
  const auto r = static_cast<Eigen::Index>(class_labels(data.y).size());
  for (const auto& s : dims) {
    Eigen::Index v = 0;
    if (s == "max") {
      v = data.dim();
    } else if (s == "r-1") {
      v = r - 1;
    } else {
      std::size_t used = 0;
      try {
        v = std::stol(s, &used);
      } catch (...) {
        used = 0;
      }
      require(used == s.size() && v >= 1, ErrorKind::BadArgument, "bad dimension '" + s + "'");
    }
    if (v >= 1 && v <= data.dim()) out.insert(v);
  }
  return {out.begin(), out.end()};
}

inline std::vector<AlgorithmSpec> dim_algorithms(Eigen::Index dim, Eigen::Index classes, std::size_t k,
                                                 std::uint64_t seed) {
  std::vector<AlgorithmSpec> out;
  for (const char* a : {"pca", "lda", "anmm", "dmlmj", "lmnn", "nca"}) {
    AlgorithmSpec s{display_name(a), a, {}, {ClassifierKind::Knn, k}};
    s.options.dim = dim;
    s.options.k = k;
    s.options.seed = seed;
    s.options.lmnn_sgd = true;
    s.skip = s.algo == "lda" && dim > classes - 1;
    out.push_back(s);
  }
  return out;
}

// Rows are dimensions, columns the reducers.
inline ResultTable run_dim_table(const Dataset& data, const std::vector<std::string>& dims, std::size_t k,
                                 const RunOptions& run) {
  const auto classes = static_cast<Eigen::Index>(class_labels(data.y).size());
  ResultTable table;
  table.title = data.name + " " + std::to_string(k) + "-NN";
  table.row_header = "dim";
  for (Eigen::Index dim : resolve_dims(dims, data)) {
    const ResultTable row = run_experiment({data}, dim_algorithms(dim, classes, k, run.seed), run);
    if (table.columns.empty()) table.columns = row.columns;
    table.rows.push_back(std::to_string(dim));
    table.cells.push_back(row.cells[0]);
  }
  return table;
}

inline std::vector<BenchOutput> run_bench(const BenchConfig& cfg) {
  require(!cfg.datasets.empty(), ErrorKind::BadArgument, "bench: no datasets");
  require(cfg.run.folds >= 2, ErrorKind::BadFoldCount, "folds must be at least 2");
  std::vector<BenchOutput> out;
  const std::uint64_t seed = cfg.run.seed;
  if (cfg.experiment == "basic") {
    for (std::size_t k : cfg.knn) {
      ResultTable t = run_experiment(cfg.datasets, basic_algorithms(k, seed), cfg.run);
      t.title = "basic " + std::to_string(k) + "-NN";
      out.push_back({"basic_" + std::to_string(k) + "nn", std::move(t), true});
    }
  } else if (cfg.experiment == "ncm") {
    ResultTable t = run_experiment(cfg.datasets, ncm_algorithms(cfg.centroids, seed), cfg.run);
    t.title = "ncm";
    out.push_back({"ncm", std::move(t), true});
  } else if (cfg.experiment == "kernel") {
    for (std::size_t k : cfg.knn) {
      ResultTable t = run_experiment(cfg.datasets, kernel_algorithms(cfg.kernels, k, seed), cfg.run);
      t.title = "kernel " + std::to_string(k) + "-NN";
      out.push_back({"kernel_" + std::to_string(k) + "nn", std::move(t), true});
    }
  } else if (cfg.experiment == "dim") {
    for (const auto& d : cfg.datasets)
      for (std::size_t k : cfg.knn)
        out.push_back({"dim_" + d.name + "_" + std::to_string(k) + "nn", run_dim_table(d, cfg.dims, k, cfg.run), false});
  } else {
    throw Error(ErrorKind::BadArgument, "unknown experiment '" + cfg.experiment + "'");
  }
  return out;
}

}  // namespace metriko
