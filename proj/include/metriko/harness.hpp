#pragma once

#include "metriko/classify.hpp"
#include "metriko/data.hpp"
#include "metriko/learners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace metriko {

enum class ClassifierKind { Knn, Ncm, Ncmc };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Knn;
  std::size_t k = 3;  // neighbors for Knn, centroids per class for Ncmc
};

// "knn:3", "3nn", "ncm", "ncmc:2"
inline ClassifierSpec parse_classifier(const std::string& s) {
  auto count = [&](const std::string& t) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(t, &used);
    } catch (...) {
      used = 0;
    }
    require(used == t.size() && v >= 1, ErrorKind::BadArgument, "bad classifier '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  if (s == "ncm") return {ClassifierKind::Ncm, 1};
  if (s.rfind("knn:", 0) == 0) return {ClassifierKind::Knn, count(s.substr(4))};
  if (s.rfind("ncmc:", 0) == 0) return {ClassifierKind::Ncmc, count(s.substr(5))};
  if (s.size() > 2 && s.substr(s.size() - 2) == "nn") return {ClassifierKind::Knn, count(s.substr(0, s.size() - 2))};
  throw Error(ErrorKind::BadArgument, "unknown classifier '" + s + "'");
}

inline std::string to_string(const ClassifierSpec& c) {
  switch (c.kind) {
    case ClassifierKind::Knn: return "knn:" + std::to_string(c.k);
    case ClassifierKind::Ncm: return "ncm";
    case ClassifierKind::Ncmc: return "ncmc:" + std::to_string(c.k);
  }
  return {};
}

// One table column: a learner with its options and the classifier scoring it.
struct AlgorithmSpec {
  std::string label;
  std::string algo;
  LearnerOptions options;
  ClassifierSpec classifier;
  bool skip = false;  // recorded as an absent cell
};

struct Scores {
  double train = 0.0;
  double test = 0.0;
};

// Fits on train, scores train (self included) and test.
inline Scores evaluate_split(const Model& model, const ClassifierSpec& clf, const Dataset& train, const Dataset& test,
                             std::uint64_t seed) {
  const Matrix zt = model.transform(train.x);
  const Matrix zs = model.transform(test.x);
  std::vector<int> ptrain, ptest;
  if (clf.kind == ClassifierKind::Knn) {
    ptrain = knn_predict_batch(zt, train.y, clf.k, zt);
    ptest = knn_predict_batch(zt, train.y, clf.k, zs);
  } else {
    CentroidSet c;
    if (clf.kind == ClassifierKind::Ncm) {
      c = class_means(zt, train.y);
    } else if (model.centroids && model.centroids->labels.size() / class_labels(train.y).size() == clf.k) {
      c = {model.transform(model.centroids->centroids), model.centroids->labels};
    } else {
      c = class_kmeans(zt, train.y, clf.k, seed);
    }
    ptrain = nearest_centroid_batch(c, zt);
    ptest = nearest_centroid_batch(c, zs);
  }
  return {accuracy(train.y, ptrain), accuracy(test.y, ptest)};
}

struct FoldOutcome {
  std::optional<Scores> scores;
  std::string error;
  FitReport report;
};

struct Cell {
  std::optional<Scores> mean;  // absent when any fold failed or the cell was skipped
  std::string error;
  std::vector<FitReport> reports;
};

struct ResultTable {
  std::string title;
  std::string row_header = "dataset";
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> cells;  // rows x columns
};

struct RunOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool normalize_global = false;  // min-max on the whole dataset instead of per training fold
  std::size_t jobs = 1;
  std::vector<std::string>* warnings = nullptr;
};

namespace detail {

inline FoldOutcome run_fold(const Dataset& data, const Split& split, const AlgorithmSpec& spec, std::uint64_t seed,
                            bool normalized) {
  FoldOutcome out;
  try {
    Dataset train = subset(data, split.train);
    Dataset test = subset(data, split.test);
    if (!normalized) {
      const NormalizedSets ns = minmax_normalize(train, {test});
      train = ns.train;
      test = ns.others[0];
    }
    const Model model = fit_model(spec.algo, train, spec.options);
    out.report = model.report;
    out.scores = evaluate_split(model, spec.classifier, train, test, seed);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// Runs f(0..n-1) on up to `jobs` threads.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Cross-validated train/test scores of every algorithm on every dataset.
// Failures become absent cells; the table is always complete.
inline ResultTable run_experiment(const std::vector<Dataset>& datasets, const std::vector<AlgorithmSpec>& algorithms,
                                  const RunOptions& opt = {}) {
  require(opt.folds >= 2, ErrorKind::BadFoldCount, "folds must be at least 2");
  ResultTable table;
  for (const auto& d : datasets) table.rows.push_back(d.name);
  for (const auto& a : algorithms) table.columns.push_back(a.label);

  std::vector<Dataset> prepared;
  std::vector<std::vector<Split>> splits;
  for (const auto& d : datasets) {
    std::vector<std::string> w;
    splits.push_back(stratified_kfold(d, opt.folds, opt.seed, &w));
    if (opt.warnings)
      for (auto& s : w) opt.warnings->push_back(d.name + ": " + s);
    prepared.push_back(opt.normalize_global ? minmax_normalize(d).train : d);
  }

  struct Task {
    std::size_t d, a, f;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t a = 0; a < algorithms.size(); ++a)
      if (!algorithms[a].skip)
        for (std::size_t f = 0; f < splits[d].size(); ++f) tasks.push_back({d, a, f});

  std::vector<FoldOutcome> outcomes(tasks.size());
  detail::parallel_for(tasks.size(), opt.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    outcomes[i] = detail::run_fold(prepared[t.d], splits[t.d][t.f], algorithms[t.a], opt.seed, opt.normalize_global);
  });

  table.cells.assign(datasets.size(), std::vector<Cell>(algorithms.size()));
  for (std::size_t a = 0; a < algorithms.size(); ++a)
    if (algorithms[a].skip)
      for (auto& row : table.cells) row[a].error = "not applicable";
  std::vector<std::vector<std::vector<const FoldOutcome*>>> grouped(
      datasets.size(), std::vector<std::vector<const FoldOutcome*>>(algorithms.size()));
  for (std::size_t i = 0; i < tasks.size(); ++i) grouped[tasks[i].d][tasks[i].a].push_back(&outcomes[i]);
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      if (algorithms[a].skip) continue;
      Cell& c = table.cells[d][a];
      Scores sum;
      bool ok = true;
      for (const FoldOutcome* o : grouped[d][a]) {
        c.reports.push_back(o->report);
        if (!o->scores) {
          ok = false;
          if (c.error.empty()) c.error = o->error;
          continue;
        }
        sum.train += o->scores->train;
        sum.test += o->scores->test;
      }
      if (ok) {
        const double n = static_cast<double>(grouped[d][a].size());
        c.mean = Scores{sum.train / n, sum.test / n};
      } else if (opt.warnings) {
        opt.warnings->push_back(datasets[d].name + " / " + algorithms[a].label + ": " + c.error);
      }
    }
  return table;
}

// Ranks within one row: 1 is best, ties share the mean of their positions,
// missing scores (NaN) rank below every present score.
inline std::vector<double> rank_row(const std::vector<double>& scores) {
  const std::size_t m = scores.size();
  auto key = [&](std::size_t i) {
    return std::isnan(scores[i]) ? -std::numeric_limits<double>::infinity() : scores[i];
  };
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  std::vector<double> rank(m);
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j + 1 < m && key(order[j + 1]) == key(order[i])) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = r;
    i = j + 1;
  }
  return rank;
}

// Mean rank per column over the rows of a datasets x algorithms score matrix.
inline std::vector<double> average_ranking(const std::vector<std::vector<double>>& scores) {
  require(!scores.empty(), ErrorKind::BadArgument, "average_ranking: no rows");
  std::vector<double> avg(scores[0].size(), 0.0);
  for (const auto& row : scores) {
    require(row.size() == avg.size(), ErrorKind::DimensionMismatch, "average_ranking: ragged rows");
    const auto r = rank_row(row);
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += r[j];
  }
  for (double& v : avg) v /= static_cast<double>(scores.size());
  return avg;
}

inline std::vector<std::vector<double>> score_matrix(const ResultTable& t, bool test) {
  std::vector<std::vector<double>> s(t.rows.size(), std::vector<double>(t.columns.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      const auto& m = t.cells[i][j].mean;
      s[i][j] = m ? (test ? m->test : m->train) : std::numeric_limits<double>::quiet_NaN();
    }
  return s;
}

// Column mean over present cells; NaN when the column is empty.
inline std::vector<double> average_scores(const std::vector<std::vector<double>>& s) {
  if (s.empty()) return {};
  std::vector<double> out(s[0].size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : s)
      if (!std::isnan(row[j])) {
        sum += row[j];
        ++n;
      }
    out[j] = n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

inline std::string format_score(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Train and test column per algorithm. Summary rows only when ranking makes sense.
inline void write_csv(std::ostream& os, const ResultTable& t, bool summary = true) {
  os << t.row_header;
  for (const auto& c : t.columns) os << ',' << c << " train," << c << " test";
  os << '\n';
  const auto tr = score_matrix(t, false), te = score_matrix(t, true);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    os << t.rows[i];
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << ',' << format_score(tr[i][j]) << ',' << format_score(te[i][j]);
    os << '\n';
  }
  if (!summary || t.rows.empty()) return;
  const auto as_tr = average_scores(tr), as_te = average_scores(te);
  const auto ar_tr = average_ranking(tr), ar_te = average_ranking(te);
  os << "AVG SCORE";
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << ',' << format_score(as_tr[j]) << ',' << format_score(as_te[j]);
  os << "\nAVG RANK";
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << ',' << format_score(ar_tr[j]) << ',' << format_score(ar_te[j]);
  os << '\n';
}

inline void write_pretty(std::ostream& os, const ResultTable& t, bool summary = true) {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head{t.row_header};
  for (const auto& c : t.columns) head.push_back(c + " (train - test)");
  grid.push_back(head);
  auto pair = [](double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return std::string("-");
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f - %.4f", a, b);
    return std::string(buf);
  };
  const auto tr = score_matrix(t, false), te = score_matrix(t, true);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::vector<std::string> line{t.rows[i]};
    for (std::size_t j = 0; j < t.columns.size(); ++j) line.push_back(pair(tr[i][j], te[i][j]));
    grid.push_back(line);
  }
  if (summary && !t.rows.empty()) {
    const auto as_tr = average_scores(tr), as_te = average_scores(te);
    const auto ar_tr = average_ranking(tr), ar_te = average_ranking(te);
    std::vector<std::string> s{"AVG SCORE"}, r{"AVG RANK"};
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      s.push_back(pair(as_tr[j], as_te[j]));
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.2f - %.2f", ar_tr[j], ar_te[j]);
      r.push_back(buf);
    }
    grid.push_back(s);
    grid.push_back(r);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : grid)
    for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], line[j].size());
  if (!t.title.empty()) os << t.title << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid[i].size(); ++j)
      os << (j ? "  " : "") << grid[i][j] << std::string(width[j] - grid[i][j].size(), ' ');
    os << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      os << std::string(total - 2, '-') << '\n';
    }
  }
}

}  // namespace metriko
