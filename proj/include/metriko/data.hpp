#pragma once

#include "metriko/core.hpp"
#include "metriko/dataset.hpp"
#include "metriko/random.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace metriko {

struct CsvOptions {
  std::optional<std::string> label_name;    // requires a header row
  std::optional<std::size_t> label_index;   // zero based; default is the last column
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline bool is_missing(std::string_view s) { return s.empty() || s == "?"; }

}  // namespace detail

inline Dataset parse_csv(std::istream& in, const CsvOptions& opt = {}, const std::string& name = "") {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_no;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '@') continue;
    rows.push_back(detail::split_csv_line(t));
    line_no.push_back(n);
  }
  require(!rows.empty(), ErrorKind::ParseError, "no data rows in '" + name + "'");

  const std::size_t ncols = rows.front().size();
  require(ncols >= 2, ErrorKind::ParseError, "need at least one feature column and a label column");

  std::size_t label_col = ncols - 1;
  if (opt.label_index) {
    require(*opt.label_index < ncols, ErrorKind::BadArgument, "label column index out of range");
    label_col = *opt.label_index;
  }

  bool header = false;
  if (opt.label_name) {
    header = true;
    const auto it = std::find(rows.front().begin(), rows.front().end(), *opt.label_name);
    require(it != rows.front().end(), ErrorKind::BadArgument, "label column '" + *opt.label_name + "' not found");
    label_col = static_cast<std::size_t>(it - rows.front().begin());
  } else {
    for (std::size_t c = 0; c < ncols; ++c)
      if (c != label_col && !detail::is_missing(rows.front()[c]) && !detail::parse_real(rows.front()[c])) header = true;
  }

  Dataset d;
  d.name = name;
  if (header) {
    for (std::size_t c = 0; c < ncols; ++c)
      if (c != label_col) d.feature_names.push_back(rows.front()[c]);
  } else {
    for (std::size_t c = 0; c + 1 < ncols; ++c) d.feature_names.push_back("x" + std::to_string(c));
  }

  const std::size_t first = header ? 1 : 0;
  const auto nrows = static_cast<Eigen::Index>(rows.size() - first);
  require(nrows >= 1, ErrorKind::ParseError, "header present but no data rows");
  d.x.resize(nrows, static_cast<Eigen::Index>(ncols - 1));
  std::unordered_map<std::string, int> label_ids;

  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    const std::size_t ln = line_no[r];
    require(cells.size() == ncols, ErrorKind::ParseError,
            "row " + std::to_string(ln) + ": expected " + std::to_string(ncols) + " columns, got " +
                std::to_string(cells.size()));
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::string& cell = cells[c];
      if (detail::is_missing(cell))
        throw Error(ErrorKind::MissingValue, "row " + std::to_string(ln) + ", column " + std::to_string(c + 1));
      if (c == label_col) {
        const auto [it, fresh] = label_ids.try_emplace(cell, static_cast<int>(label_ids.size()));
        if (fresh) d.class_names.push_back(cell);
        d.y.push_back(it->second);
        continue;
      }
      const auto v = detail::parse_real(cell);
      if (!v) throw Error(ErrorKind::ParseError, "row " + std::to_string(ln) + ", column " + std::to_string(c + 1) +
                                                     ": '" + cell + "' is not a number");
      d.x(static_cast<Eigen::Index>(r - first), j++) = *v;
    }
  }
  return d;
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opt = {}) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open '" + path + "'");
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parse_csv(in, opt, name);
}

// Per-feature [0,1] scaling fitted on one matrix.
struct Scaler {
  Vector min;
  Vector range;  // 0 for constant features
  std::size_t fitted_rows = 0;
  std::string source;  // which set the statistics came from

  Matrix apply(const Matrix& x) const {
    require(x.cols() == min.size(), ErrorKind::DimensionMismatch, "Scaler::apply: column count differs");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (range[j] > 0)
        out.col(j) = (x.col(j).array() - min[j]) / range[j];
      else
        out.col(j).setZero();
    }
    return out;
  }

  Matrix inverse(const Matrix& z) const {
    require(z.cols() == min.size(), ErrorKind::DimensionMismatch, "Scaler::inverse: column count differs");
    Matrix out(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) out.col(j) = z.col(j).array() * range[j] + min[j];
    return out;
  }
};

inline Scaler fit_scaler(const Matrix& x, const std::string& source = "train") {
  require(x.rows() >= 1, ErrorKind::BadArgument, "fit_scaler: empty matrix");
  Scaler s;
  s.min = x.colwise().minCoeff().transpose();
  s.range = x.colwise().maxCoeff().transpose() - s.min;
  s.fitted_rows = static_cast<std::size_t>(x.rows());
  s.source = source;
  return s;
}

struct NormalizedSets {
  Dataset train;
  std::vector<Dataset> others;
  Scaler scaler;
};

inline NormalizedSets minmax_normalize(const Dataset& train, const std::vector<Dataset>& others = {}) {
  NormalizedSets out;
  out.scaler = fit_scaler(train.x, "train");
  out.train = train;
  out.train.x = out.scaler.apply(train.x);
  for (const auto& o : others) {
    Dataset t = o;
    t.x = out.scaler.apply(o.x);
    out.others.push_back(std::move(t));
  }
  return out;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline std::vector<Split> stratified_kfold(const std::vector<int>& y, std::size_t folds, std::uint64_t seed,
                                           std::vector<std::string>* warnings = nullptr) {
  require(folds >= 2, ErrorKind::BadFoldCount, "folds must be at least 2, got " + std::to_string(folds));
  require(y.size() >= 2, ErrorKind::BadFoldCount, "need at least two samples");
  const std::size_t smallest = min_class_size(y);
  if (folds > smallest) {
    const std::size_t capped = std::max<std::size_t>(2, smallest);
    if (warnings)
      warnings->push_back("folds " + std::to_string(folds) + " exceed the smallest class (" + std::to_string(smallest) +
                          "); capped to " + std::to_string(capped));
    folds = capped;
  }
  require(folds <= y.size(), ErrorKind::BadFoldCount, "more folds than samples");

  Rng rng(seed);
  std::vector<std::size_t> fold_of(y.size());
  std::size_t offset = 0;
  for (const auto& [c, members] : class_members(y)) {
    std::vector<std::size_t> idx(members.begin(), members.end());
    shuffle(idx, rng);
    for (std::size_t j = 0; j < idx.size(); ++j) fold_of[idx[j]] = (offset + j) % folds;
    offset = (offset + idx.size()) % folds;
  }
  std::vector<Split> out(folds);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t f = 0; f < folds; ++f) (fold_of[i] == f ? out[f].test : out[f].train).push_back(i);
  return out;
}

inline std::vector<Split> stratified_kfold(const Dataset& d, std::size_t folds, std::uint64_t seed,
                                           std::vector<std::string>* warnings = nullptr) {
  return stratified_kfold(d.y, folds, seed, warnings);
}

inline std::vector<std::size_t> stratified_subsample_indices(const std::vector<int>& y, double fraction,
                                                             std::uint64_t seed) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorKind::BadArgument, "fraction must be in (0, 1]");
  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (const auto& [c, members] : class_members(y)) {
    std::vector<std::size_t> idx(members.begin(), members.end());
    shuffle(idx, rng);
    auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    take = std::clamp<std::size_t>(take, 1, idx.size());
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

inline Dataset stratified_subsample(const Dataset& d, double fraction, std::uint64_t seed) {
  return subset(d, stratified_subsample_indices(d.y, fraction, seed));
}

}  // namespace metriko
