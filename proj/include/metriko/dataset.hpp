#pragma once

#include "metriko/core.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace metriko {

struct Dataset {
  Matrix x;
  std::vector<int> y;  // empty for unlabeled data
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::string name;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

inline Dataset make_dataset(Matrix x, std::vector<int> y) {
  Dataset d;
  d.x = std::move(x);
  d.y = std::move(y);
  return d;
}

// Sorted distinct labels.
inline std::vector<int> class_labels(const std::vector<int>& y) {
  std::vector<int> c(y);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

inline std::map<int, std::vector<Eigen::Index>> class_members(const std::vector<int>& y) {
  std::map<int, std::vector<Eigen::Index>> m;
  for (std::size_t i = 0; i < y.size(); ++i) m[y[i]].push_back(static_cast<Eigen::Index>(i));
  return m;
}

inline std::size_t min_class_size(const std::vector<int>& y) {
  std::size_t lo = y.size();
  for (const auto& [c, idx] : class_members(y)) lo = std::min(lo, idx.size());
  return lo;
}

inline void require_labeled(const Dataset& d, const char* who) {
  require(d.size() >= 1, ErrorKind::BadArgument, std::string(who) + ": empty dataset");
  require(static_cast<Eigen::Index>(d.y.size()) == d.size(), ErrorKind::DimensionMismatch,
          std::string(who) + ": label count differs from sample count");
  require(d.x.allFinite(), ErrorKind::BadArgument, std::string(who) + ": non-finite feature values");
}

inline Dataset subset(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset s;
  s.x.resize(static_cast<Eigen::Index>(idx.size()), d.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) s.x.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(idx[i]));
  if (!d.y.empty()) {
    s.y.reserve(idx.size());
    for (auto i : idx) s.y.push_back(d.y[i]);
  }
  s.feature_names = d.feature_names;
  s.class_names = d.class_names;
  s.name = d.name;
  return s;
}

}  // namespace metriko
