#pragma once

#include "metriko/core.hpp"
#include "metriko/linalg.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace metriko {

enum class MetricForm { PsdMatrix, LinearMap };

// Mahalanobis metric held either as M (d x d, PSD) or as L (d' x d).
// An optional offset is subtracted before the map is applied (PCA centering);
// it never affects distances.
class Metric {
 public:
  static Metric psd(const Matrix& m) {
    require_square(m, "Metric::psd");
    const Matrix s = symmetrize(m);
    const double asym = (m - m.transpose()).norm();
    require(asym <= 1e-8 * std::max(1.0, m.norm()), ErrorKind::NotSymmetric, "Metric::psd: matrix not symmetric");
    const double lo = s.rows() ? min_eigenvalue(s) : 0.0;
    require(lo >= -psd_tolerance(s), ErrorKind::NotPSD, "Metric::psd: min eigenvalue " + std::to_string(lo));
    return Metric(MetricForm::PsdMatrix, s);
  }

  static Metric linear(const Matrix& l) {
    require(l.rows() >= 1 && l.rows() <= l.cols(), ErrorKind::BadDimension,
            "Metric::linear: output dimension must be in [1, input dimension]");
    require(l.allFinite(), ErrorKind::BadArgument, "Metric::linear: non-finite entries");
    return Metric(MetricForm::LinearMap, l);
  }

  static Metric identity(Eigen::Index d) { return psd(Matrix::Identity(d, d)); }

  MetricForm form() const { return form_; }
  const Matrix& matrix() const { return data_; }
  Eigen::Index input_dim() const { return data_.cols(); }
  Eigen::Index output_dim() const { return data_.rows(); }

  const std::optional<Vector>& offset() const { return offset_; }
  Metric with_offset(const Vector& offset) const {
    require(offset.size() == input_dim(), ErrorKind::DimensionMismatch, "Metric::with_offset: size mismatch");
    Metric m = *this;
    m.offset_ = offset;
    return m;
  }

  // M = L^T L for either form.
  Matrix to_psd_matrix() const {
    if (form_ == MetricForm::PsdMatrix) return data_;
    return data_.transpose() * data_;
  }

  double distance_sq(const Vector& x, const Vector& y) const {
    require(x.size() == input_dim() && y.size() == input_dim(), ErrorKind::DimensionMismatch,
            "distance_sq: vector length differs from metric input dimension");
    const Vector diff = x - y;
    if (form_ == MetricForm::PsdMatrix) return std::max(0.0, diff.dot(data_ * diff));
    return (data_ * diff).squaredNorm();
  }

  // L = Lambda^1/2 V keeping all d rows.
  Metric to_linear() const {
    if (form_ == MetricForm::LinearMap) return *this;
    const SymEigen e = sym_eigen(data_);
    Matrix l = e.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * e.vectors;
    Metric out(MetricForm::LinearMap, l);
    out.offset_ = offset_;
    return out;
  }

  // Like to_linear but drops null directions (eigenvalues <= 1e-10 * max).
  Metric to_linear_reduced() const {
    const Matrix m = to_psd_matrix();
    const SymEigen e = sym_eigen(m);
    const double top = std::max(0.0, e.values.size() ? e.values[0] : 0.0);
    Eigen::Index r = 0;
    while (r < e.values.size() && e.values[r] > 1e-10 * top && e.values[r] > 0.0) ++r;
    if (r == 0) r = 1;
    Matrix l = e.values.head(r).cwiseMax(0.0).cwiseSqrt().asDiagonal() * e.vectors.topRows(r);
    Metric out(MetricForm::LinearMap, l);
    out.offset_ = offset_;
    return out;
  }

  // Row i of the result is L (x_i - offset).
  Matrix transform(const Matrix& x) const {
    require(x.cols() == input_dim(), ErrorKind::DimensionMismatch,
            "transform: data has " + std::to_string(x.cols()) + " columns, metric expects " +
                std::to_string(input_dim()));
    const Metric lin = to_linear();
    if (offset_) {
      Matrix centered = x.rowwise() - offset_->transpose();
      return centered * lin.data_.transpose();
    }
    return x * lin.data_.transpose();
  }

  Vector transform(const Vector& x) const {
    Matrix row = x.transpose();
    return transform(row).row(0).transpose();
  }

  static double psd_tolerance(const Matrix& m) { return 1e-8 * std::max(1.0, m.norm()); }

 private:
  Metric(MetricForm f, Matrix m) : form_(f), data_(std::move(m)) {}

  MetricForm form_;
  Matrix data_;
  std::optional<Vector> offset_;
};

// Flat text: "<form> <rows> <cols>" then one matrix row per line, then
// optionally "offset <n>" followed by one line of values.
inline void write_matrix_rows(std::ostream& os, const Matrix& m) {
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
}

inline Matrix read_matrix_rows(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(is >> m(i, j))) throw Error(ErrorKind::ParseError, "truncated matrix data");
  return m;
}

inline void save_metric(std::ostream& os, const Metric& m) {
  const Matrix& a = m.matrix();
  os << (m.form() == MetricForm::PsdMatrix ? "psd" : "linear") << ' ' << a.rows() << ' ' << a.cols() << '\n';
  write_matrix_rows(os, a);
  if (m.offset()) {
    os << "offset " << m.offset()->size() << '\n';
    write_matrix_rows(os, m.offset()->transpose());
  }
}

inline Metric load_metric(std::istream& is) {
  std::string form;
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> form >> rows >> cols)) throw Error(ErrorKind::ParseError, "metric header missing");
  require(rows > 0 && cols > 0, ErrorKind::ParseError, "metric header has empty dimensions");
  const Matrix a = read_matrix_rows(is, rows, cols);
  Metric m = form == "psd"      ? Metric::psd(a)
             : form == "linear" ? Metric::linear(a)
                                : throw Error(ErrorKind::ParseError, "unknown metric form '" + form + "'");
  std::string tag;
  if (is >> tag) {
    Eigen::Index n = 0;
    require(tag == "offset" && (is >> n) && n == cols, ErrorKind::ParseError, "bad offset block");
    const Matrix off = read_matrix_rows(is, 1, n);
    m = m.with_offset(off.row(0).transpose());
  }
  return m;
}

inline std::string to_text(const Metric& m) {
  std::ostringstream os;
  save_metric(os, m);
  return os.str();
}

}  // namespace metriko
