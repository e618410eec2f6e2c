#pragma once

#include "metriko/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace metriko {

// Eigenvalues descending; row i of `vectors` is the unit eigenvector of values[i].
struct SymEigen {
  Vector values;
  Matrix vectors;
};

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

inline void require_square(const Matrix& a, const char* who) {
  require(a.rows() == a.cols(), ErrorKind::NotSquare,
          std::string(who) + ": expected a square matrix, got " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()));
}

namespace detail {

// Cyclic Jacobi on a symmetric matrix. Returns unsorted eigenvalues, eigenvectors as rows.
inline void jacobi(Matrix& a, Matrix& w) {
  const Eigen::Index n = a.rows();
  w = Matrix::Identity(n, n);
  const double norm = a.norm();
  if (n < 2 || norm == 0.0) return;
  const double stop = 1e-12 * norm;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) < stop) return;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Late sweeps: drop elements that no longer move the diagonal.
        if (sweep > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double nkp = c * akp - s * akq;
          const double nkq = s * akp + c * akq;
          a(k, p) = a(p, k) = nkp;
          a(k, q) = a(q, k) = nkq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        double* wp = w.row(p).data();
        double* wq = w.row(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = wp[k];
          const double y = wq[k];
          wp[k] = c * x - s * y;
          wq[k] = s * x + c * y;
        }
      }
    }
  }
}

inline void fix_sign(Eigen::Ref<Eigen::RowVectorXd> v) {
  const double big = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) >= big - 1e-12) {
      if (v[k] < 0) v = -v;
      return;
    }
  }
}

}  // namespace detail

inline SymEigen sym_eigen(const Matrix& a) {
  require_square(a, "sym_eigen");
  require(a.allFinite(), ErrorKind::BadArgument, "sym_eigen: non-finite entries");
  const double asym = (a - a.transpose()).norm();
  require(asym <= 1e-10 * std::max(1.0, a.norm()), ErrorKind::NotSymmetric,
          "sym_eigen: asymmetry " + std::to_string(asym));

  Matrix work = symmetrize(a);
  Matrix w;
  detail::jacobi(work, w);

  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return work(i, i) > work(j, j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    out.values[r] = work(order[r], order[r]);
    out.vectors.row(r) = w.row(order[r]);
    detail::fix_sign(out.vectors.row(r));
  }
  return out;
}

inline Matrix compose(const SymEigen& e, const Vector& values) {
  return e.vectors.transpose() * values.asDiagonal() * e.vectors;
}

inline double min_eigenvalue(const Matrix& a) { return sym_eigen(a).values.minCoeff(); }

inline Matrix psd_project(const Matrix& a) {
  require_square(a, "psd_project");
  const SymEigen e = sym_eigen(symmetrize(a));
  return symmetrize(compose(e, e.values.cwiseMax(0.0)));
}

inline Matrix sqrt_psd(const Matrix& m) {
  require_square(m, "sqrt_psd");
  const SymEigen e = sym_eigen(m);
  const double lo = e.values.size() ? e.values.minCoeff() : 0.0;
  require(lo >= -1e-6 * m.norm(), ErrorKind::NotPSD,
          "sqrt_psd: min eigenvalue " + std::to_string(lo));
  return symmetrize(compose(e, e.values.cwiseMax(0.0).cwiseSqrt()));
}

// Adds eps*I with eps = 1e-4*tr/d when the minimum eigenvalue is below 1e-10.
// Throws `kind` when the result is still not positive definite.
inline Matrix regularize_pd(const Matrix& b, ErrorKind kind = ErrorKind::SingularB) {
  require_square(b, "regularize_pd");
  const Matrix s = symmetrize(b);
  const double lo = min_eigenvalue(s);
  if (lo >= 1e-10) return s;
  const auto d = static_cast<double>(s.rows());
  const double eps = 1e-4 * s.trace() / d;
  Matrix r = s;
  if (eps > 0) r.diagonal().array() += eps;
  require(eps > 0 && min_eigenvalue(r) >= 1e-10, kind, "matrix not positive definite after regularization");
  return r;
}

inline Matrix inv_sqrt_pd(const Matrix& b, ErrorKind kind = ErrorKind::SingularB) {
  const SymEigen e = sym_eigen(b);
  require(e.values.minCoeff() > 0.0, kind, "inverse square root of a singular matrix");
  return symmetrize(compose(e, e.values.cwiseSqrt().cwiseInverse()));
}

inline Matrix inverse_pd(const Matrix& b, ErrorKind kind = ErrorKind::SingularB) {
  const SymEigen e = sym_eigen(b);
  require(e.values.minCoeff() > 0.0, kind, "inverse of a singular matrix");
  return symmetrize(compose(e, e.values.cwiseInverse()));
}

// P with P^T B P = I and P^T A P = diag(values); values descending.
// Row i of P^T is an eigenvector of B^-1 A. B must already be PD.
struct SimultaneousDiag {
  Matrix p;
  Vector values;
};

inline SimultaneousDiag simultaneous_diagonalize(const Matrix& a, const Matrix& b,
                                                 ErrorKind kind = ErrorKind::SingularB) {
  require_square(a, "simultaneous_diagonalize");
  require_square(b, "simultaneous_diagonalize");
  require(a.rows() == b.rows(), ErrorKind::DimensionMismatch, "simultaneous_diagonalize: sizes differ");
  const Matrix bis = inv_sqrt_pd(b, kind);
  const SymEigen e = sym_eigen(symmetrize(bis * symmetrize(a) * bis));
  Matrix rows = e.vectors * bis;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) detail::fix_sign(rows.row(r));
  return {rows.transpose(), e.values};
}

inline void check_d_out(Eigen::Index d_out, Eigen::Index d) {
  require(d_out >= 1 && d_out <= d, ErrorKind::BadDimension,
          "output dimension " + std::to_string(d_out) + " not in [1, " + std::to_string(d) + "]");
}

struct TraceSolution {
  Matrix l;       // d_out x d
  Vector values;  // per-row eigenvalue
};

inline TraceSolution trace_max(const Matrix& a, Eigen::Index d_out) {
  require_square(a, "solve_trace_max");
  check_d_out(d_out, a.rows());
  const SymEigen e = sym_eigen(a);
  return {e.vectors.topRows(d_out), e.values.head(d_out)};
}

inline Matrix solve_trace_max(const Matrix& a, Eigen::Index d_out) { return trace_max(a, d_out).l; }

inline TraceSolution trace_ratio(const Matrix& a, const Matrix& b, Eigen::Index d_out) {
  require_square(a, "solve_trace_ratio");
  check_d_out(d_out, a.rows());
  const SimultaneousDiag sd = simultaneous_diagonalize(a, regularize_pd(b, ErrorKind::SingularB));
  return {sd.p.transpose().topRows(d_out), sd.values.head(d_out)};
}

inline Matrix solve_trace_ratio(const Matrix& a, const Matrix& b, Eigen::Index d_out) {
  return trace_ratio(a, b, d_out).l;
}

// Picks generalized eigenvectors by lambda + 1/lambda; expects both inputs PD.
inline TraceSolution select_symmetric_ratio(const SimultaneousDiag& sd, Eigen::Index d_out) {
  const Eigen::Index d = sd.values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto score = [&](Eigen::Index i) { return sd.values[i] + 1.0 / sd.values[i]; };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return score(i) > score(j); });
  TraceSolution out{Matrix(d_out, d), Vector(d_out)};
  for (Eigen::Index r = 0; r < d_out; ++r) {
    out.l.row(r) = sd.p.col(order[r]).transpose();
    out.values[r] = sd.values[order[r]];
  }
  return out;
}

inline TraceSolution trace_ratio_sym(const Matrix& a, const Matrix& b, Eigen::Index d_out) {
  require_square(a, "solve_trace_ratio_sym");
  check_d_out(d_out, a.rows());
  const Matrix ar = regularize_pd(a, ErrorKind::SingularA);
  const Matrix br = regularize_pd(b, ErrorKind::SingularB);
  return select_symmetric_ratio(simultaneous_diagonalize(ar, br), d_out);
}

inline Matrix solve_trace_ratio_sym(const Matrix& a, const Matrix& b, Eigen::Index d_out) {
  return trace_ratio_sym(a, b, d_out).l;
}

// tr((L B L^T)^-1 (L A L^T))
inline double trace_ratio_objective(const Matrix& l, const Matrix& a, const Matrix& b) {
  const Matrix lb = l * b * l.transpose();
  const Matrix la = l * a * l.transpose();
  return lb.ldlt().solve(la).trace();
}

inline double trace_ratio_sym_objective(const Matrix& l, const Matrix& a, const Matrix& b) {
  const Matrix lb = l * b * l.transpose();
  const Matrix la = l * a * l.transpose();
  return lb.ldlt().solve(la).trace() + la.ldlt().solve(lb).trace();
}

// Eigenvalues of B^-1/2 A B^-1/2.
inline Vector relative_spectrum(const Matrix& a, const Matrix& b, ErrorKind kind) {
  require_square(a, "divergence");
  require_square(b, "divergence");
  require(a.rows() == b.rows(), ErrorKind::DimensionMismatch, "divergence: sizes differ");
  const SymEigen eb = sym_eigen(symmetrize(b));
  require(eb.values.minCoeff() > 1e-300, kind, "second argument is not positive definite");
  const Matrix bis = symmetrize(compose(eb, eb.values.cwiseSqrt().cwiseInverse()));
  return sym_eigen(symmetrize(bis * symmetrize(a) * bis)).values;
}

inline double logdet_divergence(const Matrix& a, const Matrix& b) {
  const Vector mu = relative_spectrum(a, b, ErrorKind::SingularB);
  require(mu.minCoeff() > 0.0, ErrorKind::SingularA, "logdet_divergence: first argument is not positive definite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += mu[i] - std::log(mu[i]) - 1.0;
  return std::max(0.0, s);
}

inline double kl_gaussian(const Vector& mean1, const Matrix& cov1, const Vector& mean2, const Matrix& cov2) {
  require(mean1.size() == mean2.size() && mean1.size() == cov1.rows() && cov1.rows() == cov2.rows(),
          ErrorKind::DimensionMismatch, "kl_gaussian: dimensions disagree");
  try {
    const double ld = logdet_divergence(cov1, cov2);
    const Vector diff = mean1 - mean2;
    const double maha = diff.dot(inverse_pd(symmetrize(cov2)) * diff);
    return 0.5 * ld + 0.5 * maha;
  } catch (const Error& e) {
    throw Error(ErrorKind::SingularCovariance, e.what());
  }
}

inline double jeffrey_gaussian_equal_mean(const Matrix& cov1, const Matrix& cov2) {
  require_square(cov1, "jeffrey");
  require(cov1.rows() == cov2.rows() && cov2.rows() == cov2.cols(), ErrorKind::DimensionMismatch,
          "jeffrey: sizes differ");
  try {
    const Matrix i1 = inverse_pd(symmetrize(cov1));
    const Matrix i2 = inverse_pd(symmetrize(cov2));
    const double d = static_cast<double>(cov1.rows());
    return std::max(0.0, 0.5 * ((cov1 * i2).trace() + (i1 * cov2).trace()) - d);
  } catch (const Error& e) {
    throw Error(ErrorKind::SingularCovariance, e.what());
  }
}

// Sum over pairs of w(a,b) (x_a - x_b)(x_a - x_b)^T, computed as X^T (D - W - W^T) X.
inline Matrix weighted_outer_sum(const Matrix& x, const Matrix& w) {
  const Vector deg = w.rowwise().sum() + w.colwise().sum().transpose();
  Matrix lap = -(w + w.transpose());
  lap.diagonal() += deg;
  return x.transpose() * lap * x;
}

// Squared Euclidean distances between the rows of a and b.
inline Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  const Vector na = a.rowwise().squaredNorm();
  const Vector nb = b.rowwise().squaredNorm();
  Matrix d = -2.0 * a * b.transpose();
  d.colwise() += na;
  d.rowwise() += nb.transpose();
  return d.cwiseMax(0.0);
}

inline Matrix pairwise_sq_dists(const Matrix& a) {
  Matrix d = pairwise_sq_dists(a, a);
  d.diagonal().setZero();
  return symmetrize(d);
}

}  // namespace metriko
