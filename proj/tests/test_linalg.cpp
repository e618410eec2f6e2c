#include "metriko/linalg.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace metriko;
using namespace testutil;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST(SymEigen, DiagonalOrdersDescending) {
  const SymEigen e = sym_eigen(diag({3, 1, 2}));
  EXPECT_NEAR(e.values[0], 3, 1e-14);
  EXPECT_NEAR(e.values[1], 2, 1e-14);
  EXPECT_NEAR(e.values[2], 1, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(1, 2)), 1, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1, 1e-14);
}

TEST(SymEigen, IdentityHasOrthonormalRows) {
  const SymEigen e = sym_eigen(Matrix::Identity(2, 2));
  EXPECT_NEAR(e.values[0], 1, 1e-14);
  EXPECT_NEAR(e.values[1], 1, 1e-14);
  EXPECT_LT((e.vectors * e.vectors.transpose() - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(SymEigen, SwapMatrixByHand) {
  const SymEigen e = sym_eigen(mat2(0, 1, 1, 0));
  EXPECT_NEAR(e.values[0], 1, 1e-12);
  EXPECT_NEAR(e.values[1], -1, 1e-12);
  const double r = 1 / std::sqrt(2.0);
  // Sign convention: first max-magnitude component positive.
  EXPECT_NEAR(e.vectors(0, 0), r, 1e-12);
  EXPECT_NEAR(e.vectors(0, 1), r, 1e-12);
  EXPECT_NEAR(e.vectors(1, 0), r, 1e-12);
  EXPECT_NEAR(e.vectors(1, 1), -r, 1e-12);
}

TEST(SymEigen, TiesKeepOriginalOrder) {
  const SymEigen e = sym_eigen(diag({1, 2, 1}));
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(2, 2)), 1, 1e-14);
}

TEST(SymEigen, RejectsBadInput) {
  EXPECT_THROW(sym_eigen(Matrix::Zero(2, 3)), Error);
  try {
    sym_eigen(mat2(1, 2, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSymmetric);
  }
}

TEST(SymEigen, ResidualAndReconstructionOnRandom) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(uniform_index(rng, 12));
    const Matrix a = random_symmetric(rng, d);
    const SymEigen e = sym_eigen(a);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Vector v = e.vectors.row(i).transpose();
      EXPECT_LE((a * v - e.values[i] * v).cwiseAbs().maxCoeff(), 1e-8 * (1 + a.norm()));
    }
    EXPECT_LT((e.vectors * e.vectors.transpose() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((compose(e, e.values) - a).norm(), 1e-8);
    for (Eigen::Index i = 1; i < d; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  }
}

TEST(SymEigen, AgreesWithEigenSolver) {
  Rng rng(11);
  const Matrix a = random_symmetric(rng, 9);
  Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
  const SymEigen e = sym_eigen(a);
  for (Eigen::Index i = 0; i < 9; ++i) EXPECT_NEAR(e.values[i], ref.eigenvalues()[8 - i], 1e-10);
}

TEST(PsdProject, ClipsNegativeEigenvalues) {
  EXPECT_LT((psd_project(diag({2, -1})) - diag({2, 0})).norm(), 1e-14);
  EXPECT_LT((psd_project(mat2(0, 1, 1, 0)) - mat2(0.5, 0.5, 0.5, 0.5)).norm(), 1e-12);
}

TEST(PsdProject, FixedPointAndIdempotent) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix p = random_psd(rng, 5, 3);
    EXPECT_LT((psd_project(p) - p).norm(), 1e-8);
    const Matrix a = random_symmetric(rng, 5);
    const Matrix q = psd_project(a);
    EXPECT_LT((psd_project(q) - q).norm(), 1e-10);
    EXPECT_GE(min_eigenvalue(q), -1e-10);
  }
}

TEST(PsdProject, SymmetrizesNonSymmetricInput) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_LT((psd_project(a) - psd_project(symmetrize(a))).norm(), 1e-14);
}

TEST(SqrtPsd, KnownRoots) {
  EXPECT_LT((sqrt_psd(diag({4, 9})) - diag({2, 3})).norm(), 1e-12);
  EXPECT_LT((sqrt_psd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm(), 1e-12);
  const Matrix m = mat2(2, 1, 1, 2);
  const Matrix n = sqrt_psd(m);
  EXPECT_LT((n * n - m).norm(), 1e-8);
  EXPECT_GE(min_eigenvalue(n), 0);
}

TEST(SqrtPsd, RejectsIndefinite) {
  try {
    sqrt_psd(diag({1, -1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPSD);
  }
}

TEST(TraceMax, DiagonalCase) {
  const Matrix a = diag({3, 1, 2});
  const Matrix l = solve_trace_max(a, 2);
  EXPECT_NEAR((l * a * l.transpose()).trace(), 5, 1e-12);
  EXPECT_NEAR(std::abs(l(0, 0)), 1, 1e-12);
  EXPECT_NEAR(std::abs(l(1, 2)), 1, 1e-12);
  const Matrix full = solve_trace_max(a, 3);
  EXPECT_NEAR((full * a * full.transpose()).trace(), a.trace(), 1e-12);
}

TEST(TraceMax, RejectsBadDimension) {
  EXPECT_THROW(solve_trace_max(Matrix::Identity(3, 3), 0), Error);
  EXPECT_THROW(solve_trace_max(Matrix::Identity(3, 3), 4), Error);
}

TEST(TraceMax, BeatsRandomOrthonormalRows) {
  Rng rng(5);
  const Matrix a = random_symmetric(rng, 4);
  const Matrix l = solve_trace_max(a, 2);
  const double best = (l * a * l.transpose()).trace();
  const SymEigen e = sym_eigen(a);
  EXPECT_NEAR(best, e.values[0] + e.values[1], 1e-8);
  EXPECT_LT((l * l.transpose() - Matrix::Identity(2, 2)).norm(), 1e-8);
  for (int t = 0; t < 1000; ++t) {
    const Matrix q = random_orthonormal_rows(rng, 2, 4);
    EXPECT_GE(best, (q * a * q.transpose()).trace() - 1e-10);
  }
}

TEST(TraceRatio, IdentityDenominatorReducesToTraceMax) {
  const Matrix l = solve_trace_ratio(diag({5, 1}), Matrix::Identity(2, 2), 1);
  EXPECT_NEAR(std::abs(l(0, 0)), 1, 1e-12);
  EXPECT_NEAR(l(0, 1), 0, 1e-12);
}

TEST(TraceRatio, EqualMatricesGiveRatioOne) {
  Rng rng(2);
  const Matrix a = random_pd(rng, 3);
  const Matrix l = solve_trace_ratio(a, a, 2);
  EXPECT_NEAR(trace_ratio_objective(l, a, a), 2, 1e-10);
}

TEST(TraceRatio, ExplicitGeneralizedProblem) {
  const Matrix l = solve_trace_ratio(diag({2, 8}), diag({1, 4}), 1);
  EXPECT_NEAR(trace_ratio_objective(l, diag({2, 8}), diag({1, 4})), 2, 1e-12);
}

TEST(TraceRatio, RowsAreGeneralizedEigenvectors) {
  Rng rng(8);
  const Matrix a = random_symmetric(rng, 5);
  const Matrix b = random_pd(rng, 5);
  const TraceSolution s = trace_ratio(a, b, 3);
  const Matrix binv_a = b.inverse() * a;
  for (Eigen::Index r = 0; r < 3; ++r) {
    const Vector v = s.l.row(r).transpose();
    EXPECT_LT((binv_a * v - s.values[r] * v).norm(), 1e-8 * (1 + binv_a.norm()) * v.norm());
  }
  EXPECT_LT((s.l * b * s.l.transpose() - Matrix::Identity(3, 3)).norm(), 1e-8);
}

TEST(TraceRatio, SingularDenominatorIsRegularized) {
  const Matrix b = diag({1, 0});
  EXPECT_NO_THROW(solve_trace_ratio(diag({1, 1}), b, 1));
  EXPECT_THROW(solve_trace_ratio(diag({1, 1}), Matrix::Zero(2, 2), 1), Error);
}

TEST(TraceRatio, BeatsRandomCandidates) {
  Rng rng(21);
  const Matrix a = random_psd(rng, 5, 5);
  const Matrix b = random_pd(rng, 5);
  const Matrix l = solve_trace_ratio(a, b, 2);
  const double best = trace_ratio_objective(l, a, b);
  for (int t = 0; t < 1000; ++t) {
    const Matrix q = random_orthonormal_rows(rng, 2, 5);
    EXPECT_GE(best, trace_ratio_objective(q, a, b) - 1e-9);
  }
}

TEST(TraceRatioSym, PicksLargestScore) {
  Matrix l = solve_trace_ratio_sym(diag({9, 1}), Matrix::Identity(2, 2), 1);
  EXPECT_NEAR(std::abs(l(0, 0)), 1, 1e-12);
  l = solve_trace_ratio_sym(diag({1.0 / 9, 1}), Matrix::Identity(2, 2), 1);
  EXPECT_NEAR(std::abs(l(0, 0)), 1, 1e-12);
}

TEST(TraceRatioSym, MatchesBruteForceOverEigenvectors) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_pd(rng, 4);
    const Matrix b = random_pd(rng, 4);
    const Matrix l = solve_trace_ratio_sym(a, b, 1);
    const double got = trace_ratio_sym_objective(l, a, b);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ref(a, b);
    double best = 0;
    for (Eigen::Index i = 0; i < 4; ++i) {
      const Matrix cand = ref.eigenvectors().col(i).transpose();
      best = std::max(best, trace_ratio_sym_objective(cand, a, b));
    }
    EXPECT_NEAR(got, best, 1e-8 * best);
  }
}

TEST(TraceRatioSym, BeatsRandomCandidates) {
  Rng rng(31);
  const Matrix a = random_pd(rng, 4);
  const Matrix b = random_pd(rng, 4);
  const Matrix l = solve_trace_ratio_sym(a, b, 2);
  const double best = trace_ratio_sym_objective(l, a, b);
  for (int t = 0; t < 1000; ++t) {
    const Matrix q = random_orthonormal_rows(rng, 2, 4);
    EXPECT_GE(best, trace_ratio_sym_objective(q, a, b) - 1e-9);
  }
}

TEST(SimultaneousDiag, RandomPairs) {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = random_symmetric(rng, 5);
    const Matrix b = random_pd(rng, 5);
    const SimultaneousDiag sd = simultaneous_diagonalize(a, b);
    const Matrix pbp = sd.p.transpose() * b * sd.p;
    const Matrix pap = sd.p.transpose() * a * sd.p;
    EXPECT_LT((pbp - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
    Matrix off = pap;
    off.diagonal().setZero();
    EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((pap.diagonal() - sd.values).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(LogdetDivergence, HandValues) {
  EXPECT_NEAR(logdet_divergence(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), 0, 1e-12);
  EXPECT_NEAR(logdet_divergence(2 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)), 2 - 2 * std::log(2.0), 1e-12);
  EXPECT_NE(logdet_divergence(2 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
            logdet_divergence(Matrix::Identity(2, 2), 2 * Matrix::Identity(2, 2)));
}

TEST(LogdetDivergence, MatchesTraceLogdetFormula) {
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const Matrix a = random_pd(rng, 4);
    const Matrix b = random_pd(rng, 4);
    const Matrix ab = a * b.inverse();
    const double ref = ab.trace() - std::log(ab.determinant()) - 4;
    EXPECT_NEAR(logdet_divergence(a, b), ref, 1e-8 * (1 + std::abs(ref)));
  }
}

TEST(LogdetDivergence, SingularSecondArgument) {
  try {
    logdet_divergence(Matrix::Identity(2, 2), Matrix::Zero(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularB);
  }
}

TEST(KlGaussian, HandValues) {
  const Vector z = Vector::Zero(2);
  const Matrix i2 = Matrix::Identity(2, 2);
  EXPECT_NEAR(kl_gaussian(z, i2, z, i2), 0, 1e-14);
  Vector m1(2);
  m1 << 1, 0;
  EXPECT_NEAR(kl_gaussian(m1, i2, z, i2), 0.5, 1e-12);
  EXPECT_NEAR(kl_gaussian(z, 2 * i2, z, i2), (2 - 2 * std::log(2.0)) / 2, 1e-12);
}

TEST(KlGaussian, MeanTermUsesSecondCovariance) {
  // Closed form for 1-D Gaussians: log(s2/s1) + (s1^2 + (m1-m2)^2)/(2 s2^2) - 1/2.
  Vector m1(1), m2(1);
  m1 << 0.3;
  m2 << -1.1;
  Matrix c1(1, 1), c2(1, 1);
  c1 << 0.5;
  c2 << 2.0;
  const double ref = 0.5 * std::log(2.0 / 0.5) + (0.5 + 1.4 * 1.4) / (2 * 2.0) - 0.5;
  EXPECT_NEAR(kl_gaussian(m1, c1, m2, c2), ref, 1e-12);
}

TEST(KlGaussian, NonNegativeAndJeffreyIdentity) {
  Rng rng(13);
  for (int t = 0; t < 1000; ++t) {
    const Matrix c1 = random_pd(rng, 3);
    const Matrix c2 = random_pd(rng, 3);
    const Vector m1 = random_matrix(rng, 3, 1);
    const Vector m2 = random_matrix(rng, 3, 1);
    EXPECT_GE(kl_gaussian(m1, c1, m2, c2), 0);
    const Vector z = Vector::Zero(3);
    const double j = jeffrey_gaussian_equal_mean(c1, c2);
    const double sum = kl_gaussian(z, c1, z, c2) + kl_gaussian(z, c2, z, c1);
    EXPECT_NEAR(j, sum, 1e-8 * (1 + j));
  }
}

TEST(Jeffrey, HandValuesAndSymmetry) {
  const Matrix i2 = Matrix::Identity(2, 2);
  EXPECT_NEAR(jeffrey_gaussian_equal_mean(i2, i2), 0, 1e-14);
  EXPECT_NEAR(jeffrey_gaussian_equal_mean(2 * i2, i2), 0.5, 1e-12);
  EXPECT_NEAR(jeffrey_gaussian_equal_mean(i2, 2 * i2), 0.5, 1e-12);
  try {
    jeffrey_gaussian_equal_mean(i2, Matrix::Zero(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularCovariance);
  }
}

TEST(WeightedOuterSum, MatchesDirectSum) {
  Rng rng(17);
  const Matrix x = random_matrix(rng, 6, 3);
  Matrix w = random_matrix(rng, 6, 6);
  Matrix ref = Matrix::Zero(3, 3);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const Vector d = (x.row(a) - x.row(b)).transpose();
      ref += w(a, b) * d * d.transpose();
    }
  EXPECT_LT((weighted_outer_sum(x, w) - ref).norm(), 1e-10);
}
