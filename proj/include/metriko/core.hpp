#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace metriko {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorKind {
  NotSquare,
  NotSymmetric,
  NotPSD,
  BadDimension,
  DimensionMismatch,
  SingularB,
  SingularA,
  SingularCovariance,
  SingularSigma,
  SingularU,
  SingleClass,
  ClassTooSmall,
  NeighborhoodTooLarge,
  EmptyConstraints,
  SingularXS,
  DivergedToNaN,
  EmptyTrain,
  ParseError,
  MissingValue,
  BadFoldCount,
  IoError,
  TooLarge,
  BadArgument,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::BadDimension: return "BadDimension";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularB: return "SingularB";
    case ErrorKind::SingularA: return "SingularA";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::SingularSigma: return "SingularSigma";
    case ErrorKind::SingularU: return "SingularU";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::NeighborhoodTooLarge: return "NeighborhoodTooLarge";
    case ErrorKind::EmptyConstraints: return "EmptyConstraints";
    case ErrorKind::SingularXS: return "SingularXS";
    case ErrorKind::DivergedToNaN: return "DivergedToNaN";
    case ErrorKind::EmptyTrain: return "EmptyTrain";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::BadFoldCount: return "BadFoldCount";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Per-run record shared by every learner.
struct FitReport {
  std::size_t iterations = 0;
  std::vector<double> objective_trace;
  bool converged = false;
  double elapsed = 0.0;  // seconds
  double final_objective = 0.0;
  std::vector<double> values;  // learner specific (eigenvalues, explained variance, ...)
  std::vector<std::string> warnings;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace metriko
