#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dsmkit {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds shared by every solver.
///
/// rank_tol and residual_tol are relative; psd_tol is applied to eigenvalues
/// after scaling by the norm of the matrix under test.
struct ToleranceConfig {
  double rank_tol = 1e-12;
  double psd_tol = 1e-10;
  double residual_tol = 1e-10;
  double colinearity_tol = 1e-10;

  void validate() const {
    if (!(rank_tol > 0 && psd_tol > 0 && residual_tol > 0 && colinearity_tol > 0))
      throw std::invalid_argument("tolerances must be strictly positive");
  }
};

/// One named check and whether it held.
struct Condition {
  std::string name;
  bool held = false;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a structural precondition (e.g. non-Hermitian where Hermitian is required).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Zero vectors or other inputs for which the formulas are undefined.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A sufficient condition needed to evaluate the routed formula does not hold.
class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(std::string condition)
      : Error("hypothesis violated: " + condition), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

class NotColinear : public Error {
 public:
  using Error::Error;
};

/// Free parameters passed to a characterization break one of its constraints.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

class NotImplemented : public Error {
 public:
  using Error::Error;
};

/// A self-check on a computed result failed; always a bug, never user error.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace dsmkit
