#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace transflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Inputs that fail validation (config files, images, centre files).
struct InputError : Error {
  using Error::Error;
};

struct MalformedPgm : InputError {
  using InputError::InputError;
};

struct DimensionMismatch : InputError {
  using InputError::InputError;
};

struct ConfigError : InputError {
  using InputError::InputError;
};

struct IoError : Error {
  using Error::Error;
};

// Numerical failures.
struct NumericalError : Error {
  using Error::Error;
};

// Factorisation of the time-step system L(m^(k)) failed.
struct SingularStepSystem : NumericalError {
  int step;
  explicit SingularStepSystem(int k)
      : NumericalError("singular time-step system at step " + std::to_string(k)), step(k) {}
};

// Full Newton requested for a formulation that only supports Gauss-Newton.
struct IncompatibleMode : Error {
  using Error::Error;
};

// Preconditioner applied without (or after invalidation of) its factorisations.
struct FactorizationStale : Error {
  using Error::Error;
};

// Dense-only diagnostic requested on a problem too large for dense assembly.
struct TooLargeForDense : Error {
  using Error::Error;
};

// RBF collocation matrix is numerically indefinite (bad shape parameter).
struct IllConditioned : NumericalError {
  using NumericalError::NumericalError;
};

struct LinearSolveFailed : NumericalError {
  int outer_step;
  explicit LinearSolveFailed(int k, const std::string& detail = "")
      : NumericalError("linear solve failed at outer step " + std::to_string(k) +
                       (detail.empty() ? "" : ": " + detail)),
        outer_step(k) {}
};

struct LineSearchFailed : NumericalError {
  int outer_step;
  explicit LineSearchFailed(int k)
      : NumericalError("line search failed at outer step " + std::to_string(k)), outer_step(k) {}
};

}  // namespace transflow
