#pragma once

#include <vector>

#include "transflow/linop.hpp"

namespace transflow {

enum class KrylovMethod { CGS, GMRES };

struct KrylovConfig {
  KrylovMethod method = KrylovMethod::GMRES;
  double tol = 1e-6;      // relative residual, Euclidean norm of the true system
  int max_iter = 500;
  int restart = 50;       // GMRES only; large enough to be inactive at desk scale
  bool record_history = false;

  void validate() const {
    if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("krylov tol must lie in (0,1)");
    if (max_iter < 1) throw ConfigError("krylov max_iter must be >= 1");
    if (restart < 1) throw ConfigError("krylov restart must be >= 1");
  }
};

enum class SolveStatus { Converged, MaxIterExceeded, Breakdown, NanDetected };

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;  // true residual ||b - A x|| / ||b|| at exit
  bool converged = false;
  SolveStatus status = SolveStatus::Converged;
  std::vector<double> residual_history;          // true residuals, initial + per iteration
  std::vector<double> precond_residual_history;  // CGS recursion residuals (preconditioned)
};

// Preconditioned Krylov solve. CGS applies the preconditioner on the left,
// GMRES on the right, so GMRES residual estimates are true-system residuals.
// Convergence is always gated on the recomputed true residual. On
// non-convergence the best iterate seen is returned.
std::pair<Vec, SolveReport> krylov_solve(const LinOp& op, const PrecondOp& precond, const Vec& b,
                                         const Vec& x0, const KrylovConfig& cfg);

inline std::pair<Vec, SolveReport> krylov_solve(const LinOp& op, const PrecondOp& precond,
                                                const Vec& b, const KrylovConfig& cfg) {
  return krylov_solve(op, precond, b, Vec::Zero(b.size()), cfg);
}

}  // namespace transflow
