#include "transflow/krylov.hpp"

#include <cmath>
#include <limits>

namespace transflow {

namespace {

constexpr double kBreakdownTiny = 1e-300;

struct BestIterate {
  Vec x;
  double relres = std::numeric_limits<double>::infinity();
  void consider(const Vec& candidate, double r) {
    if (r < relres) {
      relres = r;
      x = candidate;
    }
  }
};

std::pair<Vec, SolveReport> solve_cgs(const LinOp& op, const PrecondOp& precond, const Vec& b,
                                      const Vec& x0, const KrylovConfig& cfg) {
  SolveReport rep;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    if (cfg.record_history) rep.residual_history.push_back(0.0);
    return {Vec::Zero(b.size()), rep};
  }

  Vec x = x0;
  Vec r_true = b - op.apply(x);
  Vec r = precond.apply(r_true);
  const Vec rstar = r;
  const double prec_bnorm = precond.apply(b).norm();

  double relres = r_true.norm() / bnorm;
  if (cfg.record_history) {
    rep.residual_history.push_back(relres);
    rep.precond_residual_history.push_back(prec_bnorm > 0.0 ? r.norm() / prec_bnorm : 0.0);
  }
  BestIterate best;
  best.consider(x, relres);

  if (relres <= cfg.tol) {
    rep.converged = true;
    rep.relative_residual = relres;
    return {x, rep};
  }

  Vec u, pvec, q, v, w;
  double rho_old = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const double rho = rstar.dot(r);
    if (std::abs(rho) < kBreakdownTiny || !std::isfinite(rho)) {
      rep.status = std::isfinite(rho) ? SolveStatus::Breakdown : SolveStatus::NanDetected;
      rep.relative_residual = best.relres;
      return {best.x, rep};
    }
    if (it == 1) {
      u = r;
      pvec = u;
    } else {
      const double beta = rho / rho_old;
      u = r + beta * q;
      pvec = u + beta * (q + beta * pvec);
    }
    v = precond.apply(op.apply(pvec));
    const double sigma = rstar.dot(v);
    if (std::abs(sigma) < kBreakdownTiny || !std::isfinite(sigma)) {
      rep.status = std::isfinite(sigma) ? SolveStatus::Breakdown : SolveStatus::NanDetected;
      rep.relative_residual = best.relres;
      return {best.x, rep};
    }
    const double alpha = rho / sigma;
    q = u - alpha * v;
    const Vec uq = u + q;
    x += alpha * uq;
    w = op.apply(uq);
    r_true -= alpha * w;
    r -= alpha * precond.apply(w);
    rho_old = rho;
    rep.iterations = it;

    if (!x.allFinite() || !r.allFinite()) {
      rep.status = SolveStatus::NanDetected;
      rep.relative_residual = best.relres;
      return {best.x, rep};
    }

    relres = r_true.norm() / bnorm;
    if (cfg.record_history) {
      rep.residual_history.push_back(relres);
      rep.precond_residual_history.push_back(prec_bnorm > 0.0 ? r.norm() / prec_bnorm : 0.0);
    }
    best.consider(x, relres);

    if (relres <= cfg.tol) {
      // Gate on the freshly recomputed residual, not the recursion.
      r_true = b - op.apply(x);
      relres = r_true.norm() / bnorm;
      best.consider(x, relres);
      if (relres <= cfg.tol) {
        rep.converged = true;
        rep.relative_residual = relres;
        return {x, rep};
      }
      r = precond.apply(r_true);
    }
  }
  rep.status = SolveStatus::MaxIterExceeded;
  rep.relative_residual = best.relres;
  return {best.x, rep};
}

std::pair<Vec, SolveReport> solve_gmres(const LinOp& op, const PrecondOp& precond, const Vec& b,
                                        const Vec& x0, const KrylovConfig& cfg) {
  SolveReport rep;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    if (cfg.record_history) rep.residual_history.push_back(0.0);
    return {Vec::Zero(b.size()), rep};
  }

  const Eigen::Index n = b.size();
  const int restart = cfg.restart;
  Vec x = x0;
  BestIterate best;

  Mat V(n, restart + 1);
  Mat H = Mat::Zero(restart + 1, restart);
  Vec g(restart + 1), cs(restart), sn(restart);

  bool first = true;
  while (rep.iterations < cfg.max_iter) {
    Vec r = b - op.apply(x);
    double beta = r.norm();
    double relres = beta / bnorm;
    if (first && cfg.record_history) rep.residual_history.push_back(relres);
    first = false;
    best.consider(x, relres);
    if (relres <= cfg.tol) {
      rep.converged = true;
      rep.relative_residual = relres;
      return {x, rep};
    }
    if (!std::isfinite(beta)) {
      rep.status = SolveStatus::NanDetected;
      rep.relative_residual = best.relres;
      return {best.x, rep};
    }

    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    int j = 0;
    bool happy = false;
    for (; j < restart && rep.iterations < cfg.max_iter; ++j) {
      ++rep.iterations;
      Vec w = op.apply(precond.apply(V.col(j)));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (!std::isfinite(H(j + 1, j))) {
        rep.status = SolveStatus::NanDetected;
        rep.relative_residual = best.relres;
        return {best.x, rep};
      }
      if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);
      else happy = true;

      // Apply stored Givens rotations to the new column, then form a new one.
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = denom > 0.0 ? H(j, j) / denom : 1.0;
      sn[j] = denom > 0.0 ? H(j + 1, j) / denom : 0.0;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] *= cs[j];

      const double res_est = std::abs(g[j + 1]) / bnorm;
      if (cfg.record_history) rep.residual_history.push_back(res_est);
      if (res_est <= cfg.tol || happy) {
        ++j;
        break;
      }
    }

    // Solve the small triangular system and update the iterate.
    Vec yk = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    Vec z = V.leftCols(j) * yk;
    x += precond.apply(z);
    if (!x.allFinite()) {
      rep.status = SolveStatus::NanDetected;
      rep.relative_residual = best.relres;
      return {best.x, rep};
    }
    first = true;  // suppress duplicate history entry at the restart residual
    Vec rr = b - op.apply(x);
    relres = rr.norm() / bnorm;
    best.consider(x, relres);
    if (relres <= cfg.tol) {
      rep.converged = true;
      rep.relative_residual = relres;
      return {x, rep};
    }
    if (happy) break;  // exact subspace solution that still misses the tol: give up
  }
  rep.status = SolveStatus::MaxIterExceeded;
  rep.relative_residual = best.relres;
  return {best.x, rep};
}

}  // namespace

std::pair<Vec, SolveReport> krylov_solve(const LinOp& op, const PrecondOp& precond, const Vec& b,
                                         const Vec& x0, const KrylovConfig& cfg) {
  cfg.validate();
  if (op.rows() != op.cols()) throw DimensionMismatch("krylov operator must be square");
  if (b.size() != op.rows() || x0.size() != op.rows())
    throw DimensionMismatch("krylov rhs/x0 dimension mismatch");
  if (!b.allFinite()) throw NumericalError("krylov rhs contains non-finite entries");
  if (cfg.method == KrylovMethod::CGS) return solve_cgs(op, precond, b, x0, cfg);
  return solve_gmres(op, precond, b, x0, cfg);
}

}  // namespace transflow
