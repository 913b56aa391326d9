#include "transflow/transport.hpp"

#include <Eigen/SparseLU>

namespace transflow {

Vec apply_K(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y) {
  Vec t1 = m1.cwiseProduct(y);
  Vec t2 = m2.cwiseProduct(y);
  Vec out, tmp;
  apply_d1(g, t1, out);
  apply_d2(g, t2, tmp);
  out += tmp;
  return out;
}

Vec apply_K_transpose(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y) {
  Vec d1, d2;
  apply_d1(g, y, d1, /*transpose=*/true);
  apply_d2(g, y, d2, /*transpose=*/true);
  return m1.cwiseProduct(d1) + m2.cwiseProduct(d2);
}

Vec apply_K_tilde(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y) {
  Vec d1, d2;
  apply_d1(g, y, d1);
  apply_d2(g, y, d2);
  return m1.cwiseProduct(d1) + m2.cwiseProduct(d2);
}

Vec apply_K_tilde_transpose(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y) {
  Vec t1 = m1.cwiseProduct(y);
  Vec t2 = m2.cwiseProduct(y);
  Vec out, tmp;
  apply_d1(g, t1, out, /*transpose=*/true);
  apply_d2(g, t2, tmp, /*transpose=*/true);
  out += tmp;
  return out;
}

Vec apply_L(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y, bool advection,
            bool transpose) {
  const double s = g.transport_scale();
  Vec k;
  if (!transpose)
    k = advection ? apply_K_tilde(g, m1, m2, y) : apply_K(g, m1, m2, y);
  else
    k = advection ? apply_K_tilde_transpose(g, m1, m2, y) : apply_K_transpose(g, m1, m2, y);
  return y + s * k;
}

SpMat L_matrix(const GridSpec& g, const Vec& m1, const Vec& m2, bool advection) {
  const int n = g.nodes();
  const double s = g.transport_scale();
  std::vector<Triplet> trips;
  trips.reserve(5 * n);
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i) {
      const int r = g.index(i, j);
      trips.emplace_back(r, r, 1.0);
      if (advection) {
        // row r of K~: m(r) * centred differences of y
        trips.emplace_back(r, g.index(i + 1, j), s * 0.5 * m1[r]);
        trips.emplace_back(r, g.index(i - 1, j), -s * 0.5 * m1[r]);
        trips.emplace_back(r, g.index(i, j + 1), s * 0.5 * m2[r]);
        trips.emplace_back(r, g.index(i, j - 1), -s * 0.5 * m2[r]);
      } else {
        // row r of K: differences of the fluxes m.*y at the neighbours
        const int e = g.index(i + 1, j), w = g.index(i - 1, j);
        const int nn = g.index(i, j + 1), ss = g.index(i, j - 1);
        trips.emplace_back(r, e, s * 0.5 * m1[e]);
        trips.emplace_back(r, w, -s * 0.5 * m1[w]);
        trips.emplace_back(r, nn, s * 0.5 * m2[nn]);
        trips.emplace_back(r, ss, -s * 0.5 * m2[ss]);
      }
    }
  SpMat L(n, n);
  L.setFromTriplets(trips.begin(), trips.end());
  return L;
}

void apply_A(const GridSpec& g, const Vec& m, const Vec& x, Vec& out, bool transpose,
             bool advection) {
  const int n = g.nodes();
  const int Nt = g.N_t;
  out.resize(n * Nt);
  Vec dt;
  for (int k = 1; k <= Nt; ++k) {
    const auto m1 = m.segment((k - 1) * 2 * n, n);
    const auto m2 = m.segment((k - 1) * 2 * n + n, n);
    const Vec xk = x.segment((k - 1) * n, n);
    out.segment((k - 1) * n, n) = apply_L(g, m1, m2, xk, advection, transpose);
    if (!transpose && k > 1) {
      apply_dt(g, x.segment((k - 2) * n, n), dt);
      out.segment((k - 1) * n, n) -= dt;
    }
    if (transpose && k < Nt) {
      apply_dt(g, x.segment(k * n, n), dt);
      out.segment((k - 1) * n, n) -= dt;
    }
  }
}

Vec apply_A(const GridSpec& g, const Vec& m, const Vec& x, bool transpose, bool advection) {
  Vec out;
  apply_A(g, m, x, out, transpose, advection);
  return out;
}

void apply_coupling(const GridSpec& g, const Vec& y, const Vec& xm, Vec& out, bool advection) {
  const int n = g.nodes();
  const int Nt = g.N_t;
  const double s = g.transport_scale();
  out.resize(n * Nt);
  for (int k = 1; k <= Nt; ++k) {
    const Vec yk = y.segment((k - 1) * n, n);
    const auto sm1 = xm.segment((k - 1) * 2 * n, n);
    const auto sm2 = xm.segment((k - 1) * 2 * n + n, n);
    if (!advection) {
      // J(y) s_m = (tau/2h) (D1(y.*s_m1) + D2(y.*s_m2))
      Vec t1 = yk.cwiseProduct(sm1), t2 = yk.cwiseProduct(sm2);
      Vec a, b;
      apply_d1(g, t1, a);
      apply_d2(g, t2, b);
      out.segment((k - 1) * n, n) = s * (a + b);
    } else {
      // G~(y)^T s_m = (tau/2h) ((D1 y).*s_m1 + (D2 y).*s_m2)
      Vec d1, d2;
      apply_d1(g, yk, d1);
      apply_d2(g, yk, d2);
      out.segment((k - 1) * n, n) = s * (d1.cwiseProduct(sm1) + d2.cwiseProduct(sm2));
    }
  }
}

void apply_coupling_transpose(const GridSpec& g, const Vec& y, const Vec& xp, Vec& out,
                              bool advection) {
  const int n = g.nodes();
  const int Nt = g.N_t;
  const double s = g.transport_scale();
  out.resize(2 * n * Nt);
  for (int k = 1; k <= Nt; ++k) {
    const Vec yk = y.segment((k - 1) * n, n);
    const Vec pk = xp.segment((k - 1) * n, n);
    if (!advection) {
      // J(y)^T s_p = (tau/2h) [y.*(D1^T s_p); y.*(D2^T s_p)]
      Vec d1, d2;
      apply_d1(g, pk, d1, /*transpose=*/true);
      apply_d2(g, pk, d2, /*transpose=*/true);
      out.segment((k - 1) * 2 * n, n) = s * yk.cwiseProduct(d1);
      out.segment((k - 1) * 2 * n + n, n) = s * yk.cwiseProduct(d2);
    } else {
      // G~(y) s_p = (tau/2h) [(D1 y).*s_p; (D2 y).*s_p]
      Vec d1, d2;
      apply_d1(g, yk, d1);
      apply_d2(g, yk, d2);
      out.segment((k - 1) * 2 * n, n) = s * d1.cwiseProduct(pk);
      out.segment((k - 1) * 2 * n + n, n) = s * d2.cwiseProduct(pk);
    }
  }
}

Vec apply_coupling(const GridSpec& g, const Vec& y, const Vec& xm, bool advection) {
  Vec out;
  apply_coupling(g, y, xm, out, advection);
  return out;
}

Vec apply_coupling_transpose(const GridSpec& g, const Vec& y, const Vec& xp, bool advection) {
  Vec out;
  apply_coupling_transpose(g, y, xp, out, advection);
  return out;
}

void apply_Gp(const GridSpec& g, const Vec& p, const Vec& xm, Vec& out) {
  const int n = g.nodes();
  const int Nt = g.N_t;
  const double s = g.transport_scale();
  out.resize(n * Nt);
  for (int k = 1; k <= Nt; ++k) {
    const Vec pk = p.segment((k - 1) * n, n);
    Vec d1, d2;
    apply_d1(g, pk, d1, /*transpose=*/true);
    apply_d2(g, pk, d2, /*transpose=*/true);
    const auto sm1 = xm.segment((k - 1) * 2 * n, n);
    const auto sm2 = xm.segment((k - 1) * 2 * n + n, n);
    out.segment((k - 1) * n, n) = s * (d1.cwiseProduct(sm1) + d2.cwiseProduct(sm2));
  }
}

void apply_Gp_transpose(const GridSpec& g, const Vec& p, const Vec& xy, Vec& out) {
  const int n = g.nodes();
  const int Nt = g.N_t;
  const double s = g.transport_scale();
  out.resize(2 * n * Nt);
  for (int k = 1; k <= Nt; ++k) {
    const Vec pk = p.segment((k - 1) * n, n);
    Vec d1, d2;
    apply_d1(g, pk, d1, /*transpose=*/true);
    apply_d2(g, pk, d2, /*transpose=*/true);
    const Vec sy = xy.segment((k - 1) * n, n);
    out.segment((k - 1) * 2 * n, n) = s * d1.cwiseProduct(sy);
    out.segment((k - 1) * 2 * n + n, n) = s * d2.cwiseProduct(sy);
  }
}

Vec apply_Gp(const GridSpec& g, const Vec& p, const Vec& xm) {
  Vec out;
  apply_Gp(g, p, xm, out);
  return out;
}

Vec apply_Gp_transpose(const GridSpec& g, const Vec& p, const Vec& xy) {
  Vec out;
  apply_Gp_transpose(g, p, xy, out);
  return out;
}

Vec forward_solve(const GridSpec& g, const Vec& m, const Vec& y0, bool advection) {
  const int n = g.nodes();
  const int Nt = g.N_t;
  Vec y(n * Nt);
  Vec prev = y0;
  Eigen::SparseLU<SpMat> lu;
  for (int k = 1; k <= Nt; ++k) {
    const auto m1 = m.segment((k - 1) * 2 * n, n);
    const auto m2 = m.segment((k - 1) * 2 * n + n, n);
    SpMat L = L_matrix(g, m1, m2, advection);
    lu.compute(L);
    if (lu.info() != Eigen::Success) throw SingularStepSystem(k);
    Vec rhs;
    apply_dt(g, prev, rhs);
    Vec yk = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !yk.allFinite()) throw SingularStepSystem(k);
    y.segment((k - 1) * n, n) = yk;
    prev = std::move(yk);
  }
  return y;
}

Vec constraint_rhs(const GridSpec& g, const Vec& y0) {
  Vec d = Vec::Zero(g.space_time_nodes());
  Vec head;
  apply_dt(g, y0, head);
  d.head(g.nodes()) = head;
  return d;
}

struct BlockBidiagonalSolver::Impl {
  GridSpec grid;
  bool upper = false;
  std::vector<std::unique_ptr<Eigen::SparseLU<SpMat>>> factors;
};

BlockBidiagonalSolver::BlockBidiagonalSolver(const GridSpec& g, std::vector<SpMat> diag_blocks,
                                             bool upper)
    : impl_(std::make_unique<Impl>()) {
  impl_->grid = g;
  impl_->upper = upper;
  impl_->factors.reserve(diag_blocks.size());
  for (std::size_t k = 0; k < diag_blocks.size(); ++k) {
    auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
    lu->compute(diag_blocks[k]);
    if (lu->info() != Eigen::Success) throw SingularStepSystem(static_cast<int>(k + 1));
    impl_->factors.push_back(std::move(lu));
  }
}

BlockBidiagonalSolver::~BlockBidiagonalSolver() = default;
BlockBidiagonalSolver::BlockBidiagonalSolver(BlockBidiagonalSolver&&) noexcept = default;
BlockBidiagonalSolver& BlockBidiagonalSolver::operator=(BlockBidiagonalSolver&&) noexcept =
    default;

void BlockBidiagonalSolver::solve(Vec& x) const {
  const GridSpec& g = impl_->grid;
  const int n = g.nodes();
  const int Nt = static_cast<int>(impl_->factors.size());
  Vec dt;
  if (!impl_->upper) {
    for (int k = 1; k <= Nt; ++k) {
      Vec rhs = x.segment((k - 1) * n, n);
      if (k > 1) {
        apply_dt(g, x.segment((k - 2) * n, n), dt);
        rhs += dt;
      }
      x.segment((k - 1) * n, n) = impl_->factors[k - 1]->solve(rhs);
    }
  } else {
    for (int k = Nt; k >= 1; --k) {
      Vec rhs = x.segment((k - 1) * n, n);
      if (k < Nt) {
        apply_dt(g, x.segment(k * n, n), dt);
        rhs += dt;
      }
      x.segment((k - 1) * n, n) = impl_->factors[k - 1]->solve(rhs);
    }
  }
}

Vec BlockDiagonalOperator::apply(const Vec& x, bool transpose) const {
  Vec out(x.size());
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    const Eigen::Index r = transpose ? b.cols() : b.rows();
    const Eigen::Index c = transpose ? b.rows() : b.cols();
    if (transpose)
      out.segment(off, r) = b.transpose() * x.segment(off, c);
    else
      out.segment(off, r) = b * x.segment(off, c);
    off += r;
  }
  return out;
}

Vec BlockBidiagonalOperator::apply(const Vec& x, bool transpose) const {
  const int Nt = static_cast<int>(diagonal_blocks.size());
  const Eigen::Index n = diagonal_blocks.empty() ? 0 : diagonal_blocks[0].rows();
  Vec out(n * Nt);
  for (int k = 0; k < Nt; ++k) {
    if (!transpose) {
      out.segment(k * n, n) = diagonal_blocks[k] * x.segment(k * n, n);
      if (k > 0) out.segment(k * n, n) -= subdiagonal_block * x.segment((k - 1) * n, n);
    } else {
      out.segment(k * n, n) = diagonal_blocks[k].transpose() * x.segment(k * n, n);
      if (k < Nt - 1)
        out.segment(k * n, n) -= subdiagonal_block.transpose() * x.segment((k + 1) * n, n);
    }
  }
  return out;
}

}  // namespace transflow
