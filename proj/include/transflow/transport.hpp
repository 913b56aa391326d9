#pragma once

#include <memory>
#include <vector>

#include "transflow/grid.hpp"

namespace transflow {

// Continuity-form transport term K(m) y = D1(m1.*y) + D2(m2.*y).
// No tau/(2h) scaling; callers apply GridSpec::transport_scale().
Vec apply_K(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y);
// K(m)^T y = m1.*(D1^T y) + m2.*(D2^T y).
Vec apply_K_transpose(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y);

// Advection-form term K~(m) y = m1.*(D1 y) + m2.*(D2 y), and its transpose
// K~(m)^T y = D1^T(m1.*y) + D2^T(m2.*y).
Vec apply_K_tilde(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y);
Vec apply_K_tilde_transpose(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y);

// One implicit Lax-Friedrichs step matrix L(m) = I + (tau/2h) K(m)
// (or L~(m) = I + (tau/2h) K~(m) for the advection form).
Vec apply_L(const GridSpec& g, const Vec& m1, const Vec& m2, const Vec& y,
            bool advection = false, bool transpose = false);
SpMat L_matrix(const GridSpec& g, const Vec& m1, const Vec& m2, bool advection = false);

// All-at-once constraint operator on stacked y (n*N_t): block lower bidiagonal
// with diagonal blocks L(m^(k)) and subdiagonal -D_t. transpose applies the
// block upper bidiagonal adjoint. m is the stacked velocity (2n*N_t).
void apply_A(const GridSpec& g, const Vec& m, const Vec& x, Vec& out, bool transpose = false,
             bool advection = false);
Vec apply_A(const GridSpec& g, const Vec& m, const Vec& x, bool transpose = false,
            bool advection = false);

// Control-to-state coupling block of the constraint row, (tau/2h)-scaled:
//   continuity: J(y^(j)) s_m = (tau/2h) [D1 D2] blkdiag(diag y, diag y) s_m
//   advection:  (tau/2h) [diag(D1 y) diag(D2 y)] s_m
// apply_coupling maps the stacked velocity perturbation (2n*N_t) to a stacked
// field (n*N_t); apply_coupling_transpose maps the other way.
void apply_coupling(const GridSpec& g, const Vec& y, const Vec& xm, Vec& out,
                    bool advection = false);
void apply_coupling_transpose(const GridSpec& g, const Vec& y, const Vec& xp, Vec& out,
                              bool advection = false);
Vec apply_coupling(const GridSpec& g, const Vec& y, const Vec& xm, bool advection = false);
Vec apply_coupling_transpose(const GridSpec& g, const Vec& y, const Vec& xp,
                             bool advection = false);

// Multiplier coupling of the full Newton system (continuity OTD):
//   G(p^(k)) s_m = (tau/2h) [diag(D1^T p) diag(D2^T p)] s_m   (field valued)
// and its transpose acting on a stacked field.
void apply_Gp(const GridSpec& g, const Vec& p, const Vec& xm, Vec& out);
void apply_Gp_transpose(const GridSpec& g, const Vec& p, const Vec& xy, Vec& out);
Vec apply_Gp(const GridSpec& g, const Vec& p, const Vec& xm);
Vec apply_Gp_transpose(const GridSpec& g, const Vec& p, const Vec& xy);

// Discretised adjoint operator B(m) = A(m)^T (see the D1^T = -D1 identity).
inline Vec apply_B(const GridSpec& g, const Vec& m, const Vec& x, bool advection = false) {
  return apply_A(g, m, x, /*transpose=*/true, advection);
}

// Solves L(m^(k+1)) y^(k+1) = D_t y^(k), k = 0..N_t-1, by sparse direct
// factorisation of each step matrix. Returns the stacked y (n*N_t).
// Throws SingularStepSystem(k) if a factorisation fails.
Vec forward_solve(const GridSpec& g, const Vec& m, const Vec& y0, bool advection = false);

// Constraint right-hand side d = [D_t y0; 0; ...; 0] (both forms; the
// advection variant uses the same time-stepping recurrence).
Vec constraint_rhs(const GridSpec& g, const Vec& y0);

// Per-time-step sparse factor cache for the bidiagonal substitutions used by
// preconditioners. Blocks are factorised once per Newton step.
class BlockBidiagonalSolver {
 public:
  // Lower: (diag_k) x_k = b_k + D_t x_{k-1}; upper: (diag_k)^T-style blocks
  // supplied explicitly, solved backwards with the -D_t^T coupling.
  BlockBidiagonalSolver(const GridSpec& g, std::vector<SpMat> diag_blocks, bool upper);
  ~BlockBidiagonalSolver();
  BlockBidiagonalSolver(BlockBidiagonalSolver&&) noexcept;
  BlockBidiagonalSolver& operator=(BlockBidiagonalSolver&&) noexcept;

  // Solves the bidiagonal system (diag blocks on the diagonal, -D_t coupling
  // below for lower / above for upper) against a stacked vector in place.
  void solve(Vec& x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Generic block-diagonal and block-bidiagonal sparse operators (spec types
// BlockDiagonalOperator / BlockBidiagonalOperator); used where an explicit
// matrix representation is more convenient than the stencil path.
struct BlockDiagonalOperator {
  std::vector<SpMat> blocks;
  Vec apply(const Vec& x, bool transpose = false) const;
};

struct BlockBidiagonalOperator {
  std::vector<SpMat> diagonal_blocks;
  SpMat subdiagonal_block;  // applied with a minus sign, one block below the diagonal
  Vec apply(const Vec& x, bool transpose = false) const;
};

}  // namespace transflow
