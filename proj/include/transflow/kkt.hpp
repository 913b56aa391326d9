#pragma once

#include <memory>

#include "transflow/linop.hpp"
#include "transflow/transport.hpp"

namespace transflow {

enum class QOperator { Identity, Gradient };
enum class Formulation { ContinuityDTO, ContinuityOTD, AdvectionDTO };
enum class NewtonMode { GaussNewton, FullNewton };

struct ProblemParams {
  double beta = 1e-2;
  double gamma = 1.0;
  double delta = 0.0;
  QOperator q_operator = QOperator::Identity;
  Formulation formulation = Formulation::ContinuityDTO;
  NewtonMode newton_mode = NewtonMode::GaussNewton;

  void validate() const {
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (delta < 0.0) throw ConfigError("delta must be nonnegative");
    if (newton_mode == NewtonMode::FullNewton && formulation != Formulation::ContinuityOTD)
      throw IncompatibleMode("full Newton is only derived for the continuity OTD formulation");
  }

  bool advection() const { return formulation == Formulation::AdvectionDTO; }
};

// Control-energy block W: h^2 I for Q = Identity, h^2 * periodic five-point
// Laplacian plus a 1e-8 h^2 shift for Q = Gradient (the shift keeps W
// invertible; the periodic Laplacian annihilates constants).
SpMat control_mass_matrix(const GridSpec& g, QOperator q);

// Fixed data of the objective: target image, optional desired trajectory,
// the control mass W and the multiplier scaling Q of the formulation.
struct ObjectiveData {
  GridSpec grid;
  Vec y1;    // n
  Vec ybar;  // n*N_t; consulted only when delta > 0
  SpMat W;
  bool W_diagonal = true;
  double q_scale = 1.0;  // tau h^2 for the DTO continuity rows, 1 otherwise
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> W_solver;  // non-null iff !W_diagonal

  double mass_weight() const { return grid.h * grid.h; }  // M = h^2 I

  // blkdiag(W,...,W) on the stacked velocity (one W per component per step).
  Vec apply_Mcal(const Vec& xm) const;
  Vec solve_Mcal(const Vec& xm) const;
  Vec Mcal_diag() const;  // diag(W) replicated over the stacked layout
};

ObjectiveData make_objective_data(const GridSpec& g, const ProblemParams& params, Vec y1,
                                  Vec ybar = Vec());

// Discrete objective
//   (1/2gamma) (y^(Nt)-y1)^T M (y^(Nt)-y1) + (delta tau/2) (y-ybar)^T Mbar (y-ybar)
//   + (beta tau/2) m^T Mcal m,   M = h^2 I, Mbar = blkdiag(h^2 I).
double objective(const SpaceTimeState& state, const ObjectiveData& data,
                 const ProblemParams& params);

// First-order conditions stacked as [grad_y L; grad_m L; Q(A y - d)].
Vec kkt_residual(const SpaceTimeState& state, const ObjectiveData& data,
                 const ProblemParams& params);

// The 3x3 saddle-point Newton / Gauss-Newton operator, frozen at a state
// snapshot. Gauss-Newton drops the G(p) blocks; full Newton (continuity OTD
// only) keeps them.
class SaddleOperator final : public LinOp {
 public:
  SaddleOperator(const SpaceTimeState& state, ObjectiveData data, ProblemParams params);

  Eigen::Index rows() const override { return 4 * grid_.space_time_nodes(); }
  Eigen::Index cols() const override { return rows(); }
  void apply(const Vec& x, Vec& out) const override;

  const GridSpec& grid() const { return grid_; }
  const ProblemParams& params() const { return params_; }
  const ObjectiveData& data() const { return data_; }
  const Vec& y() const { return y_; }
  const Vec& m() const { return m_; }
  const Vec& p() const { return p_; }

  // Diagonal of the (1,1) y-block gamma^{-1} M_Nt + delta tau Mbar as one
  // number per time-step (each step block is a scaled identity).
  Vec theta_step_values() const;

 private:
  GridSpec grid_;
  ObjectiveData data_;
  ProblemParams params_;
  Vec y_, m_, p_;  // frozen iterate
};

struct SaddleSystem {
  std::shared_ptr<const SaddleOperator> op;
  Vec rhs;  // negated KKT residual
};

SaddleSystem assemble_system(const SpaceTimeState& state, const ObjectiveData& data,
                             const ProblemParams& params);

}  // namespace transflow
