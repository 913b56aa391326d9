#include "transflow/kkt.hpp"

namespace transflow {

Mat materialize(const LinOp& op) {
  Mat a(op.rows(), op.cols());
  Vec e = Vec::Zero(op.cols());
  Vec col;
  for (Eigen::Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    a.col(j) = col;
    e[j] = 0.0;
  }
  return a;
}

SpMat control_mass_matrix(const GridSpec& g, QOperator q) {
  const int n = g.nodes();
  const double h2 = g.h * g.h;
  std::vector<Triplet> trips;
  if (q == QOperator::Identity) {
    trips.reserve(n);
    for (int r = 0; r < n; ++r) trips.emplace_back(r, r, h2);
  } else {
    // h^2 * ((1/h^2) five-point periodic Laplacian) + 1e-8 h^2 I
    trips.reserve(5 * n);
    for (int j = 0; j < g.n_y; ++j)
      for (int i = 0; i < g.n_x; ++i) {
        const int r = g.index(i, j);
        trips.emplace_back(r, r, 4.0 + 1e-8 * h2);
        trips.emplace_back(r, g.index(i + 1, j), -1.0);
        trips.emplace_back(r, g.index(i - 1, j), -1.0);
        trips.emplace_back(r, g.index(i, j + 1), -1.0);
        trips.emplace_back(r, g.index(i, j - 1), -1.0);
      }
  }
  SpMat W(n, n);
  W.setFromTriplets(trips.begin(), trips.end());
  return W;
}

Vec ObjectiveData::apply_Mcal(const Vec& xm) const {
  const int n = grid.nodes();
  Vec out(xm.size());
  for (Eigen::Index off = 0; off < xm.size(); off += n)
    out.segment(off, n) = W * xm.segment(off, n);
  return out;
}

Vec ObjectiveData::solve_Mcal(const Vec& xm) const {
  const int n = grid.nodes();
  Vec out(xm.size());
  if (W_diagonal) {
    const double w = mass_weight();
    out = xm / w;
  } else {
    for (Eigen::Index off = 0; off < xm.size(); off += n)
      out.segment(off, n) = W_solver->solve(xm.segment(off, n));
  }
  return out;
}

Vec ObjectiveData::Mcal_diag() const {
  const int n = grid.nodes();
  Vec d = W.diagonal();
  Vec out(2 * n * grid.N_t);
  for (int b = 0; b < 2 * grid.N_t; ++b) out.segment(b * n, n) = d;
  return out;
}

ObjectiveData make_objective_data(const GridSpec& g, const ProblemParams& params, Vec y1,
                                  Vec ybar) {
  params.validate();
  if (y1.size() != g.nodes()) throw DimensionMismatch("y1 length != n_x*n_y");
  if (params.delta > 0.0 && ybar.size() != g.space_time_nodes())
    throw DimensionMismatch("ybar must hold one field per time-step when delta > 0");
  ObjectiveData data;
  data.grid = g;
  data.y1 = std::move(y1);
  data.ybar = std::move(ybar);
  data.W = control_mass_matrix(g, params.q_operator);
  data.W_diagonal = (params.q_operator == QOperator::Identity);
  data.q_scale = (params.formulation == Formulation::ContinuityDTO) ? g.tau * g.h * g.h : 1.0;
  if (!data.W_diagonal) {
    data.W_solver = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    data.W_solver->compute(data.W);
    if (data.W_solver->info() != Eigen::Success)
      throw NumericalError("control mass factorisation failed");
  }
  return data;
}

double objective(const SpaceTimeState& state, const ObjectiveData& data,
                 const ProblemParams& params) {
  const GridSpec& g = state.grid;
  const double h2 = data.mass_weight();
  const Vec misfit = state.y_step(g.N_t) - data.y1;
  double val = 0.5 / params.gamma * h2 * misfit.squaredNorm();
  if (params.delta > 0.0) {
    const Vec dev = state.y - data.ybar;
    val += 0.5 * params.delta * g.tau * h2 * dev.squaredNorm();
  }
  val += 0.5 * params.beta * g.tau * state.m.dot(data.apply_Mcal(state.m));
  return val;
}

Vec kkt_residual(const SpaceTimeState& state, const ObjectiveData& data,
                 const ProblemParams& params) {
  params.validate();
  const GridSpec& g = state.grid;
  const int n = g.nodes();
  const int N = g.space_time_nodes();
  const bool adv = params.advection();
  const double q = data.q_scale;
  const double h2 = data.mass_weight();

  Vec r(4 * N);
  // grad_y L = gamma^{-1} M_Nt (y - y_{0,1}) + delta tau Mbar (y - ybar) + q A^T p
  Vec ry = q * apply_A(g, state.m, state.p, /*transpose=*/true, adv);
  ry.segment((g.N_t - 1) * n, n) += (h2 / params.gamma) * (state.y_step(g.N_t) - data.y1);
  if (params.delta > 0.0) ry += params.delta * g.tau * h2 * (state.y - data.ybar);
  r.segment(0, N) = ry;

  // grad_m L = beta tau Mcal m + q C(y)^T p
  r.segment(N, 2 * N) = params.beta * g.tau * data.apply_Mcal(state.m) +
                        q * apply_coupling_transpose(g, state.y, state.p, adv);

  // constraint row: q (A y - d)
  r.segment(3 * N, N) =
      q * (apply_A(g, state.m, state.y, /*transpose=*/false, adv) - constraint_rhs(g, state.y0));
  return r;
}

SaddleOperator::SaddleOperator(const SpaceTimeState& state, ObjectiveData data,
                               ProblemParams params)
    : grid_(state.grid),
      data_(std::move(data)),
      params_(params),
      y_(state.y),
      m_(state.m),
      p_(state.p) {
  params_.validate();
  if (data_.grid != grid_) throw DimensionMismatch("objective data grid mismatch");
}

Vec SaddleOperator::theta_step_values() const {
  Vec v = Vec::Zero(grid_.N_t);
  const double h2 = data_.mass_weight();
  if (params_.delta > 0.0) v.array() += params_.delta * grid_.tau * h2;
  v[grid_.N_t - 1] += h2 / params_.gamma;
  return v;
}

void SaddleOperator::apply(const Vec& x, Vec& out) const {
  const GridSpec& g = grid_;
  const int n = g.nodes();
  const int N = g.space_time_nodes();
  if (x.size() != 4 * N) throw DimensionMismatch("saddle operand length != 4*n*N_t");
  const bool adv = params_.advection();
  const bool full = params_.newton_mode == NewtonMode::FullNewton;
  const double q = data_.q_scale;

  const Vec xy = x.segment(0, N);
  const Vec xm = x.segment(N, 2 * N);
  const Vec xp = x.segment(3 * N, N);
  out.resize(4 * N);

  // y-row
  Vec oy = q * apply_A(g, m_, xp, /*transpose=*/true, adv);
  const Vec theta = theta_step_values();
  for (int k = 1; k <= g.N_t; ++k)
    if (theta[k - 1] != 0.0) oy.segment((k - 1) * n, n) += theta[k - 1] * xy.segment((k - 1) * n, n);
  if (full) oy += apply_Gp(g, p_, xm);
  out.segment(0, N) = oy;

  // m-row
  Vec om =
      params_.beta * g.tau * data_.apply_Mcal(xm) + q * apply_coupling_transpose(g, y_, xp, adv);
  if (full) om += apply_Gp_transpose(g, p_, xy);
  out.segment(N, 2 * N) = om;

  // p-row
  out.segment(3 * N, N) =
      q * (apply_A(g, m_, xy, /*transpose=*/false, adv) + apply_coupling(g, y_, xm, adv));
}

SaddleSystem assemble_system(const SpaceTimeState& state, const ObjectiveData& data,
                             const ProblemParams& params) {
  SaddleSystem sys;
  sys.op = std::make_shared<SaddleOperator>(state, data, params);
  sys.rhs = -kkt_residual(state, data, params);
  return sys;
}

}  // namespace transflow
