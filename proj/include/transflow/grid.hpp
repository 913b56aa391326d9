#pragma once

#include "transflow/common.hpp"

namespace transflow {

// Periodic 2-D grid on [0,1)^2 with N_t time-steps on [0,1].
// Node (i,j) lives at (i*h, j*h); vectors are stored with i fastest:
// index(i,j) = j*n_x + i, all index arithmetic wraps modulo n_x / n_y.
struct GridSpec {
  int n_x = 0;
  int n_y = 0;
  int N_t = 0;
  double h = 0.0;
  double tau = 0.0;

  GridSpec() = default;
  GridSpec(int nx, int ny, int nt) : GridSpec(nx, ny, nt, 1.0 / nx, 1.0 / nt) {}
  GridSpec(int nx, int ny, int nt, double h_, double tau_)
      : n_x(nx), n_y(ny), N_t(nt), h(h_), tau(tau_) {
    if (n_x < 2 || n_y < 2 || N_t < 1 || !(h > 0.0) || !(tau > 0.0))
      throw ConfigError("invalid grid: need n_x,n_y >= 2, N_t >= 1, h,tau > 0");
  }

  int nodes() const { return n_x * n_y; }
  int space_time_nodes() const { return nodes() * N_t; }

  int index(int i, int j) const {
    i %= n_x;
    if (i < 0) i += n_x;
    j %= n_y;
    if (j < 0) j += n_y;
    return j * n_x + i;
  }

  // Grouped advection factor tau/(2h) shared by all transport stencils.
  double transport_scale() const { return tau / (2.0 * h); }

  bool operator==(const GridSpec&) const = default;
};

// Scalar grid function at one time level.
struct Field {
  GridSpec grid;
  int time_index = 0;
  Vec values;

  Field() = default;
  Field(const GridSpec& g, int k) : grid(g), time_index(k), values(Vec::Zero(g.nodes())) {}
  Field(const GridSpec& g, int k, Vec v) : grid(g), time_index(k), values(std::move(v)) {
    if (values.size() != g.nodes()) throw DimensionMismatch("field length != n_x*n_y");
  }
};

// Velocity pair at one time-step.
struct VelocityStep {
  Vec m1;
  Vec m2;
};

// Stacked Newton iterate: y, m = (m1,m2), p over time-steps 1..N_t plus the
// initial image y0. Step k (1-based) of y/p lives at segment((k-1)*n, n);
// step k of m at segment((k-1)*2n, 2n) ordered [m1; m2].
struct SpaceTimeState {
  GridSpec grid;
  Vec y0;  // n
  Vec y;   // n*N_t
  Vec m;   // 2n*N_t
  Vec p;   // n*N_t

  SpaceTimeState() = default;
  explicit SpaceTimeState(const GridSpec& g, Vec y0_init)
      : grid(g),
        y0(std::move(y0_init)),
        y(Vec::Zero(g.space_time_nodes())),
        m(Vec::Zero(2 * g.space_time_nodes())),
        p(Vec::Zero(g.space_time_nodes())) {
    if (y0.size() != g.nodes()) throw DimensionMismatch("y0 length != n_x*n_y");
  }

  auto y_step(int k) { return y.segment((k - 1) * grid.nodes(), grid.nodes()); }
  auto y_step(int k) const { return y.segment((k - 1) * grid.nodes(), grid.nodes()); }
  auto p_step(int k) { return p.segment((k - 1) * grid.nodes(), grid.nodes()); }
  auto p_step(int k) const { return p.segment((k - 1) * grid.nodes(), grid.nodes()); }
  auto m1_step(int k) { return m.segment((k - 1) * 2 * grid.nodes(), grid.nodes()); }
  auto m1_step(int k) const { return m.segment((k - 1) * 2 * grid.nodes(), grid.nodes()); }
  auto m2_step(int k) { return m.segment((k - 1) * 2 * grid.nodes() + grid.nodes(), grid.nodes()); }
  auto m2_step(int k) const {
    return m.segment((k - 1) * 2 * grid.nodes() + grid.nodes(), grid.nodes());
  }

  // Stacks [y; m; p] in the saddle-system ordering.
  Vec stacked() const;
  void add_scaled(const Vec& step, double alpha);  // [y;m;p] += alpha*step
};

// Centred difference in the x1 (i) direction: g_{i,j} = (f_{i+1,j} - f_{i-1,j})/2
// with periodic wrap. The 1/h part of the derivative is applied by callers
// through GridSpec::transport_scale(). transpose applies D1^T = -D1.
void apply_d1(const GridSpec& g, const Vec& f, Vec& out, bool transpose = false);
void apply_d2(const GridSpec& g, const Vec& f, Vec& out, bool transpose = false);

// Four-point averaging stencil: g_{i,j} = (f_{i+1,j}+f_{i-1,j}+f_{i,j+1}+f_{i,j-1})/4.
// Symmetric, so no transpose flag.
void apply_dt(const GridSpec& g, const Vec& f, Vec& out);

Vec apply_d1(const GridSpec& g, const Vec& f, bool transpose = false);
Vec apply_d2(const GridSpec& g, const Vec& f, bool transpose = false);
Vec apply_dt(const GridSpec& g, const Vec& f);

Field apply_d1(const Field& f);
Field apply_d2(const Field& f);
Field apply_dt(const Field& f);

// Sparse materialisations, used by tests and preconditioner factorisations.
SpMat d1_matrix(const GridSpec& g);
SpMat d2_matrix(const GridSpec& g);
SpMat dt_matrix(const GridSpec& g);

}  // namespace transflow
