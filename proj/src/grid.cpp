#include "transflow/grid.hpp"

namespace transflow {

Vec SpaceTimeState::stacked() const {
  Vec z(4 * grid.space_time_nodes());
  const int N = grid.space_time_nodes();
  z.segment(0, N) = y;
  z.segment(N, 2 * N) = m;
  z.segment(3 * N, N) = p;
  return z;
}

void SpaceTimeState::add_scaled(const Vec& step, double alpha) {
  const int N = grid.space_time_nodes();
  if (step.size() != 4 * N) throw DimensionMismatch("step length != 4*n*N_t");
  y += alpha * step.segment(0, N);
  m += alpha * step.segment(N, 2 * N);
  p += alpha * step.segment(3 * N, N);
}

void apply_d1(const GridSpec& g, const Vec& f, Vec& out, bool transpose) {
  const int nx = g.n_x, ny = g.n_y;
  out.resize(f.size());
  const double s = transpose ? -0.5 : 0.5;
  for (int j = 0; j < ny; ++j) {
    const int row = j * nx;
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1 == nx) ? 0 : i + 1;
      const int im = (i == 0) ? nx - 1 : i - 1;
      out[row + i] = s * (f[row + ip] - f[row + im]);
    }
  }
}

void apply_d2(const GridSpec& g, const Vec& f, Vec& out, bool transpose) {
  const int nx = g.n_x, ny = g.n_y;
  out.resize(f.size());
  const double s = transpose ? -0.5 : 0.5;
  for (int j = 0; j < ny; ++j) {
    const int jp = (j + 1 == ny) ? 0 : j + 1;
    const int jm = (j == 0) ? ny - 1 : j - 1;
    for (int i = 0; i < nx; ++i) {
      out[j * nx + i] = s * (f[jp * nx + i] - f[jm * nx + i]);
    }
  }
}

void apply_dt(const GridSpec& g, const Vec& f, Vec& out) {
  const int nx = g.n_x, ny = g.n_y;
  out.resize(f.size());
  for (int j = 0; j < ny; ++j) {
    const int jp = (j + 1 == ny) ? 0 : j + 1;
    const int jm = (j == 0) ? ny - 1 : j - 1;
    for (int i = 0; i < nx; ++i) {
      const int ip = (i + 1 == nx) ? 0 : i + 1;
      const int im = (i == 0) ? nx - 1 : i - 1;
      out[j * nx + i] =
          0.25 * (f[j * nx + ip] + f[j * nx + im] + f[jp * nx + i] + f[jm * nx + i]);
    }
  }
}

Vec apply_d1(const GridSpec& g, const Vec& f, bool transpose) {
  Vec out;
  apply_d1(g, f, out, transpose);
  return out;
}

Vec apply_d2(const GridSpec& g, const Vec& f, bool transpose) {
  Vec out;
  apply_d2(g, f, out, transpose);
  return out;
}

Vec apply_dt(const GridSpec& g, const Vec& f) {
  Vec out;
  apply_dt(g, f, out);
  return out;
}

Field apply_d1(const Field& f) { return Field(f.grid, f.time_index, apply_d1(f.grid, f.values)); }
Field apply_d2(const Field& f) { return Field(f.grid, f.time_index, apply_d2(f.grid, f.values)); }
Field apply_dt(const Field& f) { return Field(f.grid, f.time_index, apply_dt(f.grid, f.values)); }

SpMat d1_matrix(const GridSpec& g) {
  std::vector<Triplet> trips;
  trips.reserve(2 * g.nodes());
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i) {
      const int r = g.index(i, j);
      trips.emplace_back(r, g.index(i + 1, j), 0.5);
      trips.emplace_back(r, g.index(i - 1, j), -0.5);
    }
  SpMat D(g.nodes(), g.nodes());
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

SpMat d2_matrix(const GridSpec& g) {
  std::vector<Triplet> trips;
  trips.reserve(2 * g.nodes());
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i) {
      const int r = g.index(i, j);
      trips.emplace_back(r, g.index(i, j + 1), 0.5);
      trips.emplace_back(r, g.index(i, j - 1), -0.5);
    }
  SpMat D(g.nodes(), g.nodes());
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

SpMat dt_matrix(const GridSpec& g) {
  std::vector<Triplet> trips;
  trips.reserve(4 * g.nodes());
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i) {
      const int r = g.index(i, j);
      trips.emplace_back(r, g.index(i + 1, j), 0.25);
      trips.emplace_back(r, g.index(i - 1, j), 0.25);
      trips.emplace_back(r, g.index(i, j + 1), 0.25);
      trips.emplace_back(r, g.index(i, j - 1), 0.25);
    }
  SpMat D(g.nodes(), g.nodes());
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

}  // namespace transflow
