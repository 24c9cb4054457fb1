#pragma once

#include <cstddef>
#include <vector>

#include "scalesep/field.hpp"
#include "scalesep/parallel.hpp"

namespace scalesep::kernels {

// The discrete functionals all reduce to sweeps over grid cells: each cell
// contributes through its corner-average value and its forward-difference
// gradient. The sweeps below exist in a serial reference version and an
// OpenMP version; the dispatching entry point picks one at runtime.

struct CellGeometry {
  int n = 0, m = 0;
  int dims[kMaxDim];             // cells per axis
  std::size_t strides[kMaxDim];  // node strides
  std::size_t corner_off[1 << kMaxDim];
  double inv_h[kMaxDim];
  double cell_vol = 1;
  std::size_t cell_total = 1;

  explicit CellGeometry(const GridField& u) {
    n = u.n;
    m = u.m;
    std::size_t s = 1;
    for (int i = n - 1; i >= 0; --i) {
      strides[i] = s;
      s *= u.counts[i];
    }
    for (int i = 0; i < n; ++i) {
      dims[i] = u.counts[i] - 1;
      cell_total *= dims[i];
      inv_h[i] = 1.0 / u.spacing(i);
      cell_vol *= u.spacing(i);
    }
    for (int c = 0; c < (1 << n); ++c) {
      std::size_t off = 0;
      for (int i = 0; i < n; ++i)
        if ((c >> i) & 1) off += strides[i];
      corner_off[c] = off;
    }
  }

  void cell_index(std::size_t flat, int* idx) const {
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(flat % dims[i]);
      flat /= dims[i];
    }
  }
  std::size_t base_node(const int* idx) const {
    std::size_t f = 0;
    for (int i = 0; i < n; ++i) f += std::size_t(idx[i]) * strides[i];
    return f;
  }
};

// Corner average and forward-difference gradient of one cell.
inline void cell_values(const CellGeometry& g, const std::vector<double>& values,
                        std::size_t base, double* ubar, double* grad) {
  const int n = g.n, m = g.m, corners = 1 << n;
  for (int j = 0; j < m; ++j) ubar[j] = 0;
  for (int k = 0; k < n * m; ++k) grad[k] = 0;
  for (int c = 0; c < corners; ++c) {
    const double* v = &values[(base + g.corner_off[c]) * m];
    for (int j = 0; j < m; ++j) ubar[j] += v[j];
    for (int i = 0; i < n; ++i) {
      double sgn = ((c >> i) & 1) ? 1.0 : -1.0;
      for (int j = 0; j < m; ++j) grad[i * m + j] += sgn * v[j];
    }
  }
  double inv_c = 1.0 / corners;
  double inv_e = 2.0 * inv_c;  // 1 / 2^(n-1)
  for (int j = 0; j < m; ++j) ubar[j] *= inv_c;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) grad[i * m + j] *= g.inv_h[i] * inv_e;
}

// F(cell_flat, cell_idx, ubar, grad) -> double
template <class F>
double cell_sum_serial(const GridField& u, F&& f) {
  CellGeometry g(u);
  double acc = 0;
  int idx[kMaxDim];
  double ubar[kMaxDim], grad[kMaxDim * kMaxDim];
  for (std::size_t c = 0; c < g.cell_total; ++c) {
    g.cell_index(c, idx);
    cell_values(g, u.values, g.base_node(idx), ubar, grad);
    acc += f(c, idx, ubar, grad);
  }
  return acc;
}

template <class F>
double cell_sum_parallel(const GridField& u, F&& f) {
  CellGeometry g(u);
  double acc = 0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (long long c = 0; c < static_cast<long long>(g.cell_total); ++c) {
    int idx[kMaxDim];
    double ubar[kMaxDim], grad[kMaxDim * kMaxDim];
    g.cell_index(static_cast<std::size_t>(c), idx);
    cell_values(g, u.values, g.base_node(idx), ubar, grad);
    acc += f(static_cast<std::size_t>(c), idx, ubar, grad);
  }
  return acc;
}

template <class F>
double cell_sum(const GridField& u, F&& f) {
  return parallel_enabled() ? cell_sum_parallel(u, f) : cell_sum_serial(u, f);
}

// G(cell_flat, cell_idx, ubar, grad, A /*m*/, B /*n*m*/): per-cell gradient
// data; the gather pass below assembles the nodal gradient from it.
template <class G>
void cell_fill_serial(const GridField& u, double* A, double* B, G&& g_fn) {
  CellGeometry g(u);
  int idx[kMaxDim];
  double ubar[kMaxDim], grad[kMaxDim * kMaxDim];
  for (std::size_t c = 0; c < g.cell_total; ++c) {
    g.cell_index(c, idx);
    cell_values(g, u.values, g.base_node(idx), ubar, grad);
    g_fn(c, idx, ubar, grad, A + c * g.m, B + c * g.n * g.m);
  }
}

template <class G>
void cell_fill_parallel(const GridField& u, double* A, double* B, G&& g_fn) {
  CellGeometry g(u);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(g.cell_total); ++c) {
    int idx[kMaxDim];
    double ubar[kMaxDim], grad[kMaxDim * kMaxDim];
    g.cell_index(static_cast<std::size_t>(c), idx);
    cell_values(g, u.values, g.base_node(idx), ubar, grad);
    g_fn(static_cast<std::size_t>(c), idx, ubar, grad, A + c * g.m, B + c * g.n * g.m);
  }
}

template <class G>
void cell_fill(const GridField& u, double* A, double* B, G&& g_fn) {
  if (parallel_enabled())
    cell_fill_parallel(u, A, B, g_fn);
  else
    cell_fill_serial(u, A, B, g_fn);
}

// Gather pass: out[node] = sum over adjacent cells of A[cell] plus the
// signed forward-difference contributions B[cell][axis].
void node_gather_serial(const GridField& u, const double* A, const double* B, double* out);
void node_gather_parallel(const GridField& u, const double* A, const double* B, double* out);
void node_gather(const GridField& u, const double* A, const double* B, double* out);

}  // namespace scalesep::kernels
