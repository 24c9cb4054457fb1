#include "scalesep/kernels.hpp"

#include <algorithm>

namespace scalesep {

namespace {
bool g_parallel = true;
}

bool parallel_enabled() {
#ifdef _OPENMP
  return g_parallel && omp_get_max_threads() > 1;
#else
  return false;
#endif
}

void set_parallel_enabled(bool on) { g_parallel = on; }

void set_thread_count(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace kernels {

namespace {

inline void gather_one(const GridField& u, const CellGeometry& g, const double* A,
                       const double* B, std::size_t node, double* out) {
  const int n = g.n, m = g.m;
  int nid[kMaxDim];
  {
    std::size_t rem = node;
    for (int i = n - 1; i >= 0; --i) {
      nid[i] = static_cast<int>(rem % u.counts[i]);
      rem /= u.counts[i];
    }
  }
  for (int j = 0; j < m; ++j) out[node * m + j] = 0;
  // adjacent cells: node is corner `bits` of the cell at nid - bits
  const int corners = 1 << n;
  for (int bits = 0; bits < corners; ++bits) {
    int cid[kMaxDim];
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      cid[i] = nid[i] - ((bits >> i) & 1);
      if (cid[i] < 0 || cid[i] >= g.dims[i]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::size_t cflat = 0;
    for (int i = 0; i < n; ++i) cflat = cflat * g.dims[i] + cid[i];
    const double* Ac = A + cflat * m;
    const double* Bc = B + cflat * n * m;
    for (int j = 0; j < m; ++j) {
      double acc = Ac[j];
      for (int i = 0; i < n; ++i) {
        double sgn = ((bits >> i) & 1) ? 1.0 : -1.0;
        acc += sgn * Bc[i * m + j];
      }
      out[node * m + j] += acc;
    }
  }
}

}  // namespace

void node_gather_serial(const GridField& u, const double* A, const double* B, double* out) {
  CellGeometry g(u);
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) gather_one(u, g, A, B, f, out);
}

void node_gather_parallel(const GridField& u, const double* A, const double* B, double* out) {
  CellGeometry g(u);
  const std::size_t nodes = u.node_count();
#pragma omp parallel for schedule(static)
  for (long long f = 0; f < static_cast<long long>(nodes); ++f)
    gather_one(u, g, A, B, static_cast<std::size_t>(f), out);
}

void node_gather(const GridField& u, const double* A, const double* B, double* out) {
  if (parallel_enabled())
    node_gather_parallel(u, A, B, out);
  else
    node_gather_serial(u, A, B, out);
}

}  // namespace kernels
}  // namespace scalesep
