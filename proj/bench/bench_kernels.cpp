// Timing comparison of the serial reference kernels against the OpenMP
// versions: energy assembly, gradient assembly, unfolding defect.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "scalesep/energy.hpp"
#include "scalesep/field.hpp"
#include "scalesep/kernels.hpp"
#include "scalesep/parallel.hpp"
#include "scalesep/potential.hpp"

using namespace scalesep;

namespace {

GridField make_field(int res) {
  Box box;
  box.lo = Vec{0.0, 0.0};
  box.hi = Vec{1.0, 1.0};
  std::array<int, kMaxDim> counts{};
  counts[0] = counts[1] = res;
  GridField u = GridField::zeros(box, counts, 1);
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    Vec x = u.node_coord(f);
    u.values[f] = std::tanh((x[0] - 0.5) / 0.05) + 0.1 * std::sin(7.0 * x[1]);
  }
  return u;
}

template <class F>
double time_ms(F&& fn) {
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  PotentialSpec spec;
  spec.n = 2;
  spec.m = 1;
  spec.alpha = 0.5;

  EnergyParams p;
  p.eps = 0.05;

  std::printf("threads: %d\n", thread_count());
  std::printf("%-10s %6s %12s %12s %9s\n", "kernel", "size", "serial_ms", "parallel_ms",
              "speedup");

  for (int res : {257, 513, 1025}) {
    GridField u = make_field(res);
    p.delta = 8.0 * u.spacing(0);  // keep the resolution precondition satisfied

    volatile double sink = 0;
    set_parallel_enabled(false);
    double e_ser = time_ms([&] { sink = two_scale_energy(spec, u, p); });
    set_parallel_enabled(true);
    double e_par = time_ms([&] { sink = two_scale_energy(spec, u, p); });
    std::printf("%-10s %6d %12.3f %12.3f %8.2fx\n", "energy", res, e_ser, e_par,
                e_ser / e_par);

    set_parallel_enabled(false);
    double g_ser = time_ms([&] { sink = two_scale_energy_grad(spec, u, p).values[0]; });
    set_parallel_enabled(true);
    double g_par = time_ms([&] { sink = two_scale_energy_grad(spec, u, p).values[0]; });
    std::printf("%-10s %6d %12.3f %12.3f %8.2fx\n", "gradient", res, g_ser, g_par,
                g_ser / g_par);

    Vec a{-1.0};
    set_parallel_enabled(false);
    double d_ser = time_ms([&] { sink = unfolding_defect(u, 1.0 / 16, 8, a); });
    set_parallel_enabled(true);
    double d_par = time_ms([&] { sink = unfolding_defect(u, 1.0 / 16, 8, a); });
    std::printf("%-10s %6d %12.3f %12.3f %8.2fx\n", "defect", res, d_ser, d_par,
                d_ser / d_par);
    (void)sink;
  }
  return 0;
}
