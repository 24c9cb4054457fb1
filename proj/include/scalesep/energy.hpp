#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scalesep/errors.hpp"
#include "scalesep/field.hpp"
#include "scalesep/potential.hpp"

namespace scalesep {

// Scale pair of the two-scale energy: interface width eps, oscillation
// period delta, optional mass fraction for the constrained variant.
struct EnergyParams {
  double eps = 0.1;
  double delta = 0.01;
  std::optional<double> mass_fraction;  // m in (0,1): integral u = m a + (1-m) b
};

// delta = eps^exponent along generated sequences; exponent > 1 keeps
// delta/eps strictly decreasing.
struct SequenceConfig {
  std::vector<double> epsilons = {0.1, 0.05, 0.025};
  double exponent = 2.0;
};
std::vector<EnergyParams> make_sequence(const SequenceConfig& cfg,
                                        std::optional<double> mass_fraction = {});

// Midpoint-per-cell quadrature of (1/eps) W(x/delta, u) + eps |grad u|^2.
// Requires h <= delta/4 on every axis so the fast oscillation is resolved.
double two_scale_energy(const PotentialSpec& spec, const GridField& u, const EnergyParams& p);

// Exact nodal gradient of the discrete functional above.
GridField two_scale_energy_grad(const PotentialSpec& spec, const GridField& u,
                                const EnergyParams& p);

// Trapezoidal integral of u over the domain.
Vec field_mass(const GridField& u);

// sigma * Per({u = a}).
double limit_energy(const GridField& u, double sigma, const Vec& well_a, const Vec& well_b);

struct MinimizeConfig {
  int max_iters = 50000;
  double tol_g = 0;  // 0: defaults to 1e-6 / eps (gradient scales like 1/eps)
  int max_backtracks = 60;
  std::uint64_t seed = 2024;
};

struct MinimizeReport {
  GridField field;
  std::vector<double> energy_trace;     // accepted iterates, non-increasing
  std::vector<double> residual_trace;   // sup-norm of the projected gradient
  std::vector<double> drift_trace;      // |mass - target|_inf (0 when unconstrained)
  double stationarity = 0;              // final exact residual
  int iterations = 0;
  double wall_seconds = 0;
  bool converged = false;
};

struct MinimizeDiverged : DivergedError {
  explicit MinimizeDiverged(const std::string& what) : DivergedError(what) {}
  MinimizeReport report;
};

// Accelerated projected descent with backtracking; the mass constraint is
// restored after every trial step by subtracting the constant offset, so
// accepted iterates satisfy it to rounding.
MinimizeReport minimize_energy(const PotentialSpec& spec, const EnergyParams& p,
                               const GridField& init, const MinimizeConfig& cfg);

}  // namespace scalesep
