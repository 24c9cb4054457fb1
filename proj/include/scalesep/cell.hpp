#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalesep/field.hpp"
#include "scalesep/potential.hpp"

namespace scalesep {

// Residual tolerance on the admissibility constraints; well below the
// physical tolerances used downstream.
inline constexpr double kCellTol = 1e-8;

struct CellConfig {
  double eta = 0.1;
  int resolution = 33;  // nodes per axis on Q (>= 3)
  enum class Optimizer { ProjectedGradient, PenaltyQuasiNewton };
  Optimizer optimizer = Optimizer::ProjectedGradient;
  int max_iters = 1500;
  double tol = 1e-10;  // stationarity tolerance on the projected step
  int restarts = 8;
  std::vector<double> penalty_weights = {1e2, 1e4, 1e6};
  std::uint64_t seed = 7771;
};

struct CellResiduals {
  double sup_excess = 0;       // max(0, |psi|_inf - eta)
  double product_excess = 0;   // max(0, |psi|_2 |grad psi|_2 - 5 eta^2)
  double boundary_excess = 0;  // sup over boundary nodes (0 by construction)
};

struct CellSolution {
  double value = 0;  // discrete upper bound on the cell infimum
  GridField psi;     // perturbation on Q, zero on the boundary
  CellResiduals residuals;
  int iterations = 0;
  int resolution = 0;
};

// Constrained minimization of the cell average of W(., z + psi(.)) over
// perturbations with |psi|_inf <= eta, zero boundary values, and
// |psi|_2 |grad psi|_2 <= 5 eta^2. Multi-restart best-of; extra_starts are
// used as additional warm starts when feasible.
CellSolution w_eta(const PotentialSpec& spec, const Vec& z, const CellConfig& cfg,
                   const std::vector<GridField>& extra_starts = {});

struct CellTableEntry {
  Vec z;
  double value = 0;
  bool failed = false;
  std::string error;
  CellResiduals residuals;
  int iterations = 0;
};

// Per-z solve reusing the previous minimizer as a warm start along the list.
std::vector<CellTableEntry> w_eta_table(const PotentialSpec& spec,
                                        const std::vector<Vec>& z_list, double eta,
                                        const CellConfig& cfg);

struct EtaProbeRow {
  double eta = 0;
  double value = 0;
  bool flagged = false;  // monotonicity violated beyond 2*kCellTol
};

// Values along a decreasing eta list; solves run in ascending eta order with
// chained warm starts so the nesting of admissible sets is respected.
std::vector<EtaProbeRow> w_eta_monotonicity(const PotentialSpec& spec, const Vec& z,
                                            const std::vector<double>& eta_list,
                                            const CellConfig& cfg);

}  // namespace scalesep
