#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "scalesep/cell.hpp"
#include "scalesep/field.hpp"
#include "scalesep/potential.hpp"

namespace scalesep {

// Piecewise-linear path in phase space, parameter uniform on [-1, 1].
struct Curve {
  std::vector<Vec> nodes;
  int segments() const { return static_cast<int>(nodes.size()) - 1; }
  // position at parameter t in [-1, 1]
  Vec at(double t) const;
  double euclidean_length() const;
};

Curve resample_euclidean(const Curve& c, int segments);

// Multilinear sample table over a phase-space box.
struct PhaseTable {
  Box box;
  std::array<int, kMaxDim> counts{};
  std::vector<double> values;
  double value(const Vec& z) const;
};

// Conformal metric 2 sqrt(V(z)) |dz| whose factor vanishes exactly at the
// wells.
struct ConformalMetric {
  std::function<double(const Vec&)> factor;
  Vec well_a, well_b;
  double well_radius = 0;  // rho, diagnostic only
};

ConformalMetric metric_from_whom(const PotentialSpec& spec, const QuadratureRule& quad);
ConformalMetric metric_from_table(std::shared_ptr<const PhaseTable> table, const Vec& well_a,
                                  const Vec& well_b);

// Piecewise quadrature sum F(segment midpoint) * segment length.
double curve_energy(const ConformalMetric& metric, const Curve& curve);

struct GeodesicConfig {
  int graph_res = 0;          // 0: 2001 (M=1), 201 (M=2), 41 otherwise
  int refine_nodes = 256;     // polyline segments for local descent
  int redistribute_every = 20;
  int max_refine_iters = 800;
  double tol = 1e-9;          // relative energy decrease stop
  int metric_table_res = 0;   // 0: 257 (M=1), 33 (M=2), 17 otherwise
  std::optional<Box> box;     // default: hull of endpoints and wells,
                              // inflated 50% per axis plus 0.5 margin
};

Box default_phase_box(const Vec& p, const Vec& q, const Vec& a, const Vec& b);

struct GeodesicResult {
  double distance = 0;        // refined curve energy
  double graph_distance = 0;  // phase (i) shortest-path value
  Curve curve;
  int refine_iterations = 0;
};

// Two-phase solve: Dijkstra on the phase-space grid graph, then local
// descent on the polyline nodes with periodic equi-Euclidean redistribution.
GeodesicResult geodesic_distance(const ConformalMetric& metric, const Vec& p, const Vec& q,
                                 const GeodesicConfig& cfg);

// Geodesic distance between the wells under the homogenized potential.
GeodesicResult sigma_hom(const PotentialSpec& spec, const QuadratureRule& quad,
                         const GeodesicConfig& cfg);

// Same under the cell-problem potential tabulated on a phase-space grid.
GeodesicResult sigma_eta(const PotentialSpec& spec, double eta, const CellConfig& cell_cfg,
                         const GeodesicConfig& cfg, const QuadratureRule& quad);

// Tables for several eta levels at once (ascending internally, chained warm
// starts ensure the admissible-set nesting shows up in the values).
std::vector<std::shared_ptr<const PhaseTable>> w_eta_phase_tables(
    const PotentialSpec& spec, const std::vector<double>& etas_descending,
    const CellConfig& cell_cfg, const Box& box, int res);

// Re-node the same polyline so every segment carries an equal share of the
// degenerate length F * |segment|.
Curve equi_arclength_reparam(const ConformalMetric& metric, const Curve& curve);

struct D0Row {
  double eta = 0;
  double distance = 0;
  bool flagged = false;  // non-monotone beyond tolerance
};

struct D0Probe {
  std::vector<D0Row> rows;  // in the order of the requested eta list
  double whom_distance = 0;
  double sup = 0;
};

D0Probe d0_probe(const PotentialSpec& spec, const Vec& p, const Vec& q,
                 const std::vector<double>& eta_list, const CellConfig& cell_cfg,
                 const GeodesicConfig& cfg, const QuadratureRule& quad);

void save_curve_csv(const Curve& c, const std::string& path);

}  // namespace scalesep
