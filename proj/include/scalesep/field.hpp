#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "scalesep/vec.hpp"

namespace scalesep {

struct Box {
  Vec lo, hi;
  int dim() const { return lo.dim; }
  double extent(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const {
    double v = 1;
    for (int i = 0; i < dim(); ++i) v *= extent(i);
    return v;
  }
};

// Function Omega -> R^M sampled on the nodes of a uniform rectangular grid;
// off-node evaluation is multilinear. Values are stored row-major (axis 0
// slowest), M components per node.
struct GridField {
  Box box;
  std::array<int, kMaxDim> counts{};
  int n = 0;  // spatial dimension
  int m = 0;  // value dimension
  std::vector<double> values;

  static GridField zeros(const Box& box, const std::array<int, kMaxDim>& counts, int m);

  std::size_t node_count() const {
    std::size_t t = 1;
    for (int i = 0; i < n; ++i) t *= counts[i];
    return t;
  }
  double spacing(int axis) const { return box.extent(axis) / (counts[axis] - 1); }
  double max_spacing() const;
  std::size_t cell_count() const {
    std::size_t t = 1;
    for (int i = 0; i < n; ++i) t *= counts[i] - 1;
    return t;
  }

  void multi_index(std::size_t flat, int* idx) const;
  std::size_t flat_index(const int* idx) const;
  Vec node_coord(std::size_t flat) const;

  Vec value(std::size_t flat) const {
    Vec v(m);
    for (int j = 0; j < m; ++j) v[j] = values[flat * m + j];
    return v;
  }
  void set_value(std::size_t flat, const Vec& v) {
    for (int j = 0; j < m; ++j) values[flat * m + j] = v[j];
  }

  // Multilinear interpolation; x is clamped to the box.
  Vec value_at(const Vec& x) const;
};

// Nearest lattice point to t in Z^N. Equidistant ties are broken by the
// fixed enumeration ordered by (|k|_inf, then lexicographic).
void lattice_floor(const Vec& t, int n, int* out);

// Unfolded view of a field: per full cell z_i + delta*Q the values
// u(z_i + delta*y) on a midpoint sample grid over Q; the boundary layer
// carries the constant well value a.
struct UnfoldedField {
  double delta = 0;
  int q_res = 0;
  int n = 0, m = 0;
  Box domain;
  Vec well_a;
  std::vector<Vec> cell_centers;  // the index set I_delta
  std::vector<double> samples;    // per cell: q_res^N samples, m components
  double layer_measure = 0;       // |Lambda_delta|

  std::size_t samples_per_cell() const {
    std::size_t t = 1;
    for (int i = 0; i < n; ++i) t *= q_res;
    return t;
  }
  Vec sample(std::size_t cell, std::size_t s) const {
    Vec v(m);
    std::size_t base = (cell * samples_per_cell() + s) * m;
    for (int j = 0; j < m; ++j) v[j] = samples[base + j];
    return v;
  }
};

UnfoldedField unfold(const GridField& u, double delta, int q_res, const Vec& well_a);

// L2(Omega x Q) distance between the unfolded field and the field itself;
// on the boundary layer the integrand compares u against the well a.
double unfolding_defect(const GridField& u, double delta, int q_res, const Vec& well_a);

// Pointwise radial clipping to the ball of radius r.
GridField truncate(const GridField& u, double r);

// Interface measure of the two-phase decomposition of u: sign-change count
// in 1D, marching-squares contour length of the well indicator in 2D.
double perimeter(const GridField& u, const Vec& well_a, const Vec& well_b);

// Scalar well indicator (|u-b| - |u-a|)/|b-a|: +1 at a, -1 at b.
GridField phase_indicator(const GridField& u, const Vec& well_a, const Vec& well_b);

struct PlaneInterface {
  Vec point;
  Vec normal;  // phase a on the negative side
};
struct CircleInterface {
  Vec center;
  double radius = 0;  // phase a inside
};
using InterfaceSpec = std::variant<PlaneInterface, CircleInterface>;

double interface_distance(const InterfaceSpec& spec, const Vec& x);

// Signed distance sampled on the template grid (analytic formulas).
GridField signed_distance(const InterfaceSpec& spec, const GridField& grid_template);

// Signed distance to the phase boundary of a thresholded field (N=2 only):
// marching-squares front seeding followed by fast sweeping.
GridField signed_distance(const GridField& u, const Vec& well_a, const Vec& well_b);

void save_field_binary(const GridField& u, const std::string& path);
GridField load_field_binary(const std::string& path);
void save_field_csv(const GridField& u, const std::string& path);

}  // namespace scalesep
