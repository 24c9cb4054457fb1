#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scalesep/vec.hpp"

namespace scalesep {

// Two-scale potential W(y, z): Q-periodic in the spatial variable y (Q is
// the centered unit cube), vanishing exactly at the two wells a, b in phase
// space, with quadratic coercivity governed by the growth constant R1.

enum class Family { SeparableCosine, Checkerboard, Tabulated, CustomAnalytic };

// Sampled potential on Q x [z-box], multilinear interpolation.
struct TabulatedData {
  int n = 1;                          // spatial axes
  int m = 1;                          // phase axes
  std::vector<int> counts;            // n + m axes, nodes per axis (>= 2)
  Vec z_lo, z_hi;                     // phase box bounds
  std::vector<double> values;         // row-major over (y..., z...)
};

struct PotentialSpec {
  Family family = Family::SeparableCosine;
  int n = 1;  // spatial dimension N
  int m = 1;  // phase dimension M
  Vec well_a{-1.0};
  Vec well_b{1.0};
  double growth_constant = 10.0;  // R1
  double scale = 1.0;             // overall multiplier on W

  // separable-cosine: W = scale * (1 + alpha cos(2 pi y_1)) * |z-a|^2 |z-b|^2
  double alpha = 0.5;  // in [0, 1)

  // checkerboard: Q split into pieces^N congruent boxes, each with its own
  // well-depth factor; W = scale * depth(piece(y)) * |z-a|^2 |z-b|^2
  int pieces = 2;
  std::vector<double> depths;  // pieces^N entries, row-major; default {0.5, 1.5,...}

  std::shared_ptr<const TabulatedData> table;

  std::function<double(const Vec& y, const Vec& z)> custom_w;
  std::function<Vec(const Vec& y, const Vec& z)> custom_grad;  // optional
};

// Throws InvalidArgument when the spec is structurally broken (dimension
// mismatch, coincident wells, alpha outside [0,1), missing table, ...).
void validate_spec(const PotentialSpec& spec);

struct QuadratureRule {
  enum class Scheme { MidpointTensor, GaussLegendreTensor };
  Scheme scheme = Scheme::GaussLegendreTensor;
  int nodes_per_axis = 16;
};

// 1D nodes/weights on (-1/2, 1/2); weights sum to 1.
struct Quadrature1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature1D make_quadrature_1d(const QuadratureRule& rule);

double eval_w(const PotentialSpec& spec, const Vec& y, const Vec& z);

// Gradient of z -> W(y, z); closed form for the built-in families, central
// finite differences (step 1e-6 (1+|z|)) for tabulated/custom without one.
Vec eval_w_grad(const PotentialSpec& spec, const Vec& y, const Vec& z);

// Homogenized potential: cell average of W(., z) over Q.
double w_hom(const PotentialSpec& spec, const Vec& z, const QuadratureRule& rule);

struct GrowthViolation {
  std::string check;  // "nonneg" | "well" | "lower" | "upper"
  Vec y, z;
  double value = 0;
  double bound = 0;
};

struct GrowthReport {
  int samples = 0;
  std::vector<GrowthViolation> violations;
  bool vacuous = false;  // sample_count == 0
  bool pass() const { return violations.empty(); }
};

// Samples (y, z) with y uniform in Q and |z| <= radius and checks
// nonnegativity, exact well values, the quadratic lower bound beyond R1 and
// the quadratic upper bound. Violations are report entries, never throws.
GrowthReport validate_growth(const PotentialSpec& spec, int sample_count,
                             double radius, std::uint64_t seed = 12345);

std::shared_ptr<const TabulatedData> load_tabulated_csv(const std::string& path);
std::shared_ptr<const TabulatedData> load_tabulated_binary(const std::string& path);
void save_tabulated_binary(const TabulatedData& data, const std::string& path);

// Builds a table by sampling another spec; used to exercise the tabulated
// family against its source.
std::shared_ptr<const TabulatedData> tabulate_spec(const PotentialSpec& src,
                                                   int y_res, int z_res,
                                                   const Vec& z_lo, const Vec& z_hi);

}  // namespace scalesep
