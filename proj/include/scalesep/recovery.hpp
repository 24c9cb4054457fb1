#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "scalesep/energy.hpp"
#include "scalesep/field.hpp"
#include "scalesep/geodesic.hpp"
#include "scalesep/potential.hpp"

namespace scalesep {

// Transition profile data: the path gamma, the monotone time change g on
// (-tau, tau), and the slack parameter lambda that keeps the endpoint speed
// positive.
struct ProfileSolution {
  double tau = 0;
  std::vector<double> ts;  // ascending sample times in [-tau, tau]
  std::vector<double> gs;  // g(ts), strictly increasing from -1 to 1
  double lambda = 0;
  double eps = 0;
  Curve gamma;
  double curve_length = 0;    // Euclidean L(gamma)
  double profile_energy = 0;  // profile-side of the energy inequality
  double energy_bound = 0;    // curve-side bound it must stay below

  double g_at(double t) const;  // monotone linear interpolation, clamped
};

struct OdeConfig {
  double step_fraction = 0.01;  // dt = step_fraction * eps
  long long max_steps = 20000000;
};

// Integrates g' = sqrt(lambda + V(gamma(g))) / (eps |gamma'(g)|) from -1
// until g reaches 1, recenters the elapsed interval to (-tau, tau), and
// evaluates both sides of the profile energy inequality.
ProfileSolution reparametrize_profile(const Curve& gamma,
                                      const std::function<double(const Vec&)>& whom,
                                      double eps, double lambda, const OdeConfig& ode = {});

// Threads the profile across the signed distance: b beyond the band,
// gamma(g(dist + v)) inside, a below.
GridField build_recovery(const InterfaceSpec& interface, const ProfileSolution& profile,
                         const GridField& grid_template, double v);

// Root-finds the shift v so the field integral hits m a + (1-m) b times the
// domain volume (componentwise along the well axis).
std::pair<GridField, double> adjust_mass(const InterfaceSpec& interface,
                                         const ProfileSolution& profile,
                                         const GridField& grid_template, double m,
                                         const Vec& well_a, const Vec& well_b);

struct SweepRow {
  double eps = 0, delta = 0, tau = 0, v = 0;
  double energy = 0;     // E_n of the built field
  double sigma_per = 0;  // sigma_hom * Per of the sharp limit
  double ratio = 0;
  double l2_dist = 0;  // |u - u_sharp|_L2 / (|b-a| sqrt(|Omega|))
  double profile_energy = 0;
  double energy_bound = 0;
};

struct SweepConfig {
  SequenceConfig sequence;
  double eta_fraction = 0.01;  // profile slack: eta = fraction * sigma_hom
  std::optional<double> mass_fraction;
  QuadratureRule quad;
  GeodesicConfig geodesic;
  Box domain;  // defaults to the unit box when lo/hi empty
  OdeConfig ode;
};

struct SweepResult {
  double sigma = 0;
  Curve gamma;
  std::vector<SweepRow> rows;
};

// Recovery construction along the scale sequence; records the energy ratio
// against the sharp-interface value and the L2 approach to the limit.
SweepResult recovery_sweep(const PotentialSpec& spec, const InterfaceSpec& interface,
                           const SweepConfig& cfg);

GridField sharp_interface_field(const InterfaceSpec& interface, const GridField& grid_template,
                                const Vec& well_a, const Vec& well_b);

// Relative L2 distance between two fields on the same grid, normalized by
// |b-a| sqrt(|Omega|).
double relative_l2_distance(const GridField& u, const GridField& v, const Vec& well_a,
                            const Vec& well_b);

}  // namespace scalesep
