#include "scalesep/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "scalesep/errors.hpp"
#include "scalesep/log.hpp"

namespace scalesep {

double ProfileSolution::g_at(double t) const {
  if (ts.empty()) throw InvalidArgument("profile: empty sample set");
  if (t <= ts.front()) return -1.0;
  if (t >= ts.back()) return 1.0;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t i = static_cast<std::size_t>(it - ts.begin());
  double t0 = ts[i - 1], t1 = ts[i];
  double f = (t - t0) / (t1 - t0);
  double g = gs[i - 1] + f * (gs[i] - gs[i - 1]);
  return std::min(std::max(g, -1.0), 1.0);
}

ProfileSolution reparametrize_profile(const Curve& gamma,
                                      const std::function<double(const Vec&)>& whom,
                                      double eps, double lambda, const OdeConfig& ode) {
  if (!(eps > 0)) throw InvalidArgument("profile: eps must be positive");
  if (!(lambda > 0)) throw InvalidArgument("profile: lambda must be positive");
  const int K = gamma.segments();
  if (K < 2) throw InvalidArgument("profile: curve needs at least two segments");
  for (int k = 0; k < K; ++k)
    if (norm2(gamma.nodes[k + 1] - gamma.nodes[k]) == 0)
      throw InvalidArgument("profile: invalid curve, interior zero-speed node");

  // |gamma'| at parameter s (piecewise constant per segment)
  auto speed = [&](double g) {
    double s = (g + 1.0) * 0.5 * K;
    int k = std::clamp(static_cast<int>(std::floor(s)), 0, K - 1);
    return norm(gamma.nodes[k + 1] - gamma.nodes[k]) * K / 2.0;
  };
  auto rhs = [&](double g) {
    double gc = std::min(std::max(g, -1.0), 1.0);
    double V = std::max(0.0, whom(gamma.at(gc)));
    double r = std::sqrt(lambda + V) / (eps * speed(gc));
    if (!(r > 1e-14)) throw DegenerateProfile("profile: g' stalled");
    return r;
  };

  ProfileSolution out;
  out.lambda = lambda;
  out.eps = eps;
  out.gamma = gamma;
  out.curve_length = gamma.euclidean_length();

  const double dt = ode.step_fraction * eps;
  double t = 0, g = -1.0;
  out.ts.push_back(t);
  out.gs.push_back(g);
  long long steps = 0;
  while (g < 1.0) {
    if (++steps > ode.max_steps) throw DegenerateProfile("profile: g did not reach 1");
    double k1 = rhs(g);
    double k2 = rhs(g + 0.5 * dt * k1);
    double k3 = rhs(g + 0.5 * dt * k2);
    double k4 = rhs(g + dt * k3);
    double g_new = g + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    double t_new = t + dt;
    if (g_new >= 1.0) {
      double f = (1.0 - g) / (g_new - g);
      t_new = t + f * dt;
      g_new = 1.0;
    }
    t = t_new;
    g = g_new;
    out.ts.push_back(t);
    out.gs.push_back(g);
  }
  out.tau = 0.5 * t;
  for (double& ti : out.ts) ti -= out.tau;

  // profile side: (1/eps) V + eps |gamma'|^2 g'^2 = (2V + lambda)/eps along
  // the solution; trapezoid over the stored samples
  double lhs = 0;
  std::vector<double> integrand(out.ts.size());
  for (std::size_t i = 0; i < out.ts.size(); ++i) {
    double V = std::max(0.0, whom(gamma.at(out.gs[i])));
    integrand[i] = (2.0 * V + lambda) / eps;
  }
  for (std::size_t i = 0; i + 1 < out.ts.size(); ++i)
    lhs += 0.5 * (integrand[i] + integrand[i + 1]) * (out.ts[i + 1] - out.ts[i]);
  out.profile_energy = lhs;

  double curve_side = 0;
  for (int k = 0; k < K; ++k) {
    Vec mid = midpoint(gamma.nodes[k], gamma.nodes[k + 1]);
    curve_side += 2.0 * std::sqrt(std::max(0.0, whom(mid))) * norm(gamma.nodes[k + 1] - gamma.nodes[k]);
  }
  out.energy_bound = curve_side + 2.0 * std::sqrt(lambda) * out.curve_length;
  return out;
}

GridField build_recovery(const InterfaceSpec& interface, const ProfileSolution& profile,
                         const GridField& grid_template, double v) {
  const int m = profile.gamma.nodes.empty() ? 0 : profile.gamma.nodes[0].dim;
  if (m < 1) throw InvalidArgument("recovery: profile has no curve");
  double half_extent = grid_template.box.extent(0);
  for (int i = 0; i < grid_template.n; ++i)
    half_extent = std::min(half_extent, 0.5 * grid_template.box.extent(i));
  if (profile.tau >= half_extent)
    throw ProfileTooWide("recovery: band wider than the domain");
  if (!(std::abs(v) < 0.5 * profile.tau + 1e-15))
    throw InvalidArgument("recovery: |v| must stay below tau/2");

  Vec a = profile.gamma.nodes.front();
  Vec b = profile.gamma.nodes.back();
  GridField u = GridField::zeros(grid_template.box, grid_template.counts, m);
  u.n = grid_template.n;
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    double d = interface_distance(interface, u.node_coord(f)) + v;
    Vec val(m);
    if (d > profile.tau)
      val = b;
    else if (d < -profile.tau)
      val = a;
    else
      val = profile.gamma.at(profile.g_at(d));
    u.set_value(f, val);
  }
  return u;
}

std::pair<GridField, double> adjust_mass(const InterfaceSpec& interface,
                                         const ProfileSolution& profile,
                                         const GridField& grid_template, double m,
                                         const Vec& well_a, const Vec& well_b) {
  if (!(m > 0 && m < 1)) throw InvalidArgument("adjust_mass: m must be in (0,1)");
  const double volume = grid_template.box.volume();
  Vec target = (m * well_a + (1.0 - m) * well_b) * volume;
  Vec dir = well_b - well_a;
  dir *= 1.0 / norm(dir);

  auto offset = [&](double v) {
    GridField u = build_recovery(interface, profile, grid_template, v);
    return dot(field_mass(u) - target, dir);
  };

  double lo = -0.5 * profile.tau * (1.0 - 1e-9);
  double hi = 0.5 * profile.tau * (1.0 - 1e-9);
  double flo = offset(lo), fhi = offset(hi);
  const double tol = 0.25e-10 * volume;
  if (flo * fhi > 0 && std::abs(flo) > tol && std::abs(fhi) > tol)
    throw MassUnreachable("adjust_mass: target not bracketed by |v| <= tau/2");

  double v = 0;
  for (int it = 0; it < 200; ++it) {
    v = 0.5 * (lo + hi);
    double f = offset(v);
    if (std::abs(f) <= tol) break;
    if ((f > 0) == (fhi > 0)) {
      hi = v;
      fhi = f;
    } else {
      lo = v;
      flo = f;
    }
  }
  GridField u = build_recovery(interface, profile, grid_template, v);
  return {std::move(u), v};
}

GridField sharp_interface_field(const InterfaceSpec& interface, const GridField& grid_template,
                                const Vec& well_a, const Vec& well_b) {
  GridField u = GridField::zeros(grid_template.box, grid_template.counts, well_a.dim);
  u.n = grid_template.n;
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    double d = interface_distance(interface, u.node_coord(f));
    u.set_value(f, d < 0 ? well_a : well_b);
  }
  return u;
}

double relative_l2_distance(const GridField& u, const GridField& v, const Vec& well_a,
                            const Vec& well_b) {
  if (u.values.size() != v.values.size()) throw InvalidArgument("l2: field size mismatch");
  double vol = 1;
  for (int i = 0; i < u.n; ++i) vol *= u.spacing(i);
  double acc = 0;
  int idx[kMaxDim];
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    u.multi_index(f, idx);
    double w = vol;
    for (int i = 0; i < u.n; ++i)
      if (idx[i] == 0 || idx[i] == u.counts[i] - 1) w *= 0.5;
    double d2 = 0;
    for (int j = 0; j < u.m; ++j) {
      double d = u.values[f * u.m + j] - v.values[f * u.m + j];
      d2 += d * d;
    }
    acc += w * d2;
  }
  return std::sqrt(acc) / (norm(well_b - well_a) * std::sqrt(u.box.volume()));
}

SweepResult recovery_sweep(const PotentialSpec& spec, const InterfaceSpec& interface,
                           const SweepConfig& cfg) {
  validate_spec(spec);
  SweepResult result;

  GeodesicResult geo = sigma_hom(spec, cfg.quad, cfg.geodesic);
  result.sigma = geo.distance;
  result.gamma = geo.curve;

  const double L = geo.curve.euclidean_length();
  const double eta = cfg.eta_fraction * result.sigma;
  const double lambda = (eta / L) * (eta / L);
  auto whom_fn = [&](const Vec& z) { return w_hom(spec, z, cfg.quad); };

  std::vector<EnergyParams> seq = make_sequence(cfg.sequence, cfg.mass_fraction);
  for (const EnergyParams& p : seq) {
    // grid resolving the fast oscillation: h <= delta/4
    std::array<int, kMaxDim> counts{};
    for (int i = 0; i < cfg.domain.dim(); ++i) {
      counts[i] = static_cast<int>(std::ceil(cfg.domain.extent(i) / (p.delta / 4.0))) + 1;
      counts[i] = std::max(counts[i], 2);
    }
    GridField tmpl = GridField::zeros(cfg.domain, counts, spec.m);

    ProfileSolution profile = reparametrize_profile(geo.curve, whom_fn, p.eps, lambda, cfg.ode);

    GridField u;
    double v = 0;
    if (cfg.mass_fraction) {
      auto [field, shift] = adjust_mass(interface, profile, tmpl, *cfg.mass_fraction,
                                        spec.well_a, spec.well_b);
      u = std::move(field);
      v = shift;
    } else {
      u = build_recovery(interface, profile, tmpl, 0.0);
    }

    GridField sharp = sharp_interface_field(interface, tmpl, spec.well_a, spec.well_b);

    SweepRow row;
    row.eps = p.eps;
    row.delta = p.delta;
    row.tau = profile.tau;
    row.v = v;
    row.energy = two_scale_energy(spec, u, p);
    row.sigma_per = result.sigma * perimeter(sharp, spec.well_a, spec.well_b);
    row.ratio = row.sigma_per > 0 ? row.energy / row.sigma_per : 0.0;
    row.l2_dist = relative_l2_distance(u, sharp, spec.well_a, spec.well_b);
    row.profile_energy = profile.profile_energy;
    row.energy_bound = profile.energy_bound;
    result.rows.push_back(row);
    log_info("sweep eps=%.4g ratio=%.4f l2=%.4f tau=%.4g v=%.3g", p.eps, row.ratio,
             row.l2_dist, row.tau, v);
  }
  return result;
}

}  // namespace scalesep
