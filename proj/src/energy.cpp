#include "scalesep/energy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "scalesep/kernels.hpp"
#include "scalesep/log.hpp"

namespace scalesep {

std::vector<EnergyParams> make_sequence(const SequenceConfig& cfg,
                                        std::optional<double> mass_fraction) {
  if (cfg.epsilons.empty()) throw InvalidArgument("sequence: no epsilons");
  if (!(cfg.exponent > 1.0)) throw InvalidArgument("sequence: exponent must exceed 1");
  std::vector<EnergyParams> out;
  double prev = std::numeric_limits<double>::infinity();
  for (double e : cfg.epsilons) {
    if (!(e > 0) || e >= prev)
      throw InvalidArgument("sequence: epsilons must be positive and strictly decreasing");
    prev = e;
    EnergyParams p;
    p.eps = e;
    p.delta = std::pow(e, cfg.exponent);
    p.mass_fraction = mass_fraction;
    out.push_back(p);
  }
  return out;
}

namespace {

void check_energy_args(const GridField& u, const EnergyParams& p) {
  if (!(p.eps > 0) || !(p.delta > 0)) throw InvalidArgument("energy: eps, delta must be positive");
  for (int i = 0; i < u.n; ++i)
    if (u.spacing(i) > p.delta / 4.0 * (1.0 + 1e-12))
      throw ResolutionError("energy: grid under-resolved, need h <= delta/4");
  for (double v : u.values)
    if (!std::isfinite(v)) throw InvalidArgument("energy: field has non-finite values");
}

Vec cell_center(const GridField& u, const int* idx) {
  Vec x(u.n);
  for (int i = 0; i < u.n; ++i) x[i] = u.box.lo[i] + (idx[i] + 0.5) * u.spacing(i);
  return x;
}

}  // namespace

double two_scale_energy(const PotentialSpec& spec, const GridField& u, const EnergyParams& p) {
  check_energy_args(u, p);
  const double inv_eps = 1.0 / p.eps;
  const double inv_delta = 1.0 / p.delta;
  kernels::CellGeometry geo(u);
  const double vol = geo.cell_vol;
  const int n = u.n, m = u.m;
  return kernels::cell_sum(u, [&](std::size_t, const int* idx, const double* ubar,
                                  const double* grad) {
    Vec x = cell_center(u, idx);
    Vec y = x * inv_delta;
    Vec z(m);
    for (int j = 0; j < m; ++j) z[j] = ubar[j];
    double g2 = 0;
    for (int k = 0; k < n * m; ++k) g2 += grad[k] * grad[k];
    return vol * (inv_eps * eval_w(spec, y, z) + p.eps * g2);
  });
}

GridField two_scale_energy_grad(const PotentialSpec& spec, const GridField& u,
                                const EnergyParams& p) {
  check_energy_args(u, p);
  const double inv_eps = 1.0 / p.eps;
  const double inv_delta = 1.0 / p.delta;
  kernels::CellGeometry geo(u);
  const double vol = geo.cell_vol;
  const int n = u.n, m = u.m;
  const int corners = 1 << n;

  std::vector<double> A(geo.cell_total * m), B(geo.cell_total * n * m);
  kernels::cell_fill(u, A.data(), B.data(),
                     [&](std::size_t, const int* idx, const double* ubar, const double* grad,
                         double* a_out, double* b_out) {
                       Vec x = cell_center(u, idx);
                       Vec y = x * inv_delta;
                       Vec z(m);
                       for (int j = 0; j < m; ++j) z[j] = ubar[j];
                       Vec dw = eval_w_grad(spec, y, z);
                       for (int j = 0; j < m; ++j)
                         a_out[j] = vol * inv_eps * dw[j] / corners;
                       for (int i = 0; i < n; ++i) {
                         double c = 2.0 * p.eps * vol * geo.inv_h[i] * 2.0 / corners;
                         for (int j = 0; j < m; ++j)
                           b_out[i * m + j] = c * grad[i * m + j];
                       }
                     });

  GridField g = GridField::zeros(u.box, u.counts, u.m);
  g.n = u.n;
  kernels::node_gather(u, A.data(), B.data(), g.values.data());
  return g;
}

Vec field_mass(const GridField& u) {
  Vec acc(u.m);
  double vol = 1;
  for (int i = 0; i < u.n; ++i) vol *= u.spacing(i);
  const std::size_t nodes = u.node_count();
  int idx[kMaxDim];
  for (std::size_t f = 0; f < nodes; ++f) {
    u.multi_index(f, idx);
    double w = vol;
    for (int i = 0; i < u.n; ++i)
      if (idx[i] == 0 || idx[i] == u.counts[i] - 1) w *= 0.5;
    for (int j = 0; j < u.m; ++j) acc[j] += w * u.values[f * u.m + j];
  }
  return acc;
}

double limit_energy(const GridField& u, double sigma, const Vec& well_a, const Vec& well_b) {
  if (!(sigma >= 0)) throw InvalidArgument("limit_energy: sigma must be nonnegative");
  return sigma * perimeter(u, well_a, well_b);
}

namespace {

struct MassProjector {
  bool active = false;
  Vec target;  // integral target
  double volume = 1;

  void apply(GridField& u) const {
    if (!active) return;
    Vec shift = (field_mass(u) - target) * (1.0 / volume);
    const std::size_t nodes = u.node_count();
    for (std::size_t f = 0; f < nodes; ++f)
      for (int j = 0; j < u.m; ++j) u.values[f * u.m + j] -= shift[j];
  }
  double drift(const GridField& u) const {
    if (!active) return 0;
    Vec d = field_mass(u) - target;
    double mx = 0;
    for (int j = 0; j < d.dim; ++j) mx = std::max(mx, std::abs(d[j]));
    return mx;
  }
  // component of g along the constant direction, removed from the residual
  void project_gradient(const GridField& g, GridField& out) const {
    out = g;
    if (!active) return;
    Vec mean = field_mass(g) * (1.0 / volume);
    const std::size_t nodes = g.node_count();
    for (std::size_t f = 0; f < nodes; ++f)
      for (int j = 0; j < g.m; ++j) out.values[f * g.m + j] -= mean[j];
  }
};

double sup_norm(const GridField& g) {
  double mx = 0;
  for (double v : g.values) mx = std::max(mx, std::abs(v));
  return mx;
}

}  // namespace

MinimizeReport minimize_energy(const PotentialSpec& spec, const EnergyParams& p,
                               const GridField& init, const MinimizeConfig& cfg) {
  check_energy_args(init, p);
  auto t0 = std::chrono::steady_clock::now();

  MassProjector proj;
  if (p.mass_fraction) {
    double mf = *p.mass_fraction;
    if (!(mf > 0 && mf < 1)) throw InvalidArgument("minimize: mass fraction must be in (0,1)");
    proj.active = true;
    proj.volume = init.box.volume();
    proj.target = (mf * spec.well_a + (1.0 - mf) * spec.well_b) * proj.volume;
  }

  const double tol = cfg.tol_g > 0 ? cfg.tol_g : 1e-6 / p.eps;

  MinimizeReport rep;
  GridField u = init;
  proj.apply(u);
  double E_u = two_scale_energy(spec, u, p);
  GridField u_prev = u;

  // initial step from a crude curvature bound; line search adapts it
  double hmin = u.spacing(0);
  for (int i = 1; i < u.n; ++i) hmin = std::min(hmin, u.spacing(i));
  double step = 1.0 / (8.0 * p.eps / (hmin * hmin) + 10.0 / p.eps);

  double t_momentum = 1.0;
  GridField gp = u;  // scratch

  rep.energy_trace.push_back(E_u);
  rep.residual_trace.push_back(0);
  rep.drift_trace.push_back(proj.drift(u));

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    // extrapolated point
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    double beta = (t_momentum - 1.0) / t_next;
    GridField y = u;
    if (beta > 0) {
      for (std::size_t k = 0; k < y.values.size(); ++k)
        y.values[k] += beta * (u.values[k] - u_prev.values[k]);
      proj.apply(y);
    }

    GridField g = two_scale_energy_grad(spec, y, p);
    proj.project_gradient(g, gp);
    double res = sup_norm(gp);

    if (res < tol) {
      // confirm at the accepted iterate itself
      GridField gu = two_scale_energy_grad(spec, u, p);
      proj.project_gradient(gu, gp);
      double res_u = sup_norm(gp);
      if (res_u < tol) {
        rep.stationarity = res_u;
        rep.converged = true;
        break;
      }
    }

    double E_y = (beta > 0) ? two_scale_energy(spec, y, p) : E_u;
    double gp2 = 0;
    for (double v : gp.values) gp2 += v * v;

    auto try_from = [&](const GridField& base, double E_base, double& s,
                        GridField& cand, double& E_cand) -> bool {
      for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
        cand = base;
        for (std::size_t k = 0; k < cand.values.size(); ++k)
          cand.values[k] -= s * g.values[k];
        proj.apply(cand);
        E_cand = two_scale_energy(spec, cand, p);
        if (std::isfinite(E_cand) && E_cand <= E_base - 1e-4 * s * gp2) return true;
        s *= 0.5;
      }
      return false;
    };

    GridField cand = u;
    double E_cand = E_u;
    double s = step;
    bool ok = try_from(y, E_y, s, cand, E_cand);
    if (!ok || E_cand > E_u) {
      // momentum restart: plain projected step from u
      t_momentum = 1.0;
      g = two_scale_energy_grad(spec, u, p);
      proj.project_gradient(g, gp);
      gp2 = 0;
      for (double v : gp.values) gp2 += v * v;
      s = step;
      if (!try_from(u, E_u, s, cand, E_cand)) {
        MinimizeDiverged err("minimize: no descent after max backtracks");
        rep.field = u;
        rep.iterations = iter;
        err.report = rep;
        throw err;
      }
      t_next = 1.0;
    }

    u_prev = u;
    u = cand;
    E_u = E_cand;
    t_momentum = t_next;
    step = std::min(s * 2.0, 1e6);

    rep.energy_trace.push_back(E_u);
    rep.residual_trace.push_back(res);
    rep.drift_trace.push_back(proj.drift(u));
  }

  if (!rep.converged) {
    GridField gu = two_scale_energy_grad(spec, u, p);
    proj.project_gradient(gu, gp);
    rep.stationarity = sup_norm(gp);
  }
  rep.field = std::move(u);
  rep.iterations = iter;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log_info("minimize: %d iterations, energy %.6g, residual %.3g", rep.iterations,
           rep.energy_trace.back(), rep.stationarity);
  return rep;
}

}  // namespace scalesep
