#include "scalesep/cell.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "scalesep/errors.hpp"
#include "scalesep/kernels.hpp"
#include "scalesep/log.hpp"

namespace scalesep {

namespace {

constexpr double kPi = 3.14159265358979323846;

Box unit_cell_box(int n) {
  Box b;
  b.lo = Vec(n);
  b.hi = Vec(n);
  for (int i = 0; i < n; ++i) {
    b.lo[i] = -0.5;
    b.hi[i] = 0.5;
  }
  return b;
}

bool is_boundary_node(const GridField& f, std::size_t flat) {
  int idx[kMaxDim];
  f.multi_index(flat, idx);
  for (int i = 0; i < f.n; ++i)
    if (idx[i] == 0 || idx[i] == f.counts[i] - 1) return true;
  return false;
}

void zero_boundary(GridField& f) {
  const std::size_t nodes = f.node_count();
  for (std::size_t k = 0; k < nodes; ++k)
    if (is_boundary_node(f, k))
      for (int j = 0; j < f.m; ++j) f.values[k * f.m + j] = 0;
}

struct CellProblem {
  const PotentialSpec& spec;
  Vec z;
  double eta;

  double objective(const GridField& psi) const {
    kernels::CellGeometry geo(psi);
    const double vol = geo.cell_vol;
    const int n = psi.n, m = psi.m;
    return kernels::cell_sum(psi, [&](std::size_t, const int* idx, const double* ubar,
                                      const double*) {
      Vec y(n);
      for (int i = 0; i < n; ++i) y[i] = -0.5 + (idx[i] + 0.5) * psi.spacing(i);
      Vec zz = z;
      for (int j = 0; j < m; ++j) zz[j] += ubar[j];
      return vol * eval_w(spec, y, zz);
    });
  }

  GridField objective_grad(const GridField& psi) const {
    kernels::CellGeometry geo(psi);
    const double vol = geo.cell_vol;
    const int n = psi.n, m = psi.m;
    const int corners = 1 << n;
    std::vector<double> A(geo.cell_total * m), B(geo.cell_total * n * m, 0.0);
    kernels::cell_fill(psi, A.data(), B.data(),
                       [&](std::size_t, const int* idx, const double* ubar, const double*,
                           double* a_out, double* b_out) {
                         Vec y(n);
                         for (int i = 0; i < n; ++i)
                           y[i] = -0.5 + (idx[i] + 0.5) * psi.spacing(i);
                         Vec zz = z;
                         for (int j = 0; j < m; ++j) zz[j] += ubar[j];
                         Vec dw = eval_w_grad(spec, y, zz);
                         for (int j = 0; j < m; ++j) a_out[j] = vol * dw[j] / corners;
                         for (int k = 0; k < n * m; ++k) b_out[k] = 0;
                       });
    GridField g = GridField::zeros(psi.box, psi.counts, psi.m);
    g.n = psi.n;
    kernels::node_gather(psi, A.data(), B.data(), g.values.data());
    zero_boundary(g);
    return g;
  }

  // discrete L2 norms: midpoint values and forward-difference gradients
  void norms(const GridField& psi, double& l2, double& h1) const {
    kernels::CellGeometry geo(psi);
    const double vol = geo.cell_vol;
    const int n = psi.n, m = psi.m;
    double s2 = kernels::cell_sum(
        psi, [&](std::size_t, const int*, const double* ubar, const double*) {
          double a = 0;
          for (int j = 0; j < m; ++j) a += ubar[j] * ubar[j];
          return vol * a;
        });
    double g2 = kernels::cell_sum(
        psi, [&](std::size_t, const int*, const double*, const double* grad) {
          double b = 0;
          for (int k = 0; k < n * m; ++k) b += grad[k] * grad[k];
          return vol * b;
        });
    l2 = std::sqrt(s2);
    h1 = std::sqrt(g2);
  }

  // Feasibility restoration: boundary zeros, radial sup clipping, then a
  // global scaling that lands exactly on the product bound when violated.
  void project(GridField& psi) const {
    zero_boundary(psi);
    const std::size_t nodes = psi.node_count();
    const int m = psi.m;
    for (std::size_t k = 0; k < nodes; ++k) {
      double n2 = 0;
      for (int j = 0; j < m; ++j) {
        double v = psi.values[k * m + j];
        n2 += v * v;
      }
      if (n2 > eta * eta) {
        double s = eta / std::sqrt(n2);
        for (int j = 0; j < m; ++j) psi.values[k * m + j] *= s;
      }
    }
    double l2, h1;
    norms(psi, l2, h1);
    double prod = l2 * h1;
    double cap = 5.0 * eta * eta;
    if (prod > cap) {
      double s = std::sqrt(cap / prod);
      for (double& v : psi.values) v *= s;
    }
  }

  CellResiduals residuals(const GridField& psi) const {
    CellResiduals r;
    const std::size_t nodes = psi.node_count();
    const int m = psi.m;
    double sup = 0, bnd = 0;
    for (std::size_t k = 0; k < nodes; ++k) {
      double n2 = 0;
      for (int j = 0; j < m; ++j) {
        double v = psi.values[k * m + j];
        n2 += v * v;
      }
      double nn = std::sqrt(n2);
      sup = std::max(sup, nn);
      if (is_boundary_node(psi, k)) bnd = std::max(bnd, nn);
    }
    double l2, h1;
    norms(psi, l2, h1);
    r.sup_excess = std::max(0.0, sup - eta);
    r.product_excess = std::max(0.0, l2 * h1 - 5.0 * eta * eta);
    r.boundary_excess = bnd;
    return r;
  }
};

struct DescentResult {
  double value = 0;
  int iterations = 0;
};

DescentResult projected_descent(const CellProblem& prob, GridField& psi, int max_iters,
                                double tol) {
  prob.project(psi);
  double f = prob.objective(psi);
  double step = 0.1;
  int it = 0;
  for (; it < max_iters; ++it) {
    GridField g = prob.objective_grad(psi);
    GridField cand = psi;
    double f_cand = f;
    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 60; ++bt) {
      cand = psi;
      for (std::size_t k = 0; k < cand.values.size(); ++k) cand.values[k] -= s * g.values[k];
      prob.project(cand);
      f_cand = prob.objective(cand);
      if (!std::isfinite(f_cand)) throw DivergedError("cell: non-finite objective");
      double move2 = 0;
      for (std::size_t k = 0; k < cand.values.size(); ++k) {
        double d = cand.values[k] - psi.values[k];
        move2 += d * d;
      }
      if (f_cand <= f - 1e-4 * move2 / std::max(s, 1e-300)) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
    double move_inf = 0;
    for (std::size_t k = 0; k < cand.values.size(); ++k)
      move_inf = std::max(move_inf, std::abs(cand.values[k] - psi.values[k]));
    psi = std::move(cand);
    f = f_cand;
    step = std::min(s * 2.0, 1e3);
    if (move_inf / std::max(s, 1e-300) < tol) {
      ++it;
      break;
    }
  }
  return {f, it};
}

// Penalty formulation minimized with L-BFGS over the interior nodes; the
// final projection restores exact feasibility.
DescentResult penalty_lbfgs(const CellProblem& prob, GridField& psi, const CellConfig& cfg) {
  const double cap2 = std::pow(5.0 * prob.eta * prob.eta, 2);
  auto fg = [&](const GridField& x, double w, GridField& grad_out) -> double {
    double f = prob.objective(x);
    grad_out = prob.objective_grad(x);
    // product constraint through the smooth surrogate q = |x|_2^2 |grad x|_2^2
    double l2, h1;
    prob.norms(x, l2, h1);
    double q = l2 * l2 * h1 * h1;
    double over = q - cap2;
    if (over > 0) {
      f += w * over * over;
      // grad q = 2 h1^2 (M x) + 2 l2^2 (K x), assembled via the cell kernels
      kernels::CellGeometry geo(x);
      const double vol = geo.cell_vol;
      const int n = x.n, m = x.m;
      const int corners = 1 << n;
      std::vector<double> A(geo.cell_total * m), B(geo.cell_total * n * m);
      double ch = 2.0 * h1 * h1, cl = 2.0 * l2 * l2;
      kernels::cell_fill(x, A.data(), B.data(),
                         [&](std::size_t, const int*, const double* ubar, const double* grad,
                             double* a_out, double* b_out) {
                           for (int j = 0; j < m; ++j)
                             a_out[j] = ch * vol * 2.0 * ubar[j] / corners;
                           for (int i = 0; i < n; ++i) {
                             double c = cl * 2.0 * vol * geo.inv_h[i] * 2.0 / corners;
                             for (int j = 0; j < m; ++j)
                               b_out[i * m + j] = c * grad[i * m + j];
                           }
                         });
      GridField gq = GridField::zeros(x.box, x.counts, x.m);
      gq.n = x.n;
      kernels::node_gather(x, A.data(), B.data(), gq.values.data());
      for (std::size_t k = 0; k < grad_out.values.size(); ++k)
        grad_out.values[k] += w * 2.0 * over * gq.values[k];
    }
    // sup constraint
    const std::size_t nodes = x.node_count();
    for (std::size_t k = 0; k < nodes; ++k) {
      double n2 = 0;
      for (int j = 0; j < x.m; ++j) {
        double v = x.values[k * x.m + j];
        n2 += v * v;
      }
      double ov = n2 - prob.eta * prob.eta;
      if (ov > 0) {
        f += w * ov * ov;
        for (int j = 0; j < x.m; ++j)
          grad_out.values[k * x.m + j] += w * 4.0 * ov * x.values[k * x.m + j];
      }
    }
    zero_boundary(grad_out);
    return f;
  };

  int total_it = 0;
  for (double w : cfg.penalty_weights) {
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho;
    GridField g(psi), g_new(psi);
    double f = fg(psi, w, g);
    for (int it = 0; it < cfg.max_iters / int(cfg.penalty_weights.size()) + 1; ++it) {
      ++total_it;
      // two-loop recursion
      std::vector<double> d(g.values.begin(), g.values.end());
      std::vector<double> alpha(s_hist.size());
      for (int i = int(s_hist.size()) - 1; i >= 0; --i) {
        double a = 0;
        for (std::size_t k = 0; k < d.size(); ++k) a += s_hist[i][k] * d[k];
        a *= rho[i];
        alpha[i] = a;
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= a * y_hist[i][k];
      }
      if (!s_hist.empty()) {
        double sy = 1.0 / rho.back(), yy = 0;
        for (double v : y_hist.back()) yy += v * v;
        double scale = sy / std::max(yy, 1e-300);
        for (double& v : d) v *= scale;
      }
      for (int i = 0; i < int(s_hist.size()); ++i) {
        double b = 0;
        for (std::size_t k = 0; k < d.size(); ++k) b += y_hist[i][k] * d[k];
        b *= rho[i];
        for (std::size_t k = 0; k < d.size(); ++k) d[k] += (alpha[i] - b) * s_hist[i][k];
      }
      // line search along -d
      double s = 1.0;
      GridField cand = psi;
      double f_cand = f;
      bool ok = false;
      for (int bt = 0; bt < 50; ++bt) {
        cand = psi;
        for (std::size_t k = 0; k < cand.values.size(); ++k)
          cand.values[k] -= s * d[k];
        zero_boundary(cand);
        f_cand = fg(cand, w, g_new);
        if (std::isfinite(f_cand) && f_cand < f) {
          ok = true;
          break;
        }
        s *= 0.5;
      }
      if (!ok) break;
      std::vector<double> sv(psi.values.size()), yv(psi.values.size());
      double sy = 0;
      for (std::size_t k = 0; k < psi.values.size(); ++k) {
        sv[k] = cand.values[k] - psi.values[k];
        yv[k] = g_new.values[k] - g.values[k];
        sy += sv[k] * yv[k];
      }
      psi = std::move(cand);
      f = f_cand;
      g = g_new;
      if (sy > 1e-300) {
        s_hist.push_back(std::move(sv));
        y_hist.push_back(std::move(yv));
        rho.push_back(1.0 / sy);
        if (s_hist.size() > 8) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho.pop_front();
        }
      }
      double gi = 0;
      for (double v : g.values) gi = std::max(gi, std::abs(v));
      if (gi < cfg.tol * 10) break;
    }
  }
  prob.project(psi);
  return {prob.objective(psi), total_it};
}

GridField random_start(const CellProblem& prob, const GridField& tmpl, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridField psi = tmpl;
  const int n = psi.n, m = psi.m;
  Vec dir1(m), dir2(m);
  for (int j = 0; j < m; ++j) {
    dir1[j] = u(rng);
    dir2[j] = u(rng);
  }
  double a1 = amp(rng) * prob.eta, a2 = 0.5 * amp(rng) * prob.eta;
  const std::size_t nodes = psi.node_count();
  int idx[kMaxDim];
  for (std::size_t k = 0; k < nodes; ++k) {
    psi.multi_index(k, idx);
    double b1 = 1.0, b2 = 1.0;
    for (int i = 0; i < n; ++i) {
      double t = double(idx[i]) / (psi.counts[i] - 1);  // 0..1 across Q
      b1 *= std::sin(kPi * t);
      b2 *= std::sin(2.0 * kPi * t);
    }
    for (int j = 0; j < m; ++j)
      psi.values[k * m + j] = a1 * dir1[j] * b1 + a2 * dir2[j] * b2;
  }
  return psi;
}

}  // namespace

CellSolution w_eta(const PotentialSpec& spec, const Vec& z, const CellConfig& cfg,
                   const std::vector<GridField>& extra_starts) {
  validate_spec(spec);
  if (!(cfg.eta > 0)) throw InvalidArgument("cell: eta must be positive");
  if (cfg.resolution < 3) throw InvalidArgument("cell: resolution must be >= 3");
  if (!(cfg.tol > 0)) throw InvalidArgument("cell: tolerance must be positive");
  if (!finite(z)) throw InvalidArgument("cell: non-finite z");

  CellProblem prob{spec, z, cfg.eta};
  std::array<int, kMaxDim> counts{};
  for (int i = 0; i < spec.n; ++i) counts[i] = cfg.resolution;
  GridField tmpl = GridField::zeros(unit_cell_box(spec.n), counts, spec.m);

  std::mt19937_64 rng(cfg.seed);
  std::vector<GridField> starts;
  starts.push_back(tmpl);  // psi = 0 is always admissible
  for (const GridField& s : extra_starts)
    if (s.n == tmpl.n && s.m == tmpl.m && s.counts == tmpl.counts) starts.push_back(s);
  while (static_cast<int>(starts.size()) < std::max(1, cfg.restarts))
    starts.push_back(random_start(prob, tmpl, rng));

  CellSolution best;
  best.value = std::numeric_limits<double>::infinity();
  int total_iters = 0;
  for (GridField& start : starts) {
    GridField psi = start;
    DescentResult res;
    if (cfg.optimizer == CellConfig::Optimizer::PenaltyQuasiNewton)
      res = penalty_lbfgs(prob, psi, cfg);
    else
      res = projected_descent(prob, psi, cfg.max_iters, cfg.tol);
    total_iters += res.iterations;
    if (res.value < best.value) {
      best.value = res.value;
      best.psi = std::move(psi);
    }
  }
  best.iterations = total_iters;
  best.resolution = cfg.resolution;
  best.residuals = prob.residuals(best.psi);
  if (best.residuals.sup_excess > kCellTol || best.residuals.product_excess > kCellTol ||
      best.residuals.boundary_excess > kCellTol)
    throw InfeasibleError("cell: projection failed to restore feasibility");
  return best;
}

std::vector<CellTableEntry> w_eta_table(const PotentialSpec& spec,
                                        const std::vector<Vec>& z_list, double eta,
                                        const CellConfig& cfg) {
  if (z_list.empty()) throw InvalidArgument("cell table: empty z list");
  CellConfig c = cfg;
  c.eta = eta;
  std::vector<CellTableEntry> out;
  std::vector<GridField> warm;
  for (const Vec& z : z_list) {
    CellTableEntry e;
    e.z = z;
    try {
      CellSolution sol = w_eta(spec, z, c, warm);
      e.value = sol.value;
      e.residuals = sol.residuals;
      e.iterations = sol.iterations;
      warm.assign(1, sol.psi);
    } catch (const std::exception& ex) {
      e.failed = true;
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<EtaProbeRow> w_eta_monotonicity(const PotentialSpec& spec, const Vec& z,
                                            const std::vector<double>& eta_list,
                                            const CellConfig& cfg) {
  if (eta_list.empty()) throw InvalidArgument("eta probe: empty list");
  for (std::size_t i = 0; i + 1 < eta_list.size(); ++i)
    if (!(eta_list[i] > eta_list[i + 1]))
      throw InvalidArgument("eta probe: list must be strictly decreasing");
  if (!(eta_list.back() > 0)) throw InvalidArgument("eta probe: etas must be positive");

  // ascending order with chained starts: the smaller-eta minimizer is
  // admissible for every larger eta, so values come out ordered.
  std::vector<EtaProbeRow> rows(eta_list.size());
  std::vector<GridField> warm;
  for (int i = int(eta_list.size()) - 1; i >= 0; --i) {
    CellConfig c = cfg;
    c.eta = eta_list[i];
    CellSolution sol = w_eta(spec, z, c, warm);
    rows[i].eta = eta_list[i];
    rows[i].value = sol.value;
    warm.assign(1, sol.psi);
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    rows[i + 1].flagged = rows[i + 1].value < rows[i].value - 2.0 * kCellTol;
  return rows;
}

}  // namespace scalesep
