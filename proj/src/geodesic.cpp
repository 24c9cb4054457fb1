#include "scalesep/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>

#include "scalesep/errors.hpp"
#include "scalesep/log.hpp"
#include "scalesep/parallel.hpp"

namespace scalesep {

Vec Curve::at(double t) const {
  const int K = segments();
  if (K < 1) throw InvalidArgument("curve: need at least one segment");
  double s = (t + 1.0) * 0.5 * K;  // segment coordinate
  s = std::min(std::max(s, 0.0), double(K));
  int k = std::min(static_cast<int>(std::floor(s)), K - 1);
  double f = s - k;
  return nodes[k] + f * (nodes[k + 1] - nodes[k]);
}

double Curve::euclidean_length() const {
  double L = 0;
  for (int k = 0; k < segments(); ++k) L += norm(nodes[k + 1] - nodes[k]);
  return L;
}

Curve resample_euclidean(const Curve& c, int segments) {
  if (segments < 2) throw InvalidArgument("resample: need >= 2 segments");
  const int K = c.segments();
  std::vector<double> cum(K + 1, 0.0);
  for (int k = 0; k < K; ++k) cum[k + 1] = cum[k] + norm(c.nodes[k + 1] - c.nodes[k]);
  double L = cum[K];
  Curve out;
  out.nodes.resize(segments + 1);
  out.nodes.front() = c.nodes.front();
  out.nodes.back() = c.nodes.back();
  if (L == 0) {
    for (int j = 1; j < segments; ++j) out.nodes[j] = c.nodes.front();
    return out;
  }
  int k = 0;
  for (int j = 1; j < segments; ++j) {
    double target = L * j / segments;
    while (k < K - 1 && cum[k + 1] < target) ++k;
    double seg = cum[k + 1] - cum[k];
    double f = seg > 0 ? (target - cum[k]) / seg : 0.0;
    out.nodes[j] = c.nodes[k] + f * (c.nodes[k + 1] - c.nodes[k]);
  }
  return out;
}

double PhaseTable::value(const Vec& z) const {
  const int n = box.dim();
  int base[kMaxDim];
  double frac[kMaxDim];
  for (int i = 0; i < n; ++i) {
    double h = box.extent(i) / (counts[i] - 1);
    double s = (z[i] - box.lo[i]) / h;
    s = std::min(std::max(s, 0.0), double(counts[i] - 1));
    int i0 = static_cast<int>(std::floor(s));
    if (i0 > counts[i] - 2) i0 = counts[i] - 2;
    base[i] = i0;
    frac[i] = s - i0;
  }
  double acc = 0;
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      int bit = (c >> i) & 1;
      w *= bit ? frac[i] : (1.0 - frac[i]);
      idx = idx * counts[i] + (base[i] + bit);
    }
    acc += w * values[idx];
  }
  return acc;
}

ConformalMetric metric_from_whom(const PotentialSpec& spec, const QuadratureRule& quad) {
  ConformalMetric m;
  m.well_a = spec.well_a;
  m.well_b = spec.well_b;
  m.well_radius = 1e-3 * norm(spec.well_b - spec.well_a);
  m.factor = [spec, quad](const Vec& z) {
    return 2.0 * std::sqrt(std::max(0.0, w_hom(spec, z, quad)));
  };
  return m;
}

ConformalMetric metric_from_table(std::shared_ptr<const PhaseTable> table, const Vec& well_a,
                                  const Vec& well_b) {
  ConformalMetric m;
  m.well_a = well_a;
  m.well_b = well_b;
  m.well_radius = 1e-3 * norm(well_b - well_a);
  m.factor = [table](const Vec& z) {
    return 2.0 * std::sqrt(std::max(0.0, table->value(z)));
  };
  return m;
}

double curve_energy(const ConformalMetric& metric, const Curve& curve) {
  if (curve.segments() < 1) throw InvalidArgument("curve_energy: degenerate curve");
  for (const Vec& v : curve.nodes)
    if (!finite(v)) throw InvalidArgument("curve_energy: non-finite node");
  double E = 0;
  for (int k = 0; k < curve.segments(); ++k) {
    Vec d = curve.nodes[k + 1] - curve.nodes[k];
    double len = norm(d);
    if (len == 0) continue;
    E += metric.factor(midpoint(curve.nodes[k], curve.nodes[k + 1])) * len;
  }
  return E;
}

Box default_phase_box(const Vec& p, const Vec& q, const Vec& a, const Vec& b) {
  const int m = p.dim;
  Box box;
  box.lo = Vec(m);
  box.hi = Vec(m);
  for (int i = 0; i < m; ++i) {
    double lo = std::min(std::min(p[i], q[i]), std::min(a[i], b[i]));
    double hi = std::max(std::max(p[i], q[i]), std::max(a[i], b[i]));
    double pad = 0.25 * (hi - lo) + 0.5;
    box.lo[i] = lo - pad;
    box.hi[i] = hi + pad;
  }
  return box;
}

namespace {

int default_graph_res(int m) { return m == 1 ? 2001 : (m == 2 ? 201 : 41); }
int default_table_res(int m) { return m == 1 ? 257 : (m == 2 ? 33 : 17); }

struct GraphGrid {
  Box box;
  int m = 0;
  int res = 0;
  std::array<double, kMaxDim> h{};

  std::size_t total() const {
    std::size_t t = 1;
    for (int i = 0; i < m; ++i) t *= res;
    return t;
  }
  Vec coord(std::size_t flat) const {
    int idx[kMaxDim];
    std::size_t rem = flat;
    for (int i = m - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % res);
      rem /= res;
    }
    Vec x(m);
    for (int i = 0; i < m; ++i) x[i] = box.lo[i] + idx[i] * h[i];
    return x;
  }
  std::size_t nearest(const Vec& x) const {
    std::size_t flat = 0;
    for (int i = 0; i < m; ++i) {
      int k = static_cast<int>(std::lround((x[i] - box.lo[i]) / h[i]));
      k = std::clamp(k, 0, res - 1);
      flat = flat * res + k;
    }
    return flat;
  }
};

// Dijkstra over the full axis+diagonal neighbourhood with edge weight
// F(midpoint) * |edge|.
std::pair<double, std::vector<Vec>> graph_shortest_path(const ConformalMetric& metric,
                                                        const GraphGrid& grid, const Vec& p,
                                                        const Vec& q) {
  const int m = grid.m;
  const std::size_t total = grid.total();
  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(total, -1);

  // neighbour offsets in {-1,0,1}^m minus the origin
  std::vector<std::array<int, kMaxDim>> offs;
  {
    int count = 1;
    for (int i = 0; i < m; ++i) count *= 3;
    for (int c = 0; c < count; ++c) {
      std::array<int, kMaxDim> o{};
      int rem = c;
      bool zero = true;
      for (int i = 0; i < m; ++i) {
        o[i] = rem % 3 - 1;
        rem /= 3;
        if (o[i] != 0) zero = false;
      }
      if (!zero) offs.push_back(o);
    }
  }

  std::size_t src = grid.nearest(p), dst = grid.nearest(q);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, node] = heap.top();
    heap.pop();
    if (d > dist[node]) continue;
    if (node == dst) break;
    int idx[kMaxDim];
    std::size_t rem = node;
    for (int i = m - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % grid.res);
      rem /= grid.res;
    }
    Vec x = grid.coord(node);
    for (const auto& o : offs) {
      std::size_t nb = 0;
      bool ok = true;
      for (int i = 0; i < m; ++i) {
        int k = idx[i] + o[i];
        if (k < 0 || k >= grid.res) {
          ok = false;
          break;
        }
        nb = nb * grid.res + k;
      }
      if (!ok) continue;
      Vec y = grid.coord(nb);
      double len = norm(y - x);
      double w = metric.factor(midpoint(x, y)) * len;
      double nd = d + w;
      if (nd < dist[nb]) {
        dist[nb] = nd;
        parent[nb] = static_cast<std::int64_t>(node);
        heap.push({nd, nb});
      }
    }
  }

  std::vector<Vec> path;
  std::size_t cur = dst;
  path.push_back(grid.coord(cur));
  while (parent[cur] >= 0) {
    cur = static_cast<std::size_t>(parent[cur]);
    path.push_back(grid.coord(cur));
  }
  std::reverse(path.begin(), path.end());
  return {dist[dst], std::move(path)};
}

Vec metric_grad(const ConformalMetric& metric, const Vec& z) {
  double h = 1e-6 * (1.0 + norm(z));
  Vec g(z.dim);
  for (int i = 0; i < z.dim; ++i) {
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (metric.factor(zp) - metric.factor(zm)) / (2.0 * h);
  }
  return g;
}

// Local descent on interior node positions; endpoints never move.
double refine_curve(const ConformalMetric& metric, Curve& curve, const GeodesicConfig& cfg,
                    int& iterations) {
  const int K = curve.segments();
  const int m = curve.nodes[0].dim;
  double E = curve_energy(metric, curve);
  double step = 0.1 * curve.euclidean_length() / K;
  int since_redistribute = 0;
  double cycle_start_E = E;
  iterations = 0;

  for (int it = 0; it < cfg.max_refine_iters; ++it) {
    // assemble nodal gradient of the piecewise energy
    std::vector<double> flen(K), fmid(K);
    std::vector<Vec> unit(K), gmid(K);
    for (int k = 0; k < K; ++k) {
      Vec d = curve.nodes[k + 1] - curve.nodes[k];
      flen[k] = norm(d);
      Vec mp = midpoint(curve.nodes[k], curve.nodes[k + 1]);
      fmid[k] = metric.factor(mp);
      gmid[k] = metric_grad(metric, mp);
      unit[k] = flen[k] > 0 ? d * (1.0 / flen[k]) : Vec(m);
    }
    std::vector<Vec> grad(K + 1, Vec(m));
    double g2 = 0;
    for (int j = 1; j < K; ++j) {
      Vec g = 0.5 * flen[j - 1] * gmid[j - 1] + 0.5 * flen[j] * gmid[j] +
              fmid[j - 1] * unit[j - 1] - fmid[j] * unit[j];
      grad[j] = g;
      g2 += norm2(g);
    }
    if (g2 == 0) break;

    bool accepted = false;
    double s = step;
    Curve cand = curve;
    double E_cand = E;
    for (int bt = 0; bt < 60; ++bt) {
      for (int j = 1; j < K; ++j) cand.nodes[j] = curve.nodes[j] - s * grad[j];
      E_cand = curve_energy(metric, cand);
      if (!std::isfinite(E_cand)) throw DivergedError("geodesic: non-finite energy");
      if (E_cand <= E - 1e-4 * s * g2) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
    curve = cand;
    E = E_cand;
    step = std::min(s * 2.0, 1e3);
    ++iterations;

    if (++since_redistribute >= cfg.redistribute_every) {
      curve = resample_euclidean(curve, K);
      E = curve_energy(metric, curve);
      since_redistribute = 0;
      double rel = (cycle_start_E - E) / std::max(std::abs(cycle_start_E), 1e-300);
      if (rel >= 0 && rel < cfg.tol) break;
      cycle_start_E = E;
    }
  }
  curve = resample_euclidean(curve, K);
  return curve_energy(metric, curve);
}

}  // namespace

GeodesicResult geodesic_distance(const ConformalMetric& metric, const Vec& p, const Vec& q,
                                 const GeodesicConfig& cfg) {
  if (!finite(p) || !finite(q)) throw InvalidArgument("geodesic: non-finite endpoints");
  if (p.dim != q.dim) throw InvalidArgument("geodesic: dimension mismatch");
  const int m = p.dim;

  Box box = cfg.box ? *cfg.box : default_phase_box(p, q, metric.well_a, metric.well_b);
  for (int i = 0; i < m; ++i)
    if (p[i] < box.lo[i] || p[i] > box.hi[i] || q[i] < box.lo[i] || q[i] > box.hi[i])
      throw InvalidArgument("geodesic: bounding box excludes an endpoint");

  GeodesicResult out;
  if (norm2(p - q) == 0) {
    out.curve.nodes = {p, midpoint(p, q), q};
    return out;
  }

  GraphGrid grid;
  grid.box = box;
  grid.m = m;
  grid.res = cfg.graph_res > 0 ? cfg.graph_res : default_graph_res(m);
  for (int i = 0; i < m; ++i) grid.h[i] = box.extent(i) / (grid.res - 1);

  auto [gdist, path] = graph_shortest_path(metric, grid, p, q);
  out.graph_distance = gdist;

  Curve init;
  init.nodes = std::move(path);
  init.nodes.front() = p;  // pin the exact endpoints
  init.nodes.back() = q;
  Curve refined = resample_euclidean(init, cfg.refine_nodes);
  out.distance = refine_curve(metric, refined, cfg, out.refine_iterations);
  out.curve = std::move(refined);
  log_debug("geodesic: graph %.6g refined %.6g (%d iters)", out.graph_distance, out.distance,
            out.refine_iterations);
  return out;
}

GeodesicResult sigma_hom(const PotentialSpec& spec, const QuadratureRule& quad,
                         const GeodesicConfig& cfg) {
  validate_spec(spec);
  ConformalMetric metric = metric_from_whom(spec, quad);
  return geodesic_distance(metric, spec.well_a, spec.well_b, cfg);
}

std::vector<std::shared_ptr<const PhaseTable>> w_eta_phase_tables(
    const PotentialSpec& spec, const std::vector<double>& etas_descending,
    const CellConfig& cell_cfg, const Box& box, int res) {
  const int m = spec.m;
  // ascending eta order with per-z chained warm starts: the admissible-set
  // nesting then carries over to the sampled values.
  std::vector<double> etas = etas_descending;
  std::sort(etas.begin(), etas.end());

  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= res;

  std::vector<std::shared_ptr<PhaseTable>> tables(etas.size());
  std::vector<std::vector<GridField>> warm(total);

  std::array<int, kMaxDim> counts{};
  for (int i = 0; i < m; ++i) counts[i] = res;

  for (std::size_t e = 0; e < etas.size(); ++e) {
    auto table = std::make_shared<PhaseTable>();
    table->box = box;
    table->counts = counts;
    table->values.resize(total);
    CellConfig cc = cell_cfg;
    cc.eta = etas[e];
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
    for (long long zi = 0; zi < static_cast<long long>(total); ++zi) {
      int idx[kMaxDim];
      std::size_t rem = static_cast<std::size_t>(zi);
      for (int i = m - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(rem % res);
        rem /= res;
      }
      Vec z(m);
      for (int i = 0; i < m; ++i)
        z[i] = box.lo[i] + box.extent(i) * idx[i] / (res - 1);
      CellSolution sol = w_eta(spec, z, cc, warm[zi]);
      table->values[zi] = sol.value;
      warm[zi].assign(1, sol.psi);
    }
    tables[e] = std::move(table);
  }

  // map back to the requested (descending) order
  std::vector<std::shared_ptr<const PhaseTable>> out(etas_descending.size());
  for (std::size_t i = 0; i < etas_descending.size(); ++i) {
    auto it = std::find(etas.begin(), etas.end(), etas_descending[i]);
    out[i] = tables[static_cast<std::size_t>(it - etas.begin())];
  }
  return out;
}

GeodesicResult sigma_eta(const PotentialSpec& spec, double eta, const CellConfig& cell_cfg,
                         const GeodesicConfig& cfg, const QuadratureRule& quad) {
  (void)quad;
  validate_spec(spec);
  if (!(eta > 0)) throw InvalidArgument("sigma_eta: eta must be positive");
  Box box = cfg.box ? *cfg.box
                    : default_phase_box(spec.well_a, spec.well_b, spec.well_a, spec.well_b);
  int res = cfg.metric_table_res > 0 ? cfg.metric_table_res : default_table_res(spec.m);
  auto tables = w_eta_phase_tables(spec, {eta}, cell_cfg, box, res);
  ConformalMetric metric = metric_from_table(tables[0], spec.well_a, spec.well_b);
  GeodesicConfig gcfg = cfg;
  gcfg.box = box;
  return geodesic_distance(metric, spec.well_a, spec.well_b, gcfg);
}

Curve equi_arclength_reparam(const ConformalMetric& metric, const Curve& curve) {
  const int K = curve.segments();
  if (K < 1) throw InvalidArgument("reparam: degenerate curve");
  std::vector<double> seg_len(K);
  std::vector<double> cum(K + 1, 0.0);
  for (int k = 0; k < K; ++k) {
    Vec d = curve.nodes[k + 1] - curve.nodes[k];
    double len = norm(d);
    seg_len[k] = len > 0 ? metric.factor(midpoint(curve.nodes[k], curve.nodes[k + 1])) * len : 0.0;
    cum[k + 1] = cum[k] + seg_len[k];
  }
  double L = cum[K];
  if (!(L > 0)) throw InvalidArgument("reparam: zero-energy curve");

  Curve out;
  out.nodes.resize(K + 1);
  out.nodes.front() = curve.nodes.front();
  out.nodes.back() = curve.nodes.back();
  int k = 0;
  for (int j = 1; j < K; ++j) {
    double target = L * j / K;
    while (k < K - 1 && cum[k + 1] < target) ++k;
    double f = seg_len[k] > 0 ? (target - cum[k]) / seg_len[k] : 0.0;
    out.nodes[j] = curve.nodes[k] + f * (curve.nodes[k + 1] - curve.nodes[k]);
  }
  return out;
}

D0Probe d0_probe(const PotentialSpec& spec, const Vec& p, const Vec& q,
                 const std::vector<double>& eta_list, const CellConfig& cell_cfg,
                 const GeodesicConfig& cfg, const QuadratureRule& quad) {
  validate_spec(spec);
  for (std::size_t i = 0; i + 1 < eta_list.size(); ++i)
    if (!(eta_list[i] > eta_list[i + 1]))
      throw InvalidArgument("d0 probe: eta list must be strictly decreasing");

  D0Probe probe;
  Box box = cfg.box ? *cfg.box : default_phase_box(p, q, spec.well_a, spec.well_b);
  GeodesicConfig gcfg = cfg;
  gcfg.box = box;

  ConformalMetric whom_metric = metric_from_whom(spec, quad);
  probe.whom_distance = geodesic_distance(whom_metric, p, q, gcfg).distance;

  int res = cfg.metric_table_res > 0 ? cfg.metric_table_res : default_table_res(spec.m);
  auto tables = w_eta_phase_tables(spec, eta_list, cell_cfg, box, res);
  for (std::size_t i = 0; i < eta_list.size(); ++i) {
    ConformalMetric metric = metric_from_table(tables[i], spec.well_a, spec.well_b);
    D0Row row;
    row.eta = eta_list[i];
    row.distance = geodesic_distance(metric, p, q, gcfg).distance;
    probe.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < probe.rows.size(); ++i)
    probe.rows[i + 1].flagged =
        probe.rows[i + 1].distance < probe.rows[i].distance * (1.0 - 0.02);
  probe.sup = 0;
  for (const D0Row& r : probe.rows) probe.sup = std::max(probe.sup, r.distance);
  return probe;
}

void save_curve_csv(const Curve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("curve: cannot write " + path);
  const int m = c.nodes.empty() ? 0 : c.nodes[0].dim;
  out << "t";
  for (int j = 0; j < m; ++j) out << ",z" << j;
  out << "\n";
  char buf[64];
  const int K = c.segments();
  for (int k = 0; k <= K; ++k) {
    double t = -1.0 + 2.0 * k / K;
    std::snprintf(buf, sizeof buf, "%.17g", t);
    out << buf;
    for (int j = 0; j < m; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", c.nodes[k][j]);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace scalesep
