#include "scalesep/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "scalesep/errors.hpp"
#include "scalesep/parallel.hpp"

namespace scalesep {

GridField GridField::zeros(const Box& box, const std::array<int, kMaxDim>& counts, int m) {
  GridField f;
  f.box = box;
  f.counts = counts;
  f.n = box.dim();
  f.m = m;
  for (int i = 0; i < f.n; ++i)
    if (counts[i] < 2) throw InvalidArgument("GridField: need >= 2 nodes per axis");
  if (m < 1 || m > kMaxDim) throw InvalidArgument("GridField: bad value dimension");
  f.values.assign(f.node_count() * m, 0.0);
  return f;
}

double GridField::max_spacing() const {
  double h = 0;
  for (int i = 0; i < n; ++i) h = std::max(h, spacing(i));
  return h;
}

void GridField::multi_index(std::size_t flat, int* idx) const {
  for (int i = n - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % counts[i]);
    flat /= counts[i];
  }
}

std::size_t GridField::flat_index(const int* idx) const {
  std::size_t f = 0;
  for (int i = 0; i < n; ++i) f = f * counts[i] + idx[i];
  return f;
}

Vec GridField::node_coord(std::size_t flat) const {
  int idx[kMaxDim];
  multi_index(flat, idx);
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = box.lo[i] + idx[i] * spacing(i);
  return x;
}

Vec GridField::value_at(const Vec& x) const {
  int base[kMaxDim];
  double frac[kMaxDim];
  for (int i = 0; i < n; ++i) {
    double s = (x[i] - box.lo[i]) / spacing(i);
    s = std::min(std::max(s, 0.0), double(counts[i] - 1));
    int i0 = static_cast<int>(std::floor(s));
    if (i0 > counts[i] - 2) i0 = counts[i] - 2;
    base[i] = i0;
    frac[i] = s - i0;
  }
  Vec v(m);
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    int idx[kMaxDim];
    for (int i = 0; i < n; ++i) {
      int bit = (c >> i) & 1;
      w *= bit ? frac[i] : (1.0 - frac[i]);
      idx[i] = base[i] + bit;
    }
    std::size_t f = flat_index(idx);
    for (int j = 0; j < m; ++j) v[j] += w * values[f * m + j];
  }
  return v;
}

void lattice_floor(const Vec& t, int n, int* out) {
  // Per-axis candidates: the nearest integer, or both neighbours at an exact
  // half-integer. The winning tuple minimizes (|k|_inf, lexicographic).
  int lo[kMaxDim];
  int cand_count[kMaxDim];
  for (int i = 0; i < n; ++i) {
    double f = std::floor(t[i]);
    double frac = t[i] - f;
    if (frac == 0.5) {
      lo[i] = static_cast<int>(f);
      cand_count[i] = 2;
    } else {
      lo[i] = static_cast<int>(frac < 0.5 ? f : f + 1.0);
      cand_count[i] = 1;
    }
  }
  int best[kMaxDim];
  int best_inf = std::numeric_limits<int>::max();
  bool have = false;
  int pick[kMaxDim] = {0};
  while (true) {
    int k[kMaxDim];
    int inf = 0;
    for (int i = 0; i < n; ++i) {
      k[i] = lo[i] + pick[i];
      inf = std::max(inf, std::abs(k[i]));
    }
    bool better = false;
    if (!have || inf < best_inf) {
      better = true;
    } else if (inf == best_inf) {
      for (int i = 0; i < n; ++i) {
        if (k[i] != best[i]) {
          better = k[i] < best[i];
          break;
        }
      }
    }
    if (better) {
      std::copy(k, k + n, best);
      best_inf = inf;
      have = true;
    }
    int d = n - 1;
    while (d >= 0 && ++pick[d] == cand_count[d]) pick[d--] = 0;
    if (d < 0) break;
  }
  std::copy(best, best + n, out);
}

namespace {

// Cell centers z = k*delta with closure(z + delta*Q) inside the box.
struct CellLattice {
  int kmin[kMaxDim];
  int kmax[kMaxDim];
  int dims[kMaxDim];
  int n = 0;
  double delta = 0;
  std::size_t count = 1;
};

CellLattice cell_lattice(const Box& box, double delta, int n) {
  CellLattice lat;
  lat.n = n;
  lat.delta = delta;
  for (int i = 0; i < n; ++i) {
    double tol = 1e-9 * delta;
    lat.kmin[i] = static_cast<int>(std::ceil((box.lo[i] + 0.5 * delta) / delta - tol / delta));
    lat.kmax[i] = static_cast<int>(std::floor((box.hi[i] - 0.5 * delta) / delta + tol / delta));
    lat.dims[i] = std::max(0, lat.kmax[i] - lat.kmin[i] + 1);
    lat.count *= lat.dims[i];
  }
  return lat;
}

Vec lattice_center(const CellLattice& lat, std::size_t flat) {
  int idx[kMaxDim];
  for (int i = lat.n - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % lat.dims[i]);
    flat /= lat.dims[i];
  }
  Vec z(lat.n);
  for (int i = 0; i < lat.n; ++i) z[i] = (lat.kmin[i] + idx[i]) * lat.delta;
  return z;
}

void check_unfold_args(const GridField& u, double delta, int q_res) {
  if (!(delta > 0)) throw InvalidArgument("unfold: delta must be positive");
  if (q_res < 2) throw InvalidArgument("unfold: q_res must be >= 2");
  if (delta < 2.0 * u.max_spacing())
    throw ResolutionError("unfold: delta below 2h, cell not resolvable");
}

}  // namespace

UnfoldedField unfold(const GridField& u, double delta, int q_res, const Vec& well_a) {
  check_unfold_args(u, delta, q_res);
  if (well_a.dim != u.m) throw InvalidArgument("unfold: well dimension mismatch");
  UnfoldedField out;
  out.delta = delta;
  out.q_res = q_res;
  out.n = u.n;
  out.m = u.m;
  out.domain = u.box;
  out.well_a = well_a;

  CellLattice lat = cell_lattice(u.box, delta, u.n);
  const std::size_t spc = [&] {
    std::size_t t = 1;
    for (int i = 0; i < u.n; ++i) t *= q_res;
    return t;
  }();
  out.cell_centers.resize(lat.count);
  out.samples.resize(lat.count * spc * u.m);

  double cell_vol = 1;
  for (int i = 0; i < u.n; ++i) cell_vol *= delta;
  out.layer_measure = u.box.volume() - double(lat.count) * cell_vol;

#pragma omp parallel for schedule(static) if (parallel_enabled())
  for (long long ci = 0; ci < static_cast<long long>(lat.count); ++ci) {
    Vec z = lattice_center(lat, static_cast<std::size_t>(ci));
    out.cell_centers[ci] = z;
    int yi[kMaxDim] = {0};
    for (std::size_t s = 0; s < spc; ++s) {
      Vec x(u.n);
      for (int i = 0; i < u.n; ++i) {
        double y = (yi[i] + 0.5) / q_res - 0.5;
        x[i] = z[i] + delta * y;
      }
      Vec v = u.value_at(x);
      std::size_t base = (static_cast<std::size_t>(ci) * spc + s) * u.m;
      for (int j = 0; j < u.m; ++j) out.samples[base + j] = v[j];
      int d = u.n - 1;
      while (d >= 0 && ++yi[d] == q_res) yi[d--] = 0;
    }
  }
  return out;
}

double unfolding_defect(const GridField& u, double delta, int q_res, const Vec& well_a) {
  check_unfold_args(u, delta, q_res);
  if (well_a.dim != u.m) throw InvalidArgument("unfolding_defect: well dimension mismatch");

  // Split as  int_Omega |a-u|^2 dx  plus per-cell corrections; the boundary
  // layer is then measured exactly even when it does not align with any
  // quadrature grid.
  const int n = u.n, m = u.m;

  // midpoint rule over the field's own cells for the |a-u|^2 term
  double base_term = 0;
  {
    std::size_t cells = u.cell_count();
    double vol = 1;
    for (int i = 0; i < n; ++i) vol *= u.spacing(i);
    int dims[kMaxDim];
    for (int i = 0; i < n; ++i) dims[i] = u.counts[i] - 1;
#pragma omp parallel for schedule(static) reduction(+ : base_term) if (parallel_enabled())
    for (long long c = 0; c < static_cast<long long>(cells); ++c) {
      std::size_t rem = static_cast<std::size_t>(c);
      int idx[kMaxDim];
      for (int i = n - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(rem % dims[i]);
        rem /= dims[i];
      }
      // corner average = multilinear value at the cell center
      Vec mid(m);
      const int corners = 1 << n;
      for (int k = 0; k < corners; ++k) {
        int nid[kMaxDim];
        for (int i = 0; i < n; ++i) nid[i] = idx[i] + ((k >> i) & 1);
        std::size_t f = u.flat_index(nid);
        for (int j = 0; j < m; ++j) mid[j] += u.values[f * m + j];
      }
      mid *= 1.0 / corners;
      base_term += norm2(mid - well_a) * vol;
    }
  }

  CellLattice lat = cell_lattice(u.box, delta, n);
  std::size_t spc = 1;
  for (int i = 0; i < n; ++i) spc *= q_res;
  const double sub_vol = [&] {
    double v = 1;
    for (int i = 0; i < n; ++i) v *= delta / q_res;
    return v;
  }();

  double correction = 0;
#pragma omp parallel for schedule(static) reduction(+ : correction) if (parallel_enabled())
  for (long long ci = 0; ci < static_cast<long long>(lat.count); ++ci) {
    Vec z = lattice_center(lat, static_cast<std::size_t>(ci));
    // y samples of the unfolded values, their mean and mean square
    std::vector<Vec> ys(spc, Vec(m));
    Vec mean(m);
    double mean_sq = 0;
    {
      int yi[kMaxDim] = {0};
      for (std::size_t s = 0; s < spc; ++s) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = z[i] + delta * ((yi[i] + 0.5) / q_res - 0.5);
        ys[s] = u.value_at(x);
        mean += ys[s];
        mean_sq += norm2(ys[s]);
        int d = n - 1;
        while (d >= 0 && ++yi[d] == q_res) yi[d--] = 0;
      }
      mean *= 1.0 / double(spc);
      mean_sq /= double(spc);
    }
    // x samples over the same cell
    int xi[kMaxDim] = {0};
    for (std::size_t s = 0; s < spc; ++s) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = z[i] + delta * ((xi[i] + 0.5) / q_res - 0.5);
      Vec ux = u.value_at(x);
      double mean_dist = mean_sq - 2.0 * dot(mean, ux) + norm2(ux);
      correction += (mean_dist - norm2(ux - well_a)) * sub_vol;
      int d = n - 1;
      while (d >= 0 && ++xi[d] == q_res) xi[d--] = 0;
    }
  }

  double total = base_term + correction;
  return std::sqrt(std::max(0.0, total));
}

GridField truncate(const GridField& u, double r) {
  if (!(r > 0)) throw InvalidArgument("truncate: radius must be positive");
  GridField out = u;
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    double n2 = 0;
    for (int j = 0; j < u.m; ++j) {
      double v = out.values[f * u.m + j];
      n2 += v * v;
    }
    if (n2 > r * r) {
      double s = r / std::sqrt(n2);
      for (int j = 0; j < u.m; ++j) out.values[f * u.m + j] *= s;
      // guard the last ulp so truncation is exactly idempotent
      double m2 = 0;
      for (int j = 0; j < u.m; ++j) {
        double v = out.values[f * u.m + j];
        m2 += v * v;
      }
      if (m2 > r * r) {
        double shrink = 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
        for (int j = 0; j < u.m; ++j) out.values[f * u.m + j] *= shrink;
      }
    }
  }
  return out;
}

GridField phase_indicator(const GridField& u, const Vec& well_a, const Vec& well_b) {
  double ab = norm(well_b - well_a);
  if (ab == 0) throw InvalidArgument("phase_indicator: wells coincide");
  GridField phi = GridField::zeros(u.box, u.counts, 1);
  phi.n = u.n;
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    Vec v = u.value(f);
    phi.values[f] = (norm(v - well_b) - norm(v - well_a)) / ab;
  }
  return phi;
}

namespace {

// 3x3 binomial smoothing with edge replication; recovers sub-cell interface
// position from near-binary indicators before contour extraction.
GridField smooth_indicator(const GridField& phi) {
  GridField out = phi;
  const int nx = phi.counts[0], ny = phi.counts[1];
  auto at = [&](int i, int j) {
    i = std::clamp(i, 0, nx - 1);
    j = std::clamp(j, 0, ny - 1);
    return phi.values[std::size_t(i) * ny + j];
  };
  static const double w[3] = {0.25, 0.5, 0.25};
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      double acc = 0;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          acc += w[di + 1] * w[dj + 1] * at(i + di, j + dj);
      out.values[std::size_t(i) * ny + j] = acc;
    }
  return out;
}

struct Segment {
  double x0, y0, x1, y1;
  double length() const { return std::hypot(x1 - x0, y1 - y0); }
};

// Zero-level segments of a nodal scalar field by marching squares; saddles
// are disambiguated with the cell average.
std::vector<Segment> marching_squares(const GridField& phi) {
  const int nx = phi.counts[0], ny = phi.counts[1];
  const double hx = phi.spacing(0), hy = phi.spacing(1);
  auto val = [&](int i, int j) { return phi.values[std::size_t(i) * ny + j]; };
  auto inside = [](double v) { return v >= 0.0; };
  std::vector<Segment> segs;

  auto cross = [](double va, double vb) {
    double den = va - vb;
    return den == 0.0 ? 0.5 : va / den;
  };

  for (int i = 0; i < nx - 1; ++i) {
    for (int j = 0; j < ny - 1; ++j) {
      double v00 = val(i, j), v10 = val(i + 1, j);
      double v01 = val(i, j + 1), v11 = val(i + 1, j + 1);
      int code = (inside(v00) ? 1 : 0) | (inside(v10) ? 2 : 0) |
                 (inside(v11) ? 4 : 0) | (inside(v01) ? 8 : 0);
      if (code == 0 || code == 15) continue;
      double x0 = phi.box.lo[0] + i * hx, y0 = phi.box.lo[1] + j * hy;
      // edge crossing points (bottom, right, top, left)
      double bx = x0 + cross(v00, v10) * hx, by = y0;
      double rx = x0 + hx, ry = y0 + cross(v10, v11) * hy;
      double tx = x0 + cross(v01, v11) * hx, ty = y0 + hy;
      double lx = x0, ly = y0 + cross(v00, v01) * hy;
      auto add = [&](double ax, double ay, double cx, double cy) {
        segs.push_back({ax, ay, cx, cy});
      };
      switch (code) {
        case 1: case 14: add(bx, by, lx, ly); break;
        case 2: case 13: add(bx, by, rx, ry); break;
        case 4: case 11: add(rx, ry, tx, ty); break;
        case 8: case 7:  add(tx, ty, lx, ly); break;
        case 3: case 12: add(lx, ly, rx, ry); break;
        case 6: case 9:  add(bx, by, tx, ty); break;
        case 5: case 10: {
          double center = 0.25 * (v00 + v10 + v01 + v11);
          bool c_in = inside(center);
          bool corners_in = (code == 5);  // v00 & v11 inside
          if (c_in == corners_in) {
            add(bx, by, rx, ry);
            add(tx, ty, lx, ly);
          } else {
            add(bx, by, lx, ly);
            add(rx, ry, tx, ty);
          }
          break;
        }
      }
    }
  }
  return segs;
}

}  // namespace

double perimeter(const GridField& u, const Vec& well_a, const Vec& well_b) {
  if (norm2(well_a - well_b) == 0) throw InvalidArgument("perimeter: wells coincide");
  if (u.n == 1) {
    GridField phi = phase_indicator(u, well_a, well_b);
    int flips = 0;
    double last = 0;
    for (int i = 0; i < u.counts[0]; ++i) {
      double v = phi.values[i];
      if (v == 0.0) continue;
      if (last != 0.0 && ((v > 0) != (last > 0))) ++flips;
      last = v;
    }
    return double(flips);
  }
  if (u.n == 2) {
    GridField phi = smooth_indicator(phase_indicator(u, well_a, well_b));
    double len = 0;
    for (const Segment& s : marching_squares(phi)) len += s.length();
    return len;
  }
  throw UnsupportedDimension("perimeter: only N in {1,2} supported");
}

double interface_distance(const InterfaceSpec& spec, const Vec& x) {
  if (std::holds_alternative<PlaneInterface>(spec)) {
    const auto& p = std::get<PlaneInterface>(spec);
    return dot(x - p.point, p.normal) / norm(p.normal);
  }
  const auto& c = std::get<CircleInterface>(spec);
  return norm(x - c.center) - c.radius;
}

GridField signed_distance(const InterfaceSpec& spec, const GridField& grid_template) {
  GridField d = GridField::zeros(grid_template.box, grid_template.counts, 1);
  d.n = grid_template.n;
  const std::size_t nodes = d.node_count();
  for (std::size_t f = 0; f < nodes; ++f)
    d.values[f] = interface_distance(spec, d.node_coord(f));
  return d;
}

namespace {

double point_segment_distance(double px, double py, const Segment& s) {
  double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
  double wx = px - s.x0, wy = py - s.y0;
  double vv = vx * vx + vy * vy;
  double t = vv == 0 ? 0.0 : std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0);
  return std::hypot(px - (s.x0 + t * vx), py - (s.y0 + t * vy));
}

double eikonal_update(double a, double b, double hx, double hy) {
  // upwind solve of |grad d| = 1 from neighbour values a (x) and b (y)
  double d1 = std::min(a + hx, b + hy);
  double ax = 1.0 / (hx * hx), by = 1.0 / (hy * hy);
  double p = a * ax + b * by;
  double q = ax + by;
  double disc = p * p - q * (a * a * ax + b * b * by - 1.0);
  if (disc >= 0) {
    double d2 = (p + std::sqrt(disc)) / q;
    if (d2 >= std::max(a, b)) return std::min(d1, d2);
  }
  return d1;
}

}  // namespace

GridField signed_distance(const GridField& u, const Vec& well_a, const Vec& well_b) {
  if (u.n != 2) throw UnsupportedDimension("signed_distance from fields needs N=2");
  GridField phi = phase_indicator(u, well_a, well_b);
  GridField phis = smooth_indicator(phi);
  std::vector<Segment> segs = marching_squares(phis);
  if (segs.empty()) throw DegenerateInterface("signed_distance: empty interface");

  const int nx = u.counts[0], ny = u.counts[1];
  const double hx = u.spacing(0), hy = u.spacing(1);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(std::size_t(nx) * ny, inf);

  // seed exact distances near the front
  double band = 2.0 * std::max(hx, hy);
  for (const Segment& s : segs) {
    int i0 = std::max(0, int(std::floor((std::min(s.x0, s.x1) - band - u.box.lo[0]) / hx)));
    int i1 = std::min(nx - 1, int(std::ceil((std::max(s.x0, s.x1) + band - u.box.lo[0]) / hx)));
    int j0 = std::max(0, int(std::floor((std::min(s.y0, s.y1) - band - u.box.lo[1]) / hy)));
    int j1 = std::min(ny - 1, int(std::ceil((std::max(s.y0, s.y1) + band - u.box.lo[1]) / hy)));
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) {
        double px = u.box.lo[0] + i * hx, py = u.box.lo[1] + j * hy;
        double d = point_segment_distance(px, py, s);
        std::size_t f = std::size_t(i) * ny + j;
        dist[f] = std::min(dist[f], d);
      }
  }

  auto at = [&](int i, int j) -> double& { return dist[std::size_t(i) * ny + j]; };
  for (int pass = 0; pass < 3; ++pass) {
    for (int sweep = 0; sweep < 4; ++sweep) {
      int ibeg = (sweep & 1) ? nx - 1 : 0, iend = (sweep & 1) ? -1 : nx, istep = (sweep & 1) ? -1 : 1;
      int jbeg = (sweep & 2) ? ny - 1 : 0, jend = (sweep & 2) ? -1 : ny, jstep = (sweep & 2) ? -1 : 1;
      for (int i = ibeg; i != iend; i += istep)
        for (int j = jbeg; j != jend; j += jstep) {
          double a = inf, b = inf;
          if (i > 0) a = std::min(a, at(i - 1, j));
          if (i < nx - 1) a = std::min(a, at(i + 1, j));
          if (j > 0) b = std::min(b, at(i, j - 1));
          if (j < ny - 1) b = std::min(b, at(i, j + 1));
          if (!std::isfinite(a) && !std::isfinite(b)) continue;
          double cand;
          if (!std::isfinite(a)) cand = b + hy;
          else if (!std::isfinite(b)) cand = a + hx;
          else cand = eikonal_update(a, b, hx, hy);
          at(i, j) = std::min(at(i, j), cand);
        }
    }
  }

  GridField out = GridField::zeros(u.box, u.counts, 1);
  out.n = 2;
  for (std::size_t f = 0; f < dist.size(); ++f) {
    double sign = phi.values[f] >= 0 ? -1.0 : 1.0;  // negative on the a-phase
    out.values[f] = sign * dist[f];
  }
  return out;
}

namespace {
constexpr char kFieldMagic[4] = {'S', 'S', 'G', 'F'};
}

void save_field_binary(const GridField& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("field: cannot write " + path);
  out.write(kFieldMagic, 4);
  std::int32_t ver = 1;
  out.write(reinterpret_cast<const char*>(&ver), 4);
  std::int32_t nm[2] = {u.n, u.m};
  out.write(reinterpret_cast<const char*>(nm), sizeof nm);
  for (int i = 0; i < u.n; ++i) {
    std::int64_t c = u.counts[i];
    out.write(reinterpret_cast<const char*>(&c), 8);
  }
  for (int i = 0; i < u.n; ++i) out.write(reinterpret_cast<const char*>(&u.box.lo.c[i]), 8);
  for (int i = 0; i < u.n; ++i) out.write(reinterpret_cast<const char*>(&u.box.hi.c[i]), 8);
  out.write(reinterpret_cast<const char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * 8));
}

GridField load_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("field: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFieldMagic, 4) != 0)
    throw InvalidArgument("field: bad magic");
  std::int32_t ver, nm[2];
  in.read(reinterpret_cast<char*>(&ver), 4);
  in.read(reinterpret_cast<char*>(nm), sizeof nm);
  if (!in || nm[0] < 1 || nm[0] > kMaxDim || nm[1] < 1 || nm[1] > kMaxDim)
    throw InvalidArgument("field: bad dims");
  GridField u;
  u.n = nm[0];
  u.m = nm[1];
  for (int i = 0; i < u.n; ++i) {
    std::int64_t c;
    in.read(reinterpret_cast<char*>(&c), 8);
    u.counts[i] = static_cast<int>(c);
  }
  u.box.lo = Vec(u.n);
  u.box.hi = Vec(u.n);
  for (int i = 0; i < u.n; ++i) in.read(reinterpret_cast<char*>(&u.box.lo.c[i]), 8);
  for (int i = 0; i < u.n; ++i) in.read(reinterpret_cast<char*>(&u.box.hi.c[i]), 8);
  u.values.resize(u.node_count() * u.m);
  in.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * 8));
  if (!in) throw InvalidArgument("field: truncated payload");
  return u;
}

void save_field_csv(const GridField& u, const std::string& path) {
  if (u.n > 2) throw UnsupportedDimension("field csv: only N in {1,2}");
  std::ofstream out(path);
  if (!out) throw InvalidArgument("field: cannot write " + path);
  out << (u.n == 1 ? "x" : "x,y");
  for (int j = 0; j < u.m; ++j) out << ",v" << j;
  out << "\n";
  char buf[64];
  const std::size_t nodes = u.node_count();
  for (std::size_t f = 0; f < nodes; ++f) {
    Vec x = u.node_coord(f);
    for (int i = 0; i < u.n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", x[i]);
      out << (i ? "," : "") << buf;
    }
    for (int j = 0; j < u.m; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", u.values[f * u.m + j]);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace scalesep
