#include "scalesep/potential.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "scalesep/errors.hpp"

namespace scalesep {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Base two-well factor |z-a|^2 |z-b|^2; quartic, zero exactly at the wells.
double double_well(const Vec& z, const Vec& a, const Vec& b) {
  Vec da = z - a, db = z - b;
  return norm2(da) * norm2(db);
}

Vec double_well_grad(const Vec& z, const Vec& a, const Vec& b) {
  Vec da = z - a, db = z - b;
  double na = norm2(da), nb = norm2(db);
  Vec g(z.dim);
  for (int i = 0; i < z.dim; ++i) g[i] = 2.0 * da[i] * nb + 2.0 * db[i] * na;
  return g;
}

// Reduce y componentwise to the centered period cell. rint keeps the
// reduction exact under integer shifts, which is what the periodicity
// invariant tests rely on.
Vec reduce_to_cell(const Vec& y) {
  Vec r(y.dim);
  for (int i = 0; i < y.dim; ++i) r[i] = y[i] - std::rint(y[i]);
  return r;
}

int checkerboard_piece(const PotentialSpec& spec, const Vec& yr) {
  int idx = 0;
  for (int i = 0; i < spec.n; ++i) {
    int p = static_cast<int>(std::floor((yr[i] + 0.5) * spec.pieces));
    if (p < 0) p = 0;
    if (p >= spec.pieces) p = spec.pieces - 1;
    idx = idx * spec.pieces + p;
  }
  return idx;
}

double spatial_factor(const PotentialSpec& spec, const Vec& yr) {
  switch (spec.family) {
    case Family::SeparableCosine:
      return 1.0 + spec.alpha * std::cos(2.0 * kPi * yr[0]);
    case Family::Checkerboard:
      return spec.depths[checkerboard_piece(spec, yr)];
    default:
      return 1.0;
  }
}

double table_interp(const TabulatedData& t, const Vec& yr, const Vec& z) {
  const int dims = t.n + t.m;
  double coord[2 * kMaxDim];
  for (int i = 0; i < t.n; ++i) {
    double s = (yr[i] + 0.5) * (t.counts[i] - 1);
    coord[i] = std::min(std::max(s, 0.0), double(t.counts[i] - 1));
  }
  for (int j = 0; j < t.m; ++j) {
    double lo = t.z_lo[j], hi = t.z_hi[j];
    double s = (z[j] - lo) / (hi - lo) * (t.counts[t.n + j] - 1);
    coord[t.n + j] = std::min(std::max(s, 0.0), double(t.counts[t.n + j] - 1));
  }
  int base[2 * kMaxDim];
  double frac[2 * kMaxDim];
  for (int d = 0; d < dims; ++d) {
    int i0 = static_cast<int>(std::floor(coord[d]));
    if (i0 > t.counts[d] - 2) i0 = t.counts[d] - 2;
    if (i0 < 0) i0 = 0;
    base[d] = i0;
    frac[d] = coord[d] - i0;
  }
  double acc = 0;
  const int corners = 1 << dims;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int d = 0; d < dims; ++d) {
      int bit = (c >> d) & 1;
      w *= bit ? frac[d] : (1.0 - frac[d]);
      idx = idx * t.counts[d] + (base[d] + bit);
    }
    acc += w * t.values[idx];
  }
  return acc;
}

}  // namespace

void validate_spec(const PotentialSpec& spec) {
  if (spec.n < 1 || spec.n > kMaxDim) throw InvalidArgument("potential: N out of range");
  if (spec.m < 1 || spec.m > kMaxDim) throw InvalidArgument("potential: M out of range");
  if (spec.well_a.dim != spec.m || spec.well_b.dim != spec.m)
    throw InvalidArgument("potential: well dimension does not match M");
  if (norm2(spec.well_a - spec.well_b) == 0.0)
    throw InvalidArgument("potential: wells coincide");
  if (!(spec.growth_constant > 0)) throw InvalidArgument("potential: R1 must be positive");
  if (!(spec.scale > 0)) throw InvalidArgument("potential: scale must be positive");
  switch (spec.family) {
    case Family::SeparableCosine:
      if (!(spec.alpha >= 0.0 && spec.alpha < 1.0))
        throw InvalidArgument("potential: alpha must lie in [0,1)");
      break;
    case Family::Checkerboard: {
      if (spec.pieces < 1) throw InvalidArgument("potential: pieces must be >= 1");
      std::size_t want = 1;
      for (int i = 0; i < spec.n; ++i) want *= spec.pieces;
      if (spec.depths.size() != want)
        throw InvalidArgument("potential: depths must have pieces^N entries");
      for (double d : spec.depths)
        if (!(d > 0)) throw InvalidArgument("potential: depths must be positive");
      break;
    }
    case Family::Tabulated:
      if (!spec.table) throw InvalidArgument("potential: tabulated family without table");
      if (spec.table->n != spec.n || spec.table->m != spec.m)
        throw InvalidArgument("potential: table dimensions do not match spec");
      break;
    case Family::CustomAnalytic:
      if (!spec.custom_w) throw InvalidArgument("potential: custom family without evaluator");
      break;
  }
}

double eval_w(const PotentialSpec& spec, const Vec& y, const Vec& z) {
  if (!finite(y) || !finite(z)) throw InvalidArgument("eval_w: non-finite input");
  Vec yr = reduce_to_cell(y);
  switch (spec.family) {
    case Family::SeparableCosine:
    case Family::Checkerboard:
      return spec.scale * spatial_factor(spec, yr) * double_well(z, spec.well_a, spec.well_b);
    case Family::Tabulated:
      return spec.scale * table_interp(*spec.table, yr, z);
    case Family::CustomAnalytic:
      return spec.scale * spec.custom_w(yr, z);
  }
  return 0.0;
}

Vec eval_w_grad(const PotentialSpec& spec, const Vec& y, const Vec& z) {
  if (!finite(y) || !finite(z)) throw InvalidArgument("eval_w_grad: non-finite input");
  Vec yr = reduce_to_cell(y);
  switch (spec.family) {
    case Family::SeparableCosine:
    case Family::Checkerboard: {
      Vec g = double_well_grad(z, spec.well_a, spec.well_b);
      return g *= spec.scale * spatial_factor(spec, yr);
    }
    case Family::CustomAnalytic:
      if (spec.custom_grad) {
        Vec g = spec.custom_grad(yr, z);
        return g *= spec.scale;
      }
      [[fallthrough]];
    case Family::Tabulated: {
      // central differences, relative step
      double h = 1e-6 * (1.0 + norm(z));
      Vec g(spec.m);
      for (int j = 0; j < spec.m; ++j) {
        Vec zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        g[j] = (eval_w(spec, yr, zp) - eval_w(spec, yr, zm)) / (2.0 * h);
      }
      return g;
    }
  }
  return Vec(spec.m);
}

Quadrature1D make_quadrature_1d(const QuadratureRule& rule) {
  if (rule.nodes_per_axis < 2) throw InvalidArgument("quadrature: need >= 2 nodes per axis");
  Quadrature1D q;
  const int n = rule.nodes_per_axis;
  q.nodes.resize(n);
  q.weights.resize(n);
  if (rule.scheme == QuadratureRule::Scheme::MidpointTensor) {
    for (int i = 0; i < n; ++i) {
      q.nodes[i] = (i + 0.5) / n - 0.5;
      q.weights[i] = 1.0 / n;
    }
  } else {
    gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(n);
    for (int i = 0; i < n; ++i) {
      double x, w;
      gsl_integration_glfixed_point(-0.5, 0.5, i, &x, &w, tab);
      q.nodes[i] = x;
      q.weights[i] = w;
    }
    gsl_integration_glfixed_table_free(tab);
  }
  return q;
}

double w_hom(const PotentialSpec& spec, const Vec& z, const QuadratureRule& rule) {
  Quadrature1D q = make_quadrature_1d(rule);
  const int n = spec.n;
  const int nn = static_cast<int>(q.nodes.size());
  // tensor product over the N spatial axes
  int idx[kMaxDim] = {0};
  double acc = 0;
  while (true) {
    Vec y(n);
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      y[d] = q.nodes[idx[d]];
      w *= q.weights[idx[d]];
    }
    acc += w * eval_w(spec, y, z);
    int d = n - 1;
    while (d >= 0 && ++idx[d] == nn) idx[d--] = 0;
    if (d < 0) break;
  }
  return acc;
}

GrowthReport validate_growth(const PotentialSpec& spec, int sample_count,
                             double radius, std::uint64_t seed) {
  GrowthReport rep;
  rep.samples = sample_count;
  if (sample_count <= 0) {
    rep.vacuous = true;
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uy(-0.5, 0.5);
  std::uniform_real_distribution<double> uz(-radius, radius);
  const double r1 = spec.growth_constant;
  const double tol = 1e-12;
  for (int s = 0; s < sample_count; ++s) {
    Vec y(spec.n);
    for (int i = 0; i < spec.n; ++i) y[i] = uy(rng);
    Vec z(spec.m);
    do {
      for (int j = 0; j < spec.m; ++j) z[j] = uz(rng);
    } while (norm(z) > radius);

    double w = eval_w(spec, y, z);
    double zn2 = norm2(z);
    if (w < -tol)
      rep.violations.push_back({"nonneg", y, z, w, 0.0});
    if (norm(z) >= r1 && w < zn2 / r1 - tol)
      rep.violations.push_back({"lower", y, z, w, zn2 / r1});
    if (w > r1 * (1.0 + zn2) + tol)
      rep.violations.push_back({"upper", y, z, w, r1 * (1.0 + zn2)});

    double wa = eval_w(spec, y, spec.well_a);
    double wb = eval_w(spec, y, spec.well_b);
    if (std::abs(wa) > tol) rep.violations.push_back({"well", y, spec.well_a, wa, 0.0});
    if (std::abs(wb) > tol) rep.violations.push_back({"well", y, spec.well_b, wb, 0.0});
  }
  return rep;
}

std::shared_ptr<const TabulatedData> load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("tabulated: cannot open " + path);
  auto t = std::make_shared<TabulatedData>();
  std::string line;
  // header line: N M count... zlo... zhi...
  if (!std::getline(in, line)) throw InvalidArgument("tabulated: empty file");
  std::istringstream hs(line);
  hs >> t->n >> t->m;
  if (!hs || t->n < 1 || t->m < 1 || t->n > kMaxDim || t->m > kMaxDim)
    throw InvalidArgument("tabulated: bad header dims");
  t->counts.resize(t->n + t->m);
  std::size_t total = 1;
  for (int d = 0; d < t->n + t->m; ++d) {
    hs >> t->counts[d];
    if (!hs || t->counts[d] < 2) throw InvalidArgument("tabulated: bad counts");
    total *= t->counts[d];
  }
  t->z_lo = Vec(t->m);
  t->z_hi = Vec(t->m);
  for (int j = 0; j < t->m; ++j) hs >> t->z_lo[j];
  for (int j = 0; j < t->m; ++j) hs >> t->z_hi[j];
  if (!hs) throw InvalidArgument("tabulated: bad z-box header");
  t->values.reserve(total);
  double v;
  while (in >> v) t->values.push_back(v);
  if (t->values.size() != total)
    throw InvalidArgument("tabulated: value count does not match header");
  return t;
}

namespace {
constexpr char kTableMagic[4] = {'S', 'S', 'W', 'T'};
}

void save_tabulated_binary(const TabulatedData& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("tabulated: cannot write " + path);
  out.write(kTableMagic, 4);
  std::int32_t nm[2] = {t.n, t.m};
  out.write(reinterpret_cast<const char*>(nm), sizeof nm);
  for (int d = 0; d < t.n + t.m; ++d) {
    std::int64_t c = t.counts[d];
    out.write(reinterpret_cast<const char*>(&c), sizeof c);
  }
  for (int j = 0; j < t.m; ++j) out.write(reinterpret_cast<const char*>(&t.z_lo.c[j]), 8);
  for (int j = 0; j < t.m; ++j) out.write(reinterpret_cast<const char*>(&t.z_hi.c[j]), 8);
  out.write(reinterpret_cast<const char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * 8));
}

std::shared_ptr<const TabulatedData> load_tabulated_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("tabulated: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kTableMagic, 4) != 0)
    throw InvalidArgument("tabulated: bad magic");
  auto t = std::make_shared<TabulatedData>();
  std::int32_t nm[2];
  in.read(reinterpret_cast<char*>(nm), sizeof nm);
  t->n = nm[0];
  t->m = nm[1];
  if (!in || t->n < 1 || t->m < 1 || t->n > kMaxDim || t->m > kMaxDim)
    throw InvalidArgument("tabulated: bad dims");
  t->counts.resize(t->n + t->m);
  std::size_t total = 1;
  for (int d = 0; d < t->n + t->m; ++d) {
    std::int64_t c;
    in.read(reinterpret_cast<char*>(&c), sizeof c);
    if (!in || c < 2) throw InvalidArgument("tabulated: bad counts");
    t->counts[d] = static_cast<int>(c);
    total *= t->counts[d];
  }
  t->z_lo = Vec(t->m);
  t->z_hi = Vec(t->m);
  for (int j = 0; j < t->m; ++j) in.read(reinterpret_cast<char*>(&t->z_lo.c[j]), 8);
  for (int j = 0; j < t->m; ++j) in.read(reinterpret_cast<char*>(&t->z_hi.c[j]), 8);
  t->values.resize(total);
  in.read(reinterpret_cast<char*>(t->values.data()), static_cast<std::streamsize>(total * 8));
  if (!in) throw InvalidArgument("tabulated: truncated payload");
  return t;
}

std::shared_ptr<const TabulatedData> tabulate_spec(const PotentialSpec& src,
                                                   int y_res, int z_res,
                                                   const Vec& z_lo, const Vec& z_hi) {
  auto t = std::make_shared<TabulatedData>();
  t->n = src.n;
  t->m = src.m;
  t->z_lo = z_lo;
  t->z_hi = z_hi;
  t->counts.assign(t->n, y_res);
  t->counts.insert(t->counts.end(), t->m, z_res);
  std::size_t total = 1;
  for (int c : t->counts) total *= c;
  t->values.resize(total);
  const int dims = t->n + t->m;
  std::vector<int> idx(dims, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec y(t->n), z(t->m);
    for (int d = 0; d < t->n; ++d)
      y[d] = -0.5 + double(idx[d]) / (t->counts[d] - 1);
    for (int j = 0; j < t->m; ++j)
      z[j] = z_lo[j] + (z_hi[j] - z_lo[j]) * double(idx[t->n + j]) / (t->counts[t->n + j] - 1);
    t->values[flat] = eval_w(src, y, z);
    int d = dims - 1;
    while (d >= 0 && ++idx[d] == t->counts[d]) idx[d--] = 0;
  }
  return t;
}

}  // namespace scalesep
