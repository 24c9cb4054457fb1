#include <doctest.h>

#include <cmath>

#include "scalesep/errors.hpp"
#include "scalesep/geodesic.hpp"

using namespace scalesep;

namespace {

PotentialSpec cosine_spec(double alpha = 0.5) {
  PotentialSpec s;
  s.alpha = alpha;
  return s;
}

ConformalMetric const_metric(double c, int m) {
  ConformalMetric metric;
  metric.well_a = Vec(m);
  metric.well_b = Vec(m);
  metric.well_b[0] = 1.0;
  metric.factor = [c](const Vec&) { return c; };
  return metric;
}

ConformalMetric quartic_metric_1d() {
  ConformalMetric metric;
  metric.well_a = Vec{-1.0};
  metric.well_b = Vec{1.0};
  metric.factor = [](const Vec& z) {
    double v = 1.0 - z[0] * z[0];
    return 2.0 * std::sqrt(std::max(0.0, v * v));
  };
  return metric;
}

Curve straight_curve(const Vec& p, const Vec& q, int segments) {
  Curve c;
  for (int k = 0; k <= segments; ++k)
    c.nodes.push_back(p + (double(k) / segments) * (q - p));
  return c;
}

constexpr double kSigmaRef = 8.0 / 3.0;  // 2 * integral of (1 - s^2) over [-1,1]

}  // namespace

TEST_CASE("curve energy basics") {
  ConformalMetric m = const_metric(3.0, 2);
  Curve straight = straight_curve(Vec{0.0, 0.0}, Vec{1.0, 1.0}, 16);
  CHECK(curve_energy(m, straight) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-13));

  Curve degenerate;
  degenerate.nodes = {Vec{0.5, 0.5}, Vec{0.5, 0.5}, Vec{0.5, 0.5}};
  CHECK(curve_energy(m, degenerate) == 0.0);
}

TEST_CASE("curve energy of the quartic metric reaches the closed form") {
  ConformalMetric m = quartic_metric_1d();
  Curve c = straight_curve(Vec{-1.0}, Vec{1.0}, 2000);
  CHECK(curve_energy(m, c) == doctest::Approx(kSigmaRef).epsilon(1e-4 / kSigmaRef));
}

TEST_CASE("curve energy is invariant under node duplication") {
  ConformalMetric m = quartic_metric_1d();
  Curve c = straight_curve(Vec{-1.0}, Vec{1.0}, 64);
  Curve doubled;
  for (int k = 0; k < 64; ++k) {
    doubled.nodes.push_back(c.nodes[k]);
    doubled.nodes.push_back(midpoint(c.nodes[k], c.nodes[k + 1]));
  }
  doubled.nodes.push_back(c.nodes.back());
  CHECK(std::abs(curve_energy(m, doubled) - curve_energy(m, c)) < 1e-12);
}

TEST_CASE("geodesic distance in the Euclidean case") {
  ConformalMetric m = const_metric(1.0, 2);
  GeodesicConfig cfg;
  cfg.graph_res = 101;

  GeodesicResult same = geodesic_distance(m, Vec{0.2, 0.7}, Vec{0.2, 0.7}, cfg);
  CHECK(same.distance == 0.0);

  Vec p{-0.8, -0.3}, q{0.9, 0.6};
  GeodesicResult r = geodesic_distance(m, p, q, cfg);
  double exact = norm(q - p);
  CHECK(r.distance == doctest::Approx(exact).epsilon(0.01));
  // refinement straightens the graph path
  for (int k = 0; k <= r.curve.segments(); ++k) {
    Vec x = r.curve.at(-1.0 + 2.0 * k / r.curve.segments());
    Vec d = q - p;
    double t = dot(x - p, d) / norm2(d);
    CHECK(norm(x - (p + t * d)) < 0.02 * exact);
  }
}

TEST_CASE("bounding box must contain the endpoints") {
  ConformalMetric m = const_metric(1.0, 1);
  GeodesicConfig cfg;
  Box tiny;
  tiny.lo = Vec{0.0};
  tiny.hi = Vec{0.5};
  cfg.box = tiny;
  CHECK_THROWS_AS(geodesic_distance(m, Vec{-1.0}, Vec{1.0}, cfg), InvalidArgument);
  CHECK_THROWS_AS(geodesic_distance(m, Vec{std::nan("")}, Vec{1.0}, cfg), InvalidArgument);
}

TEST_CASE("sigma_hom matches the closed form in one phase dimension") {
  PotentialSpec s = cosine_spec(0.5);
  QuadratureRule quad;
  GeodesicConfig cfg;
  GeodesicResult r = sigma_hom(s, quad, cfg);
  CHECK(r.distance == doctest::Approx(kSigmaRef).epsilon(1e-3 / kSigmaRef));
  CHECK(r.graph_distance == doctest::Approx(kSigmaRef).epsilon(1e-3 / kSigmaRef));
}

TEST_CASE("sigma_hom scales like the square root of the potential") {
  QuadratureRule quad;
  GeodesicConfig cfg;
  PotentialSpec base = cosine_spec();
  PotentialSpec scaled = base;
  scaled.scale = 16.0;  // c^2 with c = 4
  double s1 = sigma_hom(base, quad, cfg).distance;
  double s4 = sigma_hom(scaled, quad, cfg).distance;
  CHECK(s4 == doctest::Approx(4.0 * s1).epsilon(1e-3));
}

TEST_CASE("geodesic distance is symmetric and satisfies the triangle inequality") {
  PotentialSpec s;
  s.m = 2;
  s.well_a = Vec{-1.0, 0.0};
  s.well_b = Vec{1.0, 0.0};
  QuadratureRule quad;
  ConformalMetric m = metric_from_whom(s, quad);
  GeodesicConfig cfg;
  cfg.graph_res = 81;
  cfg.max_refine_iters = 200;
  Box box;
  box.lo = Vec{-2.0, -2.0};
  box.hi = Vec{2.0, 2.0};
  cfg.box = box;

  Vec p{-1.0, 0.0}, q{0.4, 0.3}, r{1.0, 0.0};
  double dpq = geodesic_distance(m, p, q, cfg).distance;
  double dqp = geodesic_distance(m, q, p, cfg).distance;
  CHECK(std::abs(dpq - dqp) <= 0.01 * std::max(dpq, dqp));

  double dpr = geodesic_distance(m, p, r, cfg).distance;
  double dqr = geodesic_distance(m, q, r, cfg).distance;
  CHECK(dpr <= dpq + dqr + 0.02 * dpr);
}

TEST_CASE("length equals the sum of pairwise distances along a minimizer") {
  PotentialSpec s = cosine_spec();
  QuadratureRule quad;
  GeodesicConfig cfg;
  GeodesicResult r = sigma_hom(s, quad, cfg);
  ConformalMetric m = metric_from_whom(s, quad);

  // partition the refined minimizer and re-solve each piece locally
  const int parts = 4;
  double sum = 0;
  GeodesicConfig local = cfg;
  local.graph_res = 801;
  local.max_refine_iters = 200;
  Box box;
  box.lo = Vec{-2.0};
  box.hi = Vec{2.0};
  local.box = box;
  for (int k = 0; k < parts; ++k) {
    Vec a = r.curve.at(-1.0 + 2.0 * k / parts);
    Vec b = r.curve.at(-1.0 + 2.0 * (k + 1) / parts);
    sum += geodesic_distance(m, a, b, local).distance;
  }
  CHECK(sum == doctest::Approx(r.distance).epsilon(0.03));
}

TEST_CASE("equi-arclength reparametrization") {
  ConformalMetric euclid = const_metric(1.0, 1);
  Curve uneven;
  uneven.nodes = {Vec{0.0}, Vec{0.1}, Vec{0.15}, Vec{0.6}, Vec{1.0}};
  Curve out = equi_arclength_reparam(euclid, uneven);
  REQUIRE(out.segments() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(norm(out.nodes[k + 1] - out.nodes[k]) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(curve_energy(euclid, out) - curve_energy(euclid, uneven)) < 1e-10);

  // double-well metric: degenerate per-segment lengths equalize
  ConformalMetric dw = quartic_metric_1d();
  Curve straight = straight_curve(Vec{-1.0}, Vec{1.0}, 256);
  Curve rp = equi_arclength_reparam(dw, straight);
  double mean = 0, var = 0;
  std::vector<double> lens;
  for (int k = 0; k < rp.segments(); ++k) {
    double l = dw.factor(midpoint(rp.nodes[k], rp.nodes[k + 1])) *
               norm(rp.nodes[k + 1] - rp.nodes[k]);
    lens.push_back(l);
    mean += l;
  }
  mean /= lens.size();
  for (double l : lens) var += (l - mean) * (l - mean);
  double cv = std::sqrt(var / lens.size()) / mean;
  CHECK(cv < 0.01);

  Curve zero;
  zero.nodes = {Vec{-1.0}, Vec{-1.0}, Vec{-1.0}};
  CHECK_THROWS_AS(equi_arclength_reparam(dw, zero), InvalidArgument);
}

TEST_CASE("metric domination: the cell potential never beats w_hom") {
  PotentialSpec s = cosine_spec();
  QuadratureRule quad;
  CellConfig cell;
  cell.restarts = 4;
  cell.max_iters = 600;
  GeodesicConfig cfg;
  cfg.metric_table_res = 129;
  double sh = sigma_hom(s, quad, cfg).distance;
  GeodesicResult se = sigma_eta(s, 0.15, cell, cfg, quad);
  CHECK(se.distance <= sh * 1.02);
  CHECK(se.distance > 0.0);
}

TEST_CASE("d0 probe: distances grow toward the w_hom distance") {
  PotentialSpec s = cosine_spec();
  QuadratureRule quad;
  CellConfig cell;
  cell.restarts = 4;
  cell.max_iters = 600;
  GeodesicConfig cfg;
  cfg.metric_table_res = 129;

  D0Probe same = d0_probe(s, Vec{0.3}, Vec{0.3}, {0.2, 0.1}, cell, cfg, quad);
  for (const auto& row : same.rows) CHECK(row.distance == 0.0);

  D0Probe wells = d0_probe(s, s.well_a, s.well_b, {0.2, 0.1, 0.05}, cell, cfg, quad);
  REQUIRE(wells.rows.size() == 3);
  for (const auto& row : wells.rows) {
    CHECK(!row.flagged);
    CHECK(row.distance <= wells.whom_distance * 1.02);
  }
  CHECK(wells.rows[0].distance <= wells.rows[1].distance * 1.02);
  CHECK(wells.rows[1].distance <= wells.rows[2].distance * 1.02);
  CHECK(wells.sup <= wells.whom_distance * 1.02);
}
