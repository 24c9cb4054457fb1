#include <doctest.h>

#include <cmath>

#include "scalesep/errors.hpp"
#include "scalesep/recovery.hpp"

using namespace scalesep;

namespace {

constexpr double kSigmaRef = 8.0 / 3.0;

PotentialSpec cosine_spec(double alpha = 0.5) {
  PotentialSpec s;
  s.alpha = alpha;
  return s;
}

Curve straight_ab(int segments) {
  Curve c;
  for (int k = 0; k <= segments; ++k)
    c.nodes.push_back(Vec{-1.0 + 2.0 * k / segments});
  return c;
}

double quartic_whom(const Vec& z) {
  double q = 1.0 - z[0] * z[0];
  return q * q;
}

Box unit_domain() {
  Box b;
  b.lo = Vec{0.0};
  b.hi = Vec{1.0};
  return b;
}

GridField domain_grid(int count) {
  std::array<int, kMaxDim> c{};
  c[0] = count;
  return GridField::zeros(unit_domain(), c, 1);
}

InterfaceSpec mid_plane() { return PlaneInterface{Vec{0.5}, Vec{1.0}}; }

}  // namespace

TEST_CASE("reparametrization with a vanishing potential is linear") {
  Curve gamma = straight_ab(64);
  auto zero = [](const Vec&) { return 0.0; };
  const double eps = 0.05, lambda = 0.04;
  ProfileSolution p = reparametrize_profile(gamma, zero, eps, lambda);
  // g' = sqrt(lambda)/(eps |gamma'|) is constant: tau = eps L / (2 sqrt(lambda))
  double expect_tau = eps * 2.0 / (2.0 * std::sqrt(lambda));
  CHECK(p.tau == doctest::Approx(expect_tau).epsilon(1e-3));
  CHECK(p.g_at(0.0) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(p.g_at(-p.tau / 2) == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("quartic profile satisfies the energy inequality and the tau bracket") {
  Curve gamma = straight_ab(256);
  const double eps = 0.05, lambda = 0.01;
  ProfileSolution p = reparametrize_profile(gamma, quartic_whom, eps, lambda);

  // profile energy stays below the curve bound
  CHECK(p.profile_energy <= p.energy_bound + 1e-3);
  CHECK(p.energy_bound ==
        doctest::Approx(kSigmaRef + 2.0 * std::sqrt(lambda) * 2.0).epsilon(1e-3));

  // tau bracket: below (eps/sqrt(lambda)) L, above a positive multiple of eps
  CHECK(p.tau <= eps / std::sqrt(lambda) * p.curve_length);
  CHECK(p.tau >= eps * 2.0 / (2.0 * std::sqrt(lambda + 1.0)));

  // g strictly increasing
  for (std::size_t i = 1; i < p.gs.size(); ++i) CHECK(p.gs[i] > p.gs[i - 1]);
  CHECK(p.gs.front() == -1.0);
  CHECK(p.gs.back() == 1.0);
}

TEST_CASE("profile argument validation") {
  Curve gamma = straight_ab(32);
  CHECK_THROWS_AS(reparametrize_profile(gamma, quartic_whom, 0.05, 0.0), InvalidArgument);
  CHECK_THROWS_AS(reparametrize_profile(gamma, quartic_whom, -1.0, 0.01), InvalidArgument);
  Curve stalled = gamma;
  stalled.nodes[5] = stalled.nodes[6];  // interior zero-speed node
  CHECK_THROWS_AS(reparametrize_profile(stalled, quartic_whom, 0.05, 0.01),
                  InvalidArgument);
}

TEST_CASE("recovery field structure") {
  Curve gamma = straight_ab(256);
  ProfileSolution p = reparametrize_profile(gamma, quartic_whom, 0.05, 0.01);
  GridField tmpl = domain_grid(1601);
  GridField u = build_recovery(mid_plane(), p, tmpl, 0.0);

  Vec a{-1.0}, b{1.0};
  for (std::size_t f = 0; f < u.node_count(); ++f) {
    double d = u.node_coord(f)[0] - 0.5;
    if (d > p.tau) CHECK(u.values[f] == 1.0);
    if (d < -p.tau) CHECK(u.values[f] == -1.0);
  }
  // the band midpoint carries gamma(g(0))
  CHECK(u.value_at(Vec{0.5})[0] == doctest::Approx(p.gamma.at(p.g_at(0.0))[0]).epsilon(1e-3));
  // sharp perimeter is recovered
  CHECK(perimeter(u, a, b) == doctest::Approx(1.0));

  // band wider than the domain
  ProfileSolution wide = reparametrize_profile(gamma, quartic_whom, 0.4, 1e-4);
  CHECK(wide.tau > 0.5);
  CHECK_THROWS_AS(build_recovery(mid_plane(), wide, tmpl, 0.0), ProfileTooWide);
  CHECK_THROWS_AS(build_recovery(mid_plane(), p, tmpl, p.tau), InvalidArgument);
}

TEST_CASE("recovery field energy approaches sigma times perimeter") {
  PotentialSpec s = cosine_spec();
  QuadratureRule quad;
  GeodesicConfig geo;
  GeodesicResult sig = sigma_hom(s, quad, geo);
  double eta = 0.01 * sig.distance;
  double lambda = std::pow(eta / sig.curve.euclidean_length(), 2);
  auto whom_fn = [&](const Vec& z) { return w_hom(s, z, quad); };

  EnergyParams p;
  p.eps = 0.05;
  p.delta = 0.0025;
  ProfileSolution prof = reparametrize_profile(sig.curve, whom_fn, p.eps, lambda);
  GridField tmpl = domain_grid(1601);
  GridField u = build_recovery(mid_plane(), prof, tmpl, 0.0);
  double e = two_scale_energy(s, u, p);
  CHECK(e == doctest::Approx(sig.distance).epsilon(0.10));
}

TEST_CASE("mass adjustment on a symmetric interface needs no shift") {
  Curve gamma = straight_ab(256);
  ProfileSolution p = reparametrize_profile(gamma, quartic_whom, 0.05, 0.01);
  GridField tmpl = domain_grid(1601);
  auto [u, v] = adjust_mass(mid_plane(), p, tmpl, 0.5, Vec{-1.0}, Vec{1.0});
  CHECK(std::abs(v) < 1e-6);
  CHECK(std::abs(field_mass(u)[0]) <= 1e-10);
}

TEST_CASE("mass adjustment with an asymmetric profile") {
  PotentialSpec s;
  s.family = Family::CustomAnalytic;
  s.custom_w = [](const Vec&, const Vec& z) {
    double q = 1.0 - z[0] * z[0];
    return q * q * (1.0 + 0.25 * std::sin(1.5707963267948966 * z[0]));
  };
  QuadratureRule quad;
  GeodesicConfig geo;
  GeodesicResult sig = sigma_hom(s, quad, geo);
  double lambda = std::pow(0.01 * sig.distance / sig.curve.euclidean_length(), 2);
  auto whom_fn = [&](const Vec& z) { return w_hom(s, z, quad); };

  GridField tmpl = domain_grid(1601);
  double prev_v = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.05, 0.025}) {
    ProfileSolution prof = reparametrize_profile(sig.curve, whom_fn, eps, lambda);
    auto [u, v] = adjust_mass(mid_plane(), prof, tmpl, 0.5, Vec{-1.0}, Vec{1.0});
    CHECK(std::abs(field_mass(u)[0]) <= 1e-10);
    CHECK(v != 0.0);
    CHECK(std::abs(v) <= std::abs(prev_v) * 1.1);  // v -> 0 along the sequence
    prev_v = v;
  }

  // unreachable target: the band cannot move enough mass
  ProfileSolution prof = reparametrize_profile(straight_ab(256), quartic_whom, 0.05, 0.01);
  CHECK_THROWS_AS(adjust_mass(mid_plane(), prof, tmpl, 0.05, Vec{-1.0}, Vec{1.0}),
                  MassUnreachable);
}

TEST_CASE("recovery sweep: ratios settle and the field approaches the limit") {
  PotentialSpec s = cosine_spec();
  SweepConfig cfg;
  cfg.sequence.epsilons = {0.1, 0.05};
  cfg.domain = unit_domain();
  SweepResult res = recovery_sweep(s, mid_plane(), cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.sigma == doctest::Approx(kSigmaRef).epsilon(1e-3));
  for (const SweepRow& r : res.rows) {
    CHECK(r.ratio <= 1.0 + 3.0 * cfg.eta_fraction + 0.05);
    CHECK(r.profile_energy <= r.energy_bound + 1e-3);
    // tau stays proportional to eps
    CHECK(r.tau / r.eps == doctest::Approx(res.rows[0].tau / res.rows[0].eps).epsilon(0.5));
  }
  CHECK(res.rows[1].ratio <= res.rows[0].ratio * 1.03);
  CHECK(res.rows[1].l2_dist < res.rows[0].l2_dist);

  SUBCASE("mass-constrained variant preserves the mass at every scale") {
    SweepConfig mc = cfg;
    mc.mass_fraction = 0.5;
    SweepResult res2 = recovery_sweep(s, mid_plane(), mc);
    for (const SweepRow& r : res2.rows) CHECK(std::abs(r.v) < r.tau / 2);
  }
}
