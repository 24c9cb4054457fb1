#include "scalesep/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "scalesep/csv.hpp"
#include "scalesep/errors.hpp"
#include "scalesep/log.hpp"
#include "scalesep/parallel.hpp"
#include "scalesep/recovery.hpp"

namespace scalesep {

namespace {

std::string out_path(const CliOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

// segment sample z(t) = a + t (b - a)
std::vector<Vec> segment_samples(const PotentialSpec& spec, double t0, double t1, int count) {
  if (count < 1) throw ConfigError("config: sample count must be >= 1");
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? t0 : t0 + (t1 - t0) * i / (count - 1);
    out.push_back(spec.well_a + t * (spec.well_b - spec.well_a));
  }
  return out;
}

void svg_plot(const std::string& path, const std::vector<double>& xs,
              const std::vector<double>& ys, const std::string& title) {
  if (xs.size() != ys.size() || xs.empty()) return;
  const int W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xmin = std::min(xmin, xs[i]);
    xmax = std::max(xmax, xs[i]);
    ymin = std::min(ymin, ys[i]);
    ymax = std::max(ymax, ys[i]);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  std::ofstream out(path);
  if (!out) throw InvalidArgument("plot: cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
      << "' stroke='black'/>\n";
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "<text x='%d' y='%d' font-size='11'>%.4g</text>", ml - 4, H - mb + 16, xmin);
  out << buf << "\n";
  std::snprintf(buf, sizeof buf,
                "<text x='%d' y='%d' text-anchor='end' font-size='11'>%.4g</text>", W - mr,
                H - mb + 16, xmax);
  out << buf << "\n";
  std::snprintf(buf, sizeof buf,
                "<text x='%d' y='%d' text-anchor='end' font-size='11'>%.4g</text>", ml - 6,
                H - mb, ymin);
  out << buf << "\n";
  std::snprintf(buf, sizeof buf,
                "<text x='%d' y='%d' text-anchor='end' font-size='11'>%.4g</text>", ml - 6,
                mt + 10, ymax);
  out << buf << "\n";
  out << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
  for (std::size_t i = 0; i < xs.size(); ++i) out << px(xs[i]) << "," << py(ys[i]) << " ";
  out << "'/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i])
        << "' r='3' fill='steelblue'/>\n";
  out << "</svg>\n";
}

InterfaceSpec interface_from_config(const ConfigMap& cfg, const std::string& section, int n) {
  std::string kind = cfg.get_str(section, "interface", "plane");
  if (kind == "plane") {
    PlaneInterface p;
    std::vector<double> pt_def(n, 0.5), nrm_def(n, 0.0);
    nrm_def[0] = 1.0;
    std::vector<double> pt = cfg.get_list(section, "plane_point", pt_def);
    std::vector<double> nr = cfg.get_list(section, "plane_normal", nrm_def);
    if (static_cast<int>(pt.size()) != n || static_cast<int>(nr.size()) != n)
      throw ConfigError("config: plane point/normal need n components");
    p.point = Vec(n);
    p.normal = Vec(n);
    for (int i = 0; i < n; ++i) {
      p.point[i] = pt[i];
      p.normal[i] = nr[i];
    }
    if (norm2(p.normal) == 0) throw ConfigError("config: zero plane normal");
    return p;
  }
  if (kind == "circle") {
    if (n != 2) throw ConfigError("config: circle interface needs n = 2");
    CircleInterface c;
    std::vector<double> ce = cfg.get_list(section, "circle_center", {0.5, 0.5});
    c.center = Vec(2);
    c.center[0] = ce[0];
    c.center[1] = ce[1];
    c.radius = cfg.get_double(section, "circle_radius", 0.25);
    if (!(c.radius > 0)) throw ConfigError("config: circle radius must be positive");
    return c;
  }
  throw ConfigError("config: interface must be plane or circle");
}

GridField initial_field(const ConfigMap& cfg, const std::string& section,
                        const PotentialSpec& spec, const GridField& tmpl,
                        const InterfaceSpec& interface, std::uint64_t seed) {
  std::string kind = cfg.get_str(section, "init", "step");
  GridField u = GridField::zeros(tmpl.box, tmpl.counts, spec.m);
  u.n = tmpl.n;
  const std::size_t nodes = u.node_count();
  if (kind == "a" || kind == "b") {
    Vec w = kind == "a" ? spec.well_a : spec.well_b;
    for (std::size_t f = 0; f < nodes; ++f) u.set_value(f, w);
    return u;
  }
  if (kind == "step") {
    for (std::size_t f = 0; f < nodes; ++f) {
      double d = interface_distance(interface, u.node_coord(f));
      u.set_value(f, d < 0 ? spec.well_a : spec.well_b);
    }
    return u;
  }
  if (kind == "smooth") {
    double width = cfg.get_double(section, "init_width", 0.1);
    for (std::size_t f = 0; f < nodes; ++f) {
      double d = interface_distance(interface, u.node_coord(f));
      double t = 0.5 * (1.0 + std::tanh(d / width));
      u.set_value(f, spec.well_a + t * (spec.well_b - spec.well_a));
    }
    return u;
  }
  if (kind == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> un(-0.5, 0.5);
    Vec mid = midpoint(spec.well_a, spec.well_b);
    Vec span = spec.well_b - spec.well_a;
    for (std::size_t f = 0; f < nodes; ++f) {
      Vec v = mid;
      for (int j = 0; j < spec.m; ++j) v[j] += un(rng) * span[j];
      u.set_value(f, v);
    }
    return u;
  }
  throw ConfigError("config: init must be one of step, smooth, random, a, b");
}

}  // namespace

int cmd_whom(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  QuadratureRule quad = quadrature_from_config(cfg, "whom");
  double t0 = cfg.get_double("whom", "t_min", -0.25);
  double t1 = cfg.get_double("whom", "t_max", 1.25);
  int count = cfg.get_int("whom", "count", 61);

  std::string header;
  for (int j = 0; j < spec.m; ++j) header += "z" + std::to_string(j) + ",";
  header += "whom";
  CsvWriter csv(out_path(opt, "whom.csv"), header);
  for (const Vec& z : segment_samples(spec, t0, t1, count)) {
    for (int j = 0; j < spec.m; ++j) csv.field(z[j]);
    csv.field(w_hom(spec, z, quad));
    csv.end_row();
  }
  std::printf("whom: wrote %d rows; wells %.3g / %.3g\n", count,
              w_hom(spec, spec.well_a, quad), w_hom(spec, spec.well_b, quad));
  return 0;
}

int cmd_weta(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  CellConfig cell = cell_from_config(cfg, "weta", opt.seed);
  std::vector<double> etas = cfg.get_list("weta", "eta_list", {cell.eta});
  double t0 = cfg.get_double("weta", "t_min", 0.0);
  double t1 = cfg.get_double("weta", "t_max", 1.0);
  int count = cfg.get_int("weta", "count", 11);

  std::string header;
  for (int j = 0; j < spec.m; ++j) header += "z" + std::to_string(j) + ",";
  header += "eta,value,sup_excess,product_excess,boundary_excess,iterations";
  CsvWriter csv(out_path(opt, "weta.csv"), header);
  std::vector<Vec> samples = segment_samples(spec, t0, t1, count);
  for (double eta : etas) {
    for (const CellTableEntry& e : w_eta_table(spec, samples, eta, cell)) {
      if (e.failed) throw DivergedError("weta: entry failed: " + e.error);
      for (int j = 0; j < spec.m; ++j) csv.field(e.z[j]);
      csv.row(eta, e.value, e.residuals.sup_excess, e.residuals.product_excess,
              e.residuals.boundary_excess, e.iterations);
    }
  }
  std::printf("weta: %zu etas x %d samples\n", etas.size(), count);
  return 0;
}

int cmd_sigma(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  QuadratureRule quad = quadrature_from_config(cfg, "sigma");
  GeodesicConfig geo = geodesic_from_config(cfg, "sigma");

  GeodesicResult res = sigma_hom(spec, quad, geo);
  std::printf("sigma_hom = %.6f (graph %.6f, %d refine iterations)\n", res.distance,
              res.graph_distance, res.refine_iterations);
  save_curve_csv(res.curve, out_path(opt, "sigma_curve.csv"));

  std::vector<double> etas = cfg.get_list("sigma", "eta_list", {});
  if (!etas.empty()) {
    CellConfig cell = cell_from_config(cfg, "sigma", opt.seed);
    Box box = default_phase_box(spec.well_a, spec.well_b, spec.well_a, spec.well_b);
    int table_res = geo.metric_table_res > 0 ? geo.metric_table_res
                                             : (spec.m == 1 ? 257 : (spec.m == 2 ? 33 : 17));
    auto tables = w_eta_phase_tables(spec, etas, cell, box, table_res);
    GeodesicConfig gcfg = geo;
    gcfg.box = box;
    CsvWriter csv(out_path(opt, "sigma_eta.csv"), "eta,sigma_eta,monotone_flag");
    double prev = -1;
    bool any_flag = false;
    for (std::size_t i = 0; i < etas.size(); ++i) {
      ConformalMetric metric = metric_from_table(tables[i], spec.well_a, spec.well_b);
      double d = geodesic_distance(metric, spec.well_a, spec.well_b, gcfg).distance;
      bool flag = prev >= 0 && d < prev * (1.0 - 0.02);
      any_flag |= flag;
      csv.row(etas[i], d, flag ? 1 : 0);
      std::printf("sigma_eta(%.4g) = %.6f%s\n", etas[i], d, flag ? "  [non-monotone]" : "");
      prev = d;
    }
    if (any_flag) std::printf("sigma: monotonicity flags raised\n");
  }
  return 0;
}

int cmd_minimize(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  EnergyParams p;
  p.eps = cfg.get_double("minimize", "eps", 0.05);
  double q = cfg.get_double("minimize", "delta_exponent", 2.0);
  p.delta = cfg.get_double("minimize", "delta", std::pow(p.eps, q));
  p.mass_fraction = cfg.get_optional("minimize", "mass");

  Box domain = domain_from_config(cfg, "minimize", spec.n);
  std::array<int, kMaxDim> counts{};
  int res = cfg.get_int("minimize", "resolution", 0);
  for (int i = 0; i < spec.n; ++i) {
    counts[i] = res > 0
                    ? res
                    : static_cast<int>(std::ceil(domain.extent(i) / (p.delta / 4.0))) + 1;
    counts[i] = std::max(counts[i], 2);
  }
  GridField tmpl = GridField::zeros(domain, counts, spec.m);
  InterfaceSpec interface = interface_from_config(cfg, "minimize", spec.n);
  GridField init = initial_field(cfg, "minimize", spec, tmpl, interface, opt.seed);

  MinimizeConfig mc;
  mc.max_iters = cfg.get_int("minimize", "max_iters", 50000);
  mc.tol_g = cfg.get_double("minimize", "tol_g", 0.0);
  mc.seed = opt.seed;

  MinimizeReport rep = minimize_energy(spec, p, init, mc);

  CsvWriter csv(out_path(opt, "minimize.csv"), "iter,energy,residual,mass_drift");
  for (std::size_t i = 0; i < rep.energy_trace.size(); ++i)
    csv.row(static_cast<int>(i), rep.energy_trace[i], rep.residual_trace[i],
            rep.drift_trace[i]);
  save_field_binary(rep.field, out_path(opt, "final_field.ssgf"));
  if (spec.n <= 2) save_field_csv(rep.field, out_path(opt, "final_field.csv"));
  std::printf("minimize: energy %.6f after %d iterations (residual %.3g, %s)\n",
              rep.energy_trace.back(), rep.iterations, rep.stationarity,
              rep.converged ? "converged" : "max iterations");
  return 0;
}

int cmd_recover(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  QuadratureRule quad = quadrature_from_config(cfg, "recover");
  GeodesicConfig geo = geodesic_from_config(cfg, "recover");

  double eps = cfg.get_double("recover", "eps", 0.05);
  double q = cfg.get_double("recover", "delta_exponent", 2.0);
  double delta = cfg.get_double("recover", "delta", std::pow(eps, q));
  double eta_fraction = cfg.get_double("recover", "eta_fraction", 0.01);

  GeodesicResult sig = sigma_hom(spec, quad, geo);
  double L = sig.curve.euclidean_length();
  double eta = eta_fraction * sig.distance;
  double lambda = (eta / L) * (eta / L);
  auto whom_fn = [&](const Vec& z) { return w_hom(spec, z, quad); };
  OdeConfig ode;
  ode.step_fraction = cfg.get_double("recover", "ode_step_fraction", 0.01);
  ProfileSolution profile = reparametrize_profile(sig.curve, whom_fn, eps, lambda, ode);

  Box domain = domain_from_config(cfg, "recover", spec.n);
  std::array<int, kMaxDim> counts{};
  for (int i = 0; i < spec.n; ++i)
    counts[i] = std::max(
        2, static_cast<int>(std::ceil(domain.extent(i) / (delta / 4.0))) + 1);
  GridField tmpl = GridField::zeros(domain, counts, spec.m);
  InterfaceSpec interface = interface_from_config(cfg, "recover", spec.n);

  double v = 0;
  GridField u;
  std::optional<double> mass = cfg.get_optional("recover", "mass");
  if (mass) {
    auto [field, shift] = adjust_mass(interface, profile, tmpl, *mass, spec.well_a, spec.well_b);
    u = std::move(field);
    v = shift;
  } else {
    u = build_recovery(interface, profile, tmpl, 0.0);
  }

  EnergyParams p;
  p.eps = eps;
  p.delta = delta;
  double energy = two_scale_energy(spec, u, p);

  save_field_binary(u, out_path(opt, "recover_field.ssgf"));
  if (spec.n <= 2) save_field_csv(u, out_path(opt, "recover_field.csv"));
  {
    CsvWriter csv(out_path(opt, "profile.csv"), "t,g");
    for (std::size_t i = 0; i < profile.ts.size(); ++i) csv.row(profile.ts[i], profile.gs[i]);
  }
  std::printf(
      "recover: eps %.4g tau %.4g v %.3g energy %.6f profile %.6f bound %.6f\n", eps,
      profile.tau, v, energy, profile.profile_energy, profile.energy_bound);
  return 0;
}

int cmd_sweep(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  SweepConfig sc;
  sc.sequence.epsilons = cfg.get_list("sweep", "epsilons", {0.1, 0.05, 0.025});
  if (sc.sequence.epsilons.empty()) throw ConfigError("sweep: empty epsilon sequence");
  sc.sequence.exponent = cfg.get_double("sweep", "delta_exponent", 2.0);
  sc.eta_fraction = cfg.get_double("sweep", "eta_fraction", 0.01);
  sc.mass_fraction = cfg.get_optional("sweep", "mass");
  sc.quad = quadrature_from_config(cfg, "sweep");
  sc.geodesic = geodesic_from_config(cfg, "sweep");
  sc.domain = domain_from_config(cfg, "sweep", spec.n);
  sc.ode.step_fraction = cfg.get_double("sweep", "ode_step_fraction", 0.01);
  InterfaceSpec interface = interface_from_config(cfg, "sweep", spec.n);

  SweepResult res = recovery_sweep(spec, interface, sc);

  CsvWriter csv(out_path(opt, "sweep.csv"),
                "epsilon,delta,tau,v,E_n,sigma_per,ratio,l2_dist");
  std::vector<double> xs, ratios, energies, scale_ratio;
  for (const SweepRow& r : res.rows) {
    csv.row(r.eps, r.delta, r.tau, r.v, r.energy, r.sigma_per, r.ratio, r.l2_dist);
    xs.push_back(r.eps);
    energies.push_back(r.energy);
    ratios.push_back(r.ratio);
    scale_ratio.push_back(r.delta / r.eps);
    std::printf("sweep eps=%.4g: E_n %.6f sigma*Per %.6f ratio %.4f l2 %.4f\n", r.eps,
                r.energy, r.sigma_per, r.ratio, r.l2_dist);
  }
  if (opt.plot) {
    svg_plot(out_path(opt, "sweep_energy.svg"), xs, energies, "E_n vs epsilon");
    svg_plot(out_path(opt, "sweep_ratio.svg"), scale_ratio, ratios, "ratio vs delta/epsilon");
  }
  return 0;
}

int cmd_validate(const ConfigMap& cfg, const CliOptions& opt) {
  PotentialSpec spec = potential_from_config(cfg);
  int samples = cfg.get_int("validate", "samples", 10000);
  double radius = cfg.get_double("validate", "radius", 2.5);
  GrowthReport rep = validate_growth(spec, samples, radius, opt.seed);

  CsvWriter csv(out_path(opt, "validate.csv"), "check,value,bound");
  for (const GrowthViolation& v : rep.violations) csv.row(v.check, v.value, v.bound);
  if (rep.vacuous) {
    std::printf("validate: pass-vacuous (no samples)\n");
    return 0;
  }
  std::printf("validate: %d samples, %zu violations -> %s\n", rep.samples,
              rep.violations.size(), rep.pass() ? "pass" : "FAIL");
  return rep.pass() ? 0 : 3;
}

}  // namespace scalesep
