#include "scalesep/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "scalesep/errors.hpp"
#include "scalesep/log.hpp"

namespace scalesep {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config: bad number '" + item + "' in " + where);
    }
  }
  return out;
}

}  // namespace

bool ConfigMap::has(const std::string& section, const std::string& key) const {
  return entries.count(section + "." + key) > 0;
}

bool ConfigMap::has_section(const std::string& section) const {
  std::string prefix = section + ".";
  auto it = entries.lower_bound(prefix);
  return it != entries.end() && it->first.rfind(prefix, 0) == 0;
}

std::string ConfigMap::get_str(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  auto it = entries.find(section + "." + key);
  return it == entries.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + it->first);
  }
}

int ConfigMap::get_int(const std::string& section, const std::string& key, int fallback) const {
  auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + it->first);
  }
}

bool ConfigMap::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for " + it->first);
}

std::vector<double> ConfigMap::get_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  return parse_list(it->second, it->first);
}

std::optional<double> ConfigMap::get_optional(const std::string& section,
                                              const std::string& key) const {
  auto it = entries.find(section + "." + key);
  if (it == entries.end()) return std::nullopt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + it->first);
  }
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: unterminated section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config: empty section name at line " + std::to_string(lineno));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    if (section.empty())
      throw ConfigError("config: key outside any section at line " + std::to_string(lineno));
    cfg.entries[section + "." + key] = value;
  }
  return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ConfigMap& cfg, const std::string& arg) {
  // --section.key=value
  if (arg.rfind("--", 0) != 0) throw ConfigError("override must start with --: " + arg);
  std::size_t eq = arg.find('=');
  if (eq == std::string::npos) throw ConfigError("override missing '=': " + arg);
  std::string path = arg.substr(2, eq - 2);
  std::size_t dotpos = path.find('.');
  if (dotpos == std::string::npos || dotpos == 0 || dotpos + 1 == path.size())
    throw ConfigError("override must be --section.key=value: " + arg);
  cfg.entries[path] = trim(arg.substr(eq + 1));
}

PotentialSpec potential_from_config(const ConfigMap& cfg) {
  if (!cfg.has_section("potential"))
    throw ConfigError("config: missing [potential] section");
  PotentialSpec spec;
  std::string family = cfg.get_str("potential", "family", "separable-cosine");
  if (family == "separable-cosine")
    spec.family = Family::SeparableCosine;
  else if (family == "checkerboard")
    spec.family = Family::Checkerboard;
  else if (family == "tabulated")
    spec.family = Family::Tabulated;
  else
    throw ConfigError("config: unknown potential family '" + family + "'");

  spec.n = cfg.get_int("potential", "n", 1);
  spec.m = cfg.get_int("potential", "m", 1);
  std::vector<double> wa = cfg.get_list("potential", "well_a", {-1.0});
  std::vector<double> wb = cfg.get_list("potential", "well_b", {1.0});
  if (static_cast<int>(wa.size()) != spec.m || static_cast<int>(wb.size()) != spec.m)
    throw ConfigError("config: wells must have m components");
  spec.well_a = Vec(spec.m);
  spec.well_b = Vec(spec.m);
  for (int j = 0; j < spec.m; ++j) {
    spec.well_a[j] = wa[j];
    spec.well_b[j] = wb[j];
  }
  spec.growth_constant = cfg.get_double("potential", "growth_constant", 10.0);
  spec.scale = cfg.get_double("potential", "scale", 1.0);
  spec.alpha = cfg.get_double("potential", "alpha", 0.5);
  spec.pieces = cfg.get_int("potential", "pieces", 2);
  if (spec.family == Family::Checkerboard) {
    std::vector<double> def;
    std::size_t want = 1;
    for (int i = 0; i < spec.n; ++i) want *= spec.pieces;
    for (std::size_t k = 0; k < want; ++k) def.push_back(k % 2 == 0 ? 0.5 : 1.5);
    spec.depths = cfg.get_list("potential", "depths", def);
  }
  if (spec.family == Family::Tabulated) {
    std::string path = cfg.get_str("potential", "table", "");
    if (path.empty()) throw ConfigError("config: tabulated family needs table = <path>");
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
      spec.table = load_tabulated_csv(path);
    else
      spec.table = load_tabulated_binary(path);
  }
  try {
    validate_spec(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

QuadratureRule quadrature_from_config(const ConfigMap& cfg, const std::string& section) {
  QuadratureRule rule;
  std::string scheme = cfg.get_str(section, "quad_scheme", "gauss");
  if (scheme == "gauss")
    rule.scheme = QuadratureRule::Scheme::GaussLegendreTensor;
  else if (scheme == "midpoint")
    rule.scheme = QuadratureRule::Scheme::MidpointTensor;
  else
    throw ConfigError("config: quad_scheme must be gauss or midpoint");
  rule.nodes_per_axis = cfg.get_int(section, "quad_nodes", 16);
  return rule;
}

CellConfig cell_from_config(const ConfigMap& cfg, const std::string& section,
                            std::uint64_t seed) {
  CellConfig c;
  c.eta = cfg.get_double(section, "eta", 0.1);
  c.resolution = cfg.get_int(section, "resolution", 33);
  c.max_iters = cfg.get_int(section, "max_iters", 1500);
  c.tol = cfg.get_double(section, "tol", 1e-10);
  c.restarts = cfg.get_int(section, "restarts", 8);
  c.seed = seed;
  std::string opt = cfg.get_str(section, "optimizer", "projected-gradient");
  if (opt == "projected-gradient")
    c.optimizer = CellConfig::Optimizer::ProjectedGradient;
  else if (opt == "penalty-quasi-newton")
    c.optimizer = CellConfig::Optimizer::PenaltyQuasiNewton;
  else
    throw ConfigError("config: unknown cell optimizer '" + opt + "'");
  return c;
}

GeodesicConfig geodesic_from_config(const ConfigMap& cfg, const std::string& section) {
  GeodesicConfig g;
  g.graph_res = cfg.get_int(section, "graph_res", 0);
  g.refine_nodes = cfg.get_int(section, "refine_nodes", 256);
  g.redistribute_every = cfg.get_int(section, "redistribute_every", 20);
  g.max_refine_iters = cfg.get_int(section, "max_refine_iters", 800);
  g.tol = cfg.get_double(section, "tol", 1e-9);
  g.metric_table_res = cfg.get_int(section, "table_res", 0);
  return g;
}

Box domain_from_config(const ConfigMap& cfg, const std::string& section, int n) {
  std::vector<double> lo_def(n, 0.0), hi_def(n, 1.0);
  std::vector<double> lo = cfg.get_list(section, "domain_lo", lo_def);
  std::vector<double> hi = cfg.get_list(section, "domain_hi", hi_def);
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
    throw ConfigError("config: domain bounds must have n components");
  Box b;
  b.lo = Vec(n);
  b.hi = Vec(n);
  for (int i = 0; i < n; ++i) {
    if (!(hi[i] > lo[i])) throw ConfigError("config: empty domain");
    b.lo[i] = lo[i];
    b.hi[i] = hi[i];
  }
  return b;
}

}  // namespace scalesep
