#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scalesep/cell.hpp"
#include "scalesep/energy.hpp"
#include "scalesep/geodesic.hpp"
#include "scalesep/potential.hpp"

namespace scalesep {

// Plain-text run manifest: [section] headers over key = value lines, with
// CLI overrides of the form --section.key=value applied on top.
struct ConfigMap {
  std::map<std::string, std::string> entries;  // "section.key" -> value

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;
  std::optional<double> get_optional(const std::string& section, const std::string& key) const;
};

ConfigMap parse_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

// "--section.key=value"; throws ConfigError on malformed input.
void apply_override(ConfigMap& cfg, const std::string& arg);

PotentialSpec potential_from_config(const ConfigMap& cfg);
QuadratureRule quadrature_from_config(const ConfigMap& cfg, const std::string& section);
CellConfig cell_from_config(const ConfigMap& cfg, const std::string& section,
                            std::uint64_t seed);
GeodesicConfig geodesic_from_config(const ConfigMap& cfg, const std::string& section);
Box domain_from_config(const ConfigMap& cfg, const std::string& section, int n);

}  // namespace scalesep
