#pragma once

#include <cstdint>
#include <string>

#include "scalesep/config.hpp"

namespace scalesep {

struct CliOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  int jobs = 1;
  bool plot = false;
};

// Each command reads its section from the manifest, writes CSV (and
// optionally SVG) artifacts into out_dir and prints a short summary.
// Failures surface as exceptions; the exit-code mapping lives in the CLI.
int cmd_whom(const ConfigMap& cfg, const CliOptions& opt);
int cmd_weta(const ConfigMap& cfg, const CliOptions& opt);
int cmd_sigma(const ConfigMap& cfg, const CliOptions& opt);
int cmd_minimize(const ConfigMap& cfg, const CliOptions& opt);
int cmd_recover(const ConfigMap& cfg, const CliOptions& opt);
int cmd_sweep(const ConfigMap& cfg, const CliOptions& opt);
int cmd_validate(const ConfigMap& cfg, const CliOptions& opt);

}  // namespace scalesep
