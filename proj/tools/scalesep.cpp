// Command-line front end: experiment orchestration from a plain-text
// manifest, CSV/SVG emission. Exit codes: 0 success, 1 computation failure,
// 2 usage or config error, 3 validation found violations.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "scalesep/commands.hpp"
#include "scalesep/errors.hpp"
#include "scalesep/parallel.hpp"

using namespace scalesep;

int main(int argc, char** argv) {
  CLI::App app{"two-scale phase-field energies: homogenized limits and recovery sweeps"};
  app.require_subcommand(1);
  app.allow_extras();

  std::string config_path;
  CliOptions opt;
  app.add_option("--config", config_path, "run manifest")->required();
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--jobs", opt.jobs, "worker threads (1 = serial, byte-reproducible)");
  app.add_flag("--plot", opt.plot, "emit SVG plots next to the CSVs");

  const std::vector<std::string> names = {"whom",    "weta",    "sigma", "minimize",
                                          "recover", "sweep",   "validate"};
  for (const std::string& n : names) {
    CLI::App* sub = app.add_subcommand(n);
    sub->allow_extras();
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ConfigMap cfg = parse_config_file(config_path);
    // leftover args are --section.key=value overrides
    for (const std::string& extra : app.remaining(true)) apply_override(cfg, extra);

    set_thread_count(opt.jobs > 0 ? opt.jobs : 1);
    if (opt.jobs <= 1) set_parallel_enabled(false);

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "whom") return cmd_whom(cfg, opt);
    if (sub == "weta") return cmd_weta(cfg, opt);
    if (sub == "sigma") return cmd_sigma(cfg, opt);
    if (sub == "minimize") return cmd_minimize(cfg, opt);
    if (sub == "recover") return cmd_recover(cfg, opt);
    if (sub == "sweep") return cmd_sweep(cfg, opt);
    if (sub == "validate") return cmd_validate(cfg, opt);
    std::fprintf(stderr, "unknown subcommand\n");
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
