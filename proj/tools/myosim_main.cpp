// Command line front end: every subcommand reads one config file, optionally
// overridden by a handful of flags, and delegates to the experiment drivers.
// Exit codes: 0 success, 1 failed checks or runtime trouble, 2 bad usage or
// bad config.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "myosim/config.hpp"
#include "myosim/experiments.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  long long seed = -1;
  std::string out_dir;
  long threads = -1;
  std::string format;
};

void add_common(CLI::App* cmd, CliOverrides& ov) {
  cmd->add_option("-c,--config", ov.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", ov.seed, "override [experiment] seed");
  cmd->add_option("--out", ov.out_dir, "override [experiment] out_dir");
  cmd->add_option("--threads", ov.threads,
                  "worker threads (0 = hardware, default from MYOSIM_THREADS)");
  cmd->add_option("--format", ov.format, "csv or csv.gz");
}

int dispatch(const std::string& name, const CliOverrides& ov) {
  myosim::ExperimentConfig cfg = myosim::parse_config_file(ov.config_path);
  cfg.name = name;  // the subcommand decides what runs
  if (ov.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(ov.seed);
    cfg.seed_set = true;
  }
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.threads >= 0) cfg.threads = ov.threads;
  if (!ov.format.empty()) {
    if (ov.format != "csv" && ov.format != "csv.gz")
      throw myosim::ConfigError("format must be csv or csv.gz");
    cfg.format = ov.format;
  }
  return myosim::run_experiment(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"myosim: myopic non-intersecting dynamics toolkit"};
  app.require_subcommand(1);

  const char* names[] = {"validate-potential", "simulate-diffusion",
                         "simulate-mrw",       "simulate-mbm",
                         "metastability",      "interpolate",
                         "theorem-main",       "rates",
                         "selftest"};
  const char* briefs[] = {
      "check a potential spec (anchors, tilt, critical points)",
      "integrate the free dynamics and dump trajectory + box events",
      "run the myopic walk (lookahead L) and dump its jump path",
      "run the myopic diffusion (lookahead T, optional eps grid)",
      "exit-time scan over kappa: lambda table, slope, exponentiality",
      "myopic rates across a lookahead grid with the limit rates",
      "desk-scale check of the walk limit of the rescaled box process",
      "exact myopic rates at one configuration",
      "fast internal consistency checks"};

  CliOverrides ov;
  for (std::size_t i = 0; i < sizeof(names) / sizeof(names[0]); ++i)
    add_common(app.add_subcommand(names[i], briefs[i]), ov);

  CLI11_PARSE(app, argc, argv);

  const std::string chosen = app.get_subcommands().front()->get_name();
  try {
    return dispatch(chosen, ov);
  } catch (const myosim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
