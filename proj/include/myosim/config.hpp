#pragma once
// Flat INI-style experiment configuration.  Parsing is strict: unknown keys
// or sections are errors so a typo cannot silently fall back to a default.
// The config hash is an FNV-1a of the canonical rendering (every field, fixed
// order, %.17g floats), so two configs hash equal exactly when they mean the
// same experiment.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace myosim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // [experiment]
  std::string name;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
  std::string format = "csv";  // "csv" or "csv.gz"
  long threads = 0;            // 0 = resolve from env / hardware

  // [potential]
  std::string form = "default_trig";
  double b = 0.5;
  double kappa = 1.0;
  std::vector<double> kappas;  // series experiments
  std::string table;           // sample file for form = user_table
  double g_hat = 0.0;          // 0 = default threshold

  // [walk]
  std::size_t n = 1;
  double p = 1.0;
  std::vector<long long> y0;
  double L = 1.0;
  long long window = 0;
  std::vector<double> L_grid;

  // [myopic]
  double T = 0.5;
  double eps = 0.0;  // 0 = unrounded boundary variant

  // [numerics]
  double dt = 0.0;  // 0 = default for the potential
  double horizon = 1.0;
  std::size_t trials = 100;
  std::size_t max_rejects = 1000000;
  std::vector<double> x0;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace myosim
