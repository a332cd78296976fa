#pragma once
// Experiment drivers shared by the command line tool and the acceptance
// suite.  Each driver owns its seed-label scheme so a rerun with the same
// config file and seed reproduces the same report bytes.

#include <cstdint>
#include <string>
#include <vector>

#include "myosim/config.hpp"
#include "myosim/diffusion.hpp"
#include "myosim/potential.hpp"
#include "myosim/report.hpp"

namespace myosim {

// builds the potential from a config, loading the sample table when the
// form asks for one
PotentialSpec spec_from_config(const ExperimentConfig& cfg);
PotentialSpec spec_with_kappa(const ExperimentConfig& cfg, double kappa);

struct MetastabilityResult {
  LambdaSeries series;
  std::vector<double> ks_stats;    // exit times over their mean against Exp(1)
  std::vector<double> ks_pvalues;
  double g_hat = 0.0;
};
MetastabilityResult run_metastability_scan(const ExperimentConfig& cfg,
                                           std::size_t threads);

// time of the first box event of a single free particle started at x0;
// returns cap when no event happens in time
double first_box_event_time(const PotentialSpec& spec, double x0, double dt,
                            double cap, std::uint64_t seed);

struct TheoremMainResult {
  double kappa = 0.0;
  double foresight = 0.0;   // L, in walk time units
  double lambda_hat = 0.0;  // diffusion-to-walk time scale
  std::size_t trials = 0;
  std::vector<double> mbm_first;  // first box event per trial, walk units
  std::vector<double> mrw_first;  // first jump per trial
  double first_event_ecdf_distance = 0.0;
  std::vector<double> j1_distances;  // per paired trial, walk units
  double median_j1 = 0.0;
  bool j1_fallback_used = false;
  std::vector<double> mbm_counts;  // box events up to walk time 1, per trial
  std::vector<double> mrw_counts;  // walk jumps up to time 1, per trial
  double mean_count_gap = 0.0;
};

// paired desk-scale comparison of the diffusion's box process (observed at
// times lambda_hat * t with lookahead lambda_hat * L) against the myopic
// walk with lookahead L on [0, 2L].  lambda_hat = 0 estimates the scale
// first with `lambda_trials` exit runs.  start_jitter > 0 draws per-trial
// uniform offsets in (-start_jitter, start_jitter] around x0 for the
// diffusion start; offsets must not move any starting box or the ordering,
// and the walk always starts from the boxes of the unshifted x0.
TheoremMainResult run_theorem_main(const PotentialSpec& spec, double L,
                                   const std::vector<double>& x0,
                                   std::size_t trials, double dt,
                                   std::uint64_t seed, std::size_t threads,
                                   double lambda_hat = 0.0,
                                   std::size_t lambda_trials = 500,
                                   double start_jitter = 0.0);

// dispatch on cfg.name; writes report + dumps into cfg.out_dir; returns the
// process exit code (0 ok, 1 failed checks)
int run_experiment(const ExperimentConfig& cfg);

}  // namespace myosim
