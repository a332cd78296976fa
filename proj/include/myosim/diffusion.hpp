#pragma once
// Overdamped Langevin dynamics in the tilted landscape: dX = -kappa v'(X) dt
// + dB, integrated by Euler-Maruyama on a fixed grid.  Crossing times of
// integer levels and of exit thresholds are read off the piecewise-linear
// interpolant between grid points; no bridge correction is applied, so all
// crossing conventions are grid-consistent with each other.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "myosim/potential.hpp"

namespace myosim {

struct TrajectoryGrid {
  double dt = 0.0;
  double start_time = 0.0;
  std::size_t n_particles = 0;
  std::vector<double> positions;  // row-major; row k = state at start_time + k dt
  std::uint64_t rng_seed = 0;

  std::size_t rows() const {
    return n_particles ? positions.size() / n_particles : 0;
  }
  double at(std::size_t k, std::size_t i) const {
    return positions[k * n_particles + i];
  }
  double time_at(std::size_t k) const {
    return start_time + static_cast<double>(k) * dt;
  }
};

// stability guard requires dt kappa sup|v''| < 1/2; this picks
// min(1e-3, 0.1 / (kappa sup|v''|))
double default_dt(const PotentialSpec& spec);
// throws when dt violates the guard
void check_time_step(const PotentialSpec& spec, double dt);

struct IntegrateOptions {
  double noise_scale = 1.0;  // 0 turns the SDE into the deterministic flow
};

TrajectoryGrid integrate(const PotentialSpec& spec, const std::vector<double>& x0,
                         double dt, double horizon, std::uint64_t seed,
                         const IntegrateOptions& opt = {});

// box value: nearest integer level, floor(x + 1/2)
long long box_of(double x);

struct BoxEvent {
  double time;
  std::size_t particle;
  long long box;  // value after the event
};

struct BoxPath {
  std::vector<long long> initial;
  std::vector<BoxEvent> events;  // sorted by time, per-particle times strict
  double horizon = 0.0;
};

// events where the linear interpolant crosses an integer level different
// from the particle's current box
BoxPath box_process(const TrajectoryGrid& traj);

// first time the continuous configuration leaves the strictly-ordered
// chamber (checked at grid points) and first time the box configuration
// does (checked at box events); nullopt = never within the horizon
struct ChamberExits {
  std::optional<double> continuous;
  std::optional<double> boxes;
};
ChamberExits first_exit_weyl(const TrajectoryGrid& traj);

// threshold for the left absorbing level in exit experiments; the level
// x_left < 0 solves v(x_left) = g_hat.  Default g_hat sits just under the
// left barrier top: 1 + 0.99 b
double default_g_hat(const PotentialSpec& spec);
double left_level_for(const PotentialSpec& spec, double g_hat);

struct ExitRecord {
  double tau = 0.0;
  bool exited_right = false;
  double kappa = 0.0;
};

// single-particle exit from the well at 0: absorb at 1 (right) or at the
// left level; crossing time linearly interpolated
ExitRecord metastability_trial(const PotentialSpec& spec, std::uint64_t seed,
                               double dt = 0.0, double g_hat = 0.0,
                               double cap_time = 0.0);

struct LambdaEstimate {
  double kappa = 0.0;
  double lambda_mean = 0.0;      // headline scale: mean exit time
  double lambda_quantile = 0.0;  // time with empirical P(tau > .) = 1/e
  double right_fraction = 0.0;
  std::vector<double> taus;      // sorted
};

LambdaEstimate lambda_for_kappa(const PotentialSpec& spec, std::size_t trials,
                                double dt, std::uint64_t master_seed,
                                const std::string& label_prefix, double g_hat,
                                std::size_t threads);

struct LambdaSeries {
  std::vector<LambdaEstimate> per_kappa;
  double slope = 0.0;      // of log(lambda_mean) against kappa
  double intercept = 0.0;
};

// one estimate per spec in the series (specs differ in kappa); dt = 0 uses
// each spec's default
LambdaSeries estimate_lambda(const std::vector<PotentialSpec>& specs,
                             std::size_t trials, double dt,
                             std::uint64_t master_seed, double g_hat,
                             std::size_t threads);

// fraction of samples outside |x - center| <= radius per window of width
// `window`, one value per full window
std::vector<double> occupation_outside_ball(const TrajectoryGrid& traj,
                                            double center, double radius,
                                            double window,
                                            std::size_t particle = 0);

struct CoupledPair {
  TrajectoryGrid leader;    // on [0, horizon]
  TrajectoryGrid follower;  // on [0, horizon + offset], same noise after meeting
  double offset = 0.0;
  std::optional<double> meet_time;  // on the leader clock
};

// leader and follower driven by independent noise; follower at time
// t + offset is compared with leader at time t, and after the first
// touching or crossing of the linear interpolants the follower copies the
// leader exactly
CoupledPair coupled_pair(const PotentialSpec& spec, double x0, double x0_bar,
                         double offset, double dt, double horizon,
                         std::uint64_t seed);

}  // namespace myosim
