#include "myosim/myopic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "myosim/rng.hpp"

namespace myosim {
namespace {

constexpr double kNoCollision = std::numeric_limits<double>::infinity();

struct FreeWalkRun {
  std::vector<JumpEvent> events;
  double collision = kNoCollision;  // first time the config leaves the chamber
};

// free N-walk from y0: each particle jumps +1 at rate p and -1 at rate 1-p,
// applied unconditionally.  From an ordered config a single +-1 move can at
// most create an adjacent tie, so ties are the only exit from the chamber.
FreeWalkRun run_free_walk(const WalkConfig& cfg, const LatticeConfig& y0,
                          double t_max, bool stop_at_collision,
                          RandomStream& rng) {
  FreeWalkRun run;
  LatticeConfig y = y0;
  const std::size_t n = y.size();
  double t = 0.0;
  for (;;) {
    t += rng.exponential(static_cast<double>(n));
    if (t > t_max) return run;
    const auto i = static_cast<std::size_t>(rng.below(n));
    const int delta = rng.uniform01() <= cfg.p_right ? +1 : -1;
    y[i] += delta;
    run.events.push_back({t, i, delta});
    const bool tie = (i > 0 && y[i] == y[i - 1]) ||
                     (i + 1 < n && y[i] == y[i + 1]);
    if (tie && run.collision == kNoCollision) {
      run.collision = t;
      if (stop_at_collision) return run;
    }
  }
}

[[noreturn]] void rejection_overflow(std::size_t attempts) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "rejection sampler exhausted max_rejects after %zu attempts; "
                "shrink the lookahead or widen the initial gaps",
                attempts);
  throw std::runtime_error(buf);
}

struct FreeDiffRun {
  std::vector<double> rows;       // (stored_rows) x n, row 0 = x0
  std::size_t stored = 0;         // rows stored
  long long collision_row = -1;   // first row index violating the order
  bool accepted = false;          // no violation at any row <= accept_steps
};

// one rejection attempt: integrate row by row, bail early if the order
// breaks inside the acceptance window, otherwise run on until the first
// violation (when stopping is requested) or until cap_steps
FreeDiffRun attempt_conditioned_diffusion(const PotentialSpec& spec,
                                          const std::vector<double>& x0,
                                          double dt, std::size_t accept_steps,
                                          std::size_t cap_steps,
                                          bool stop_at_collision,
                                          RandomStream& rng) {
  const std::size_t n = x0.size();
  FreeDiffRun run;
  run.rows.reserve((cap_steps + 1) * n);
  run.rows.insert(run.rows.end(), x0.begin(), x0.end());
  run.stored = 1;
  const double sq_dt = std::sqrt(dt);
  std::vector<double> x = x0;
  for (std::size_t k = 1; k <= cap_steps; ++k) {
    bool ordered = true;
    for (std::size_t i = 0; i < n; ++i) {
      // written to match integrate()'s update term for term, so an
      // unconditioned sample is bit-identical to the plain integrator
      x[i] = x[i] - spec.kappa * eval_drift(spec, x[i]) * dt + sq_dt * rng.gaussian();
      if (i > 0 && x[i] <= x[i - 1]) ordered = false;
    }
    if (!ordered && k <= accept_steps) return run;  // rejected, rows partial
    run.rows.insert(run.rows.end(), x.begin(), x.end());
    run.stored = k + 1;
    if (!ordered) {
      run.collision_row = static_cast<long long>(k);
      run.accepted = true;
      if (stop_at_collision) return run;
    }
  }
  run.accepted = true;
  return run;
}

std::size_t steps_for(double span, double dt) {
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-12));
}

}  // namespace

JumpPath sample_conditioned_walk(const WalkConfig& cfg, double L,
                                 const LatticeConfig& y0, double horizon,
                                 std::uint64_t seed, std::size_t max_rejects,
                                 SampleStats* stats) {
  if (y0.size() != cfg.n_particles)
    throw std::invalid_argument("configuration size mismatch");
  if (!strictly_increasing(y0))
    throw std::invalid_argument("initial configuration must be ordered");
  if (!(L > 0.0)) throw std::invalid_argument("lookahead must be positive");
  RandomStream rng(seed);
  SampleStats local;
  const double t_max = std::max(horizon, L);
  for (;;) {
    ++local.attempts;
    FreeWalkRun run = run_free_walk(cfg, y0, t_max, false, rng);
    if (run.collision > L) {
      JumpPath path;
      path.initial = y0;
      path.horizon = horizon;
      for (const auto& e : run.events) {
        if (e.time > horizon) break;
        path.events.push_back(e);
      }
      if (stats) *stats = local;
      return path;
    }
    if (++local.rejects > max_rejects) rejection_overflow(local.attempts);
  }
}

WalkRunRecord algorithm_a(const WalkConfig& cfg, double L,
                          const LatticeConfig& y0, double horizon,
                          std::uint64_t seed, std::size_t max_rejects) {
  if (y0.size() != cfg.n_particles)
    throw std::invalid_argument("configuration size mismatch");
  if (!strictly_increasing(y0))
    throw std::invalid_argument("initial configuration must be ordered");
  if (!(L > 0.0)) throw std::invalid_argument("lookahead must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  RandomStream rng(seed);
  WalkRunRecord rec;
  rec.foresight = L;
  rec.path.initial = y0;
  rec.path.horizon = horizon;
  rec.segment_times.push_back(0.0);
  LatticeConfig state = y0;
  double t_n = 0.0;
  while (t_n < horizon) {
    const double needed = horizon - t_n;
    // a sample with no collision before needed + L covers the rest of the
    // horizon in one piece, so the search never has to look further
    const double cap = needed + L;
    std::size_t rejects = 0;
    FreeWalkRun run;
    for (;;) {
      run = run_free_walk(cfg, state, cap, true, rng);
      if (run.collision > L) break;
      if (++rejects > max_rejects) rejection_overflow(rejects + 1);
    }
    rec.reject_counts.push_back(rejects);
    double advance;
    if (run.collision <= cap) {
      advance = run.collision - L;  // > 0 by acceptance
      rec.collision_times.push_back(run.collision);
      rec.segment_times.push_back(t_n + advance);
    } else {
      advance = needed;  // truncated final segment, no boundary recorded
    }
    for (const auto& e : run.events) {
      if (e.time > advance) break;
      state[e.particle] += e.delta;
      rec.path.events.push_back({t_n + e.time, e.particle, e.delta});
    }
    t_n += advance;
  }
  return rec;
}

TrajectoryGrid sample_conditioned_diffusion(const PotentialSpec& spec, double T,
                                            const std::vector<double>& x0,
                                            double dt, double horizon,
                                            std::uint64_t seed,
                                            std::size_t max_rejects,
                                            SampleStats* stats) {
  if (!strictly_increasing_real(x0))
    throw std::invalid_argument("initial configuration must be ordered");
  check_time_step(spec, dt);
  if (!(T >= dt * (1.0 - 1e-9)))
    throw std::invalid_argument("lookahead must cover at least one step");
  const std::size_t accept_steps = steps_for(T, dt);
  const std::size_t total_steps = std::max(steps_for(horizon, dt), accept_steps);
  RandomStream rng(seed);
  SampleStats local;
  for (;;) {
    ++local.attempts;
    FreeDiffRun run = attempt_conditioned_diffusion(
        spec, x0, dt, accept_steps, total_steps, false, rng);
    if (run.accepted) {
      TrajectoryGrid traj;
      traj.dt = dt;
      traj.n_particles = x0.size();
      traj.rng_seed = seed;
      const std::size_t keep = std::min(run.stored, steps_for(horizon, dt) + 1);
      traj.positions.assign(run.rows.begin(),
                            run.rows.begin() + keep * x0.size());
      if (stats) *stats = local;
      return traj;
    }
    if (++local.rejects > max_rejects) rejection_overflow(local.attempts);
  }
}

namespace {

DiffusionRunRecord run_grid_algorithm(const PotentialSpec& spec, double T,
                                      const std::vector<double>& x0, double dt,
                                      double horizon, std::uint64_t seed,
                                      std::size_t eps_steps, double eps,
                                      std::size_t max_rejects) {
  if (!strictly_increasing_real(x0))
    throw std::invalid_argument("initial configuration must be ordered");
  check_time_step(spec, dt);
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(T >= dt * (1.0 - 1e-9)))
    throw std::invalid_argument("lookahead must cover at least one step");
  const std::size_t accept_steps = steps_for(T, dt);
  if (eps_steps > accept_steps)
    throw std::invalid_argument("eps must not exceed the lookahead T");
  const std::size_t horizon_steps = steps_for(horizon, dt);
  const std::size_t n = x0.size();

  DiffusionRunRecord rec;
  rec.foresight = T;
  rec.eps = eps;
  rec.segment_times.push_back(0.0);
  rec.segment_steps.push_back(0);
  rec.path.dt = dt;
  rec.path.n_particles = n;
  rec.path.rng_seed = seed;
  rec.path.positions.reserve((horizon_steps + 1) * n);
  rec.path.positions.insert(rec.path.positions.end(), x0.begin(), x0.end());

  RandomStream rng(seed);
  std::vector<double> state = x0;
  std::size_t tn = 0;  // current boundary in grid steps
  while (tn < horizon_steps) {
    const std::size_t needed = horizon_steps - tn;
    const std::size_t cap = needed + accept_steps;
    std::size_t rejects = 0;
    FreeDiffRun run;
    for (;;) {
      run = attempt_conditioned_diffusion(spec, state, dt, accept_steps, cap,
                                          true, rng);
      if (run.accepted) break;
      if (++rejects > max_rejects) rejection_overflow(rejects + 1);
    }
    rec.reject_counts.push_back(rejects);
    std::size_t advance;
    if (run.collision_row >= 0) {
      const auto k_tau = static_cast<std::size_t>(run.collision_row);
      std::size_t adv = k_tau - accept_steps;  // >= 1
      rec.collision_times.push_back(static_cast<double>(k_tau) * dt);
      if (eps_steps > 0) {
        // boundary rounded up to the eps grid; still short of the collision
        // row because eps <= T
        const std::size_t raw = tn + adv;
        const std::size_t next = ((raw + eps_steps - 1) / eps_steps) * eps_steps;
        adv = next - tn;
      }
      rec.segment_steps.push_back(static_cast<long long>(tn + adv));
      rec.segment_times.push_back(static_cast<double>(tn + adv) * dt);
      advance = adv;
    } else {
      advance = needed;  // truncated final segment
    }
    const std::size_t keep = std::min(advance, needed);
    rec.path.positions.insert(rec.path.positions.end(),
                              run.rows.begin() + n,
                              run.rows.begin() + (keep + 1) * n);
    for (std::size_t i = 0; i < n; ++i) state[i] = run.rows[keep * n + i];
    tn += advance;
  }
  return rec;
}

}  // namespace

DiffusionRunRecord algorithm_b(const PotentialSpec& spec, double T,
                               const std::vector<double>& x0, double dt,
                               double horizon, std::uint64_t seed,
                               std::size_t max_rejects) {
  return run_grid_algorithm(spec, T, x0, dt, horizon, seed, 0, 0.0, max_rejects);
}

DiffusionRunRecord algorithm_c(const PotentialSpec& spec, double T,
                               const std::vector<double>& x0, double dt,
                               double horizon, std::uint64_t seed, double eps,
                               std::size_t max_rejects) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const auto eps_steps = static_cast<std::size_t>(std::llround(eps / dt));
  if (eps_steps == 0 ||
      std::fabs(static_cast<double>(eps_steps) * dt - eps) > 1e-9 * eps)
    throw std::invalid_argument("eps must be a positive multiple of dt");
  return run_grid_algorithm(spec, T, x0, dt, horizon, seed, eps_steps, eps,
                            max_rejects);
}

}  // namespace myosim
