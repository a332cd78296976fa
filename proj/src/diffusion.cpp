#include "myosim/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "myosim/analysis.hpp"
#include "myosim/parallel.hpp"
#include "myosim/rng.hpp"

namespace myosim {

void check_time_step(const PotentialSpec& spec, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double stiff = dt * spec.kappa * max_abs_curvature(spec);
  if (stiff >= 0.5)
    throw std::invalid_argument(
        "dt too large for the drift stiffness: dt * kappa * sup|v''| must stay below 1/2");
}

namespace {

// one Euler-Maruyama step for a single coordinate
inline double em_step(const PotentialSpec& spec, double x, double dt,
                      double sq_dt, double noise_scale, RandomStream& rng) {
  const double g = noise_scale != 0.0 ? rng.gaussian() : 0.0;
  return x - spec.kappa * eval_drift(spec, x) * dt + noise_scale * sq_dt * g;
}

}  // namespace

double default_dt(const PotentialSpec& spec) {
  return std::min(1e-3, 0.1 / (spec.kappa * max_abs_curvature(spec)));
}

TrajectoryGrid integrate(const PotentialSpec& spec, const std::vector<double>& x0,
                         double dt, double horizon, std::uint64_t seed,
                         const IntegrateOptions& opt) {
  if (x0.empty()) throw std::invalid_argument("need at least one particle");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
  check_time_step(spec, dt);
  const auto steps =
      static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
  TrajectoryGrid traj;
  traj.dt = dt;
  traj.n_particles = x0.size();
  traj.rng_seed = seed;
  traj.positions.reserve((steps + 1) * x0.size());
  traj.positions.insert(traj.positions.end(), x0.begin(), x0.end());
  RandomStream rng(seed);
  const double sq_dt = std::sqrt(dt);
  std::vector<double> x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    for (double& xi : x) xi = em_step(spec, xi, dt, sq_dt, opt.noise_scale, rng);
    traj.positions.insert(traj.positions.end(), x.begin(), x.end());
  }
  return traj;
}

long long box_of(double x) {
  return static_cast<long long>(std::floor(x + 0.5));
}

BoxPath box_process(const TrajectoryGrid& traj) {
  BoxPath out;
  const std::size_t n = traj.n_particles;
  const std::size_t rows = traj.rows();
  out.horizon = rows ? traj.time_at(rows - 1) : traj.start_time;
  out.initial.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.initial[i] = box_of(traj.at(0, i));
  std::vector<long long> box = out.initial;
  for (std::size_t k = 0; k + 1 < rows; ++k) {
    const double t0 = traj.time_at(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = traj.at(k, i);
      const double b = traj.at(k + 1, i);
      if (a == b) continue;
      if (b > a) {
        // integer levels in (a, b]; a crossing of the particle's own box
        // level is not an event, the box only changes at other levels
        for (long long lv = static_cast<long long>(std::floor(a)) + 1;
             lv <= static_cast<long long>(std::floor(b)); ++lv) {
          if (lv == box[i]) continue;
          const double tc = t0 + traj.dt * (static_cast<double>(lv) - a) / (b - a);
          box[i] = lv;
          out.events.push_back({tc, i, lv});
        }
      } else {
        for (long long lv = static_cast<long long>(std::ceil(a)) - 1;
             lv >= static_cast<long long>(std::ceil(b)); --lv) {
          if (lv == box[i]) continue;
          const double tc = t0 + traj.dt * (a - static_cast<double>(lv)) / (a - b);
          box[i] = lv;
          out.events.push_back({tc, i, lv});
        }
      }
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const BoxEvent& x, const BoxEvent& y) {
                     return x.time < y.time;
                   });
  return out;
}

ChamberExits first_exit_weyl(const TrajectoryGrid& traj) {
  ChamberExits out;
  const std::size_t n = traj.n_particles;
  if (traj.rows() == 0)
    throw std::invalid_argument("first_exit_weyl: empty trajectory");
  for (std::size_t i = 1; i < n; ++i)
    if (traj.at(0, i) <= traj.at(0, i - 1))
      throw std::invalid_argument(
          "first_exit_weyl: start must be strictly ordered");
  for (std::size_t k = 0; k < traj.rows(); ++k) {
    for (std::size_t i = 1; i < n; ++i) {
      if (traj.at(k, i) <= traj.at(k, i - 1)) {
        out.continuous = traj.time_at(k);
        break;
      }
    }
    if (out.continuous) break;
  }
  const BoxPath bp = box_process(traj);
  std::vector<long long> box = bp.initial;
  auto ordered = [&box] {
    for (std::size_t i = 1; i < box.size(); ++i)
      if (box[i] <= box[i - 1]) return false;
    return true;
  };
  if (!ordered()) {
    out.boxes = traj.start_time;
    return out;
  }
  for (const auto& e : bp.events) {
    box[e.particle] = e.box;
    if (!ordered()) {
      out.boxes = e.time;
      break;
    }
  }
  return out;
}

double default_g_hat(const PotentialSpec& spec) {
  return 1.0 + 0.99 * spec.tilt_b;
}

double left_level_for(const PotentialSpec& spec, double g_hat) {
  const double top = eval_potential(spec, -0.5);
  if (!(g_hat > 1.0) || !(g_hat < top))
    throw std::invalid_argument(
        "g_hat must lie strictly between the right barrier (1) and the left barrier");
  // v decreases from v(-1/2) = 1 + b to v(0) = 0 on [-1/2, 0]
  double lo = -0.5, hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval_potential(spec, mid) > g_hat) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

ExitRecord metastability_trial(const PotentialSpec& spec, std::uint64_t seed,
                               double dt, double g_hat, double cap_time) {
  if (dt == 0.0) dt = default_dt(spec);
  check_time_step(spec, dt);
  if (g_hat == 0.0) g_hat = default_g_hat(spec);
  const double x_left = left_level_for(spec, g_hat);
  if (cap_time == 0.0)
    cap_time = std::max(1e4, 50.0 * std::exp(2.0 * spec.kappa));
  RandomStream rng(seed);
  const double sq_dt = std::sqrt(dt);
  double x = 0.0;
  double t = 0.0;
  for (;;) {
    const double xn = em_step(spec, x, dt, sq_dt, 1.0, rng);
    const double tn = t + dt;
    if (xn >= 1.0) {
      const double frac = (1.0 - x) / (xn - x);
      return {t + dt * frac, true, spec.kappa};
    }
    if (xn <= x_left) {
      const double frac = (x - x_left) / (x - xn);
      return {t + dt * frac, false, spec.kappa};
    }
    x = xn;
    t = tn;
    if (t > cap_time)
      throw std::runtime_error("exit-time trial exceeded its time cap");
  }
}

LambdaEstimate lambda_for_kappa(const PotentialSpec& spec, std::size_t trials,
                                double dt, std::uint64_t master_seed,
                                const std::string& label_prefix, double g_hat,
                                std::size_t threads) {
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  std::vector<ExitRecord> recs(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    recs[i] = metastability_trial(
        spec, derive_seed(master_seed, trial_label(label_prefix, i)), dt, g_hat);
  });
  LambdaEstimate est;
  est.kappa = spec.kappa;
  est.taus.reserve(trials);
  std::size_t rights = 0;
  for (const auto& r : recs) {
    est.taus.push_back(r.tau);
    rights += r.exited_right ? 1 : 0;
  }
  std::sort(est.taus.begin(), est.taus.end());
  double sum = 0.0;
  for (double t : est.taus) sum += t;
  est.lambda_mean = sum / static_cast<double>(trials);
  // empirical time with survival probability 1/e
  const double level = 1.0 - std::exp(-1.0);
  auto idx = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(trials))) - 1;
  if (idx >= trials) idx = trials - 1;
  est.lambda_quantile = est.taus[idx];
  est.right_fraction = static_cast<double>(rights) / static_cast<double>(trials);
  return est;
}

LambdaSeries estimate_lambda(const std::vector<PotentialSpec>& specs,
                             std::size_t trials, double dt,
                             std::uint64_t master_seed, double g_hat,
                             std::size_t threads) {
  if (specs.size() < 3)
    throw std::invalid_argument("slope fit needs >= 3 kappa values");
  LambdaSeries series;
  for (const auto& spec : specs) {
    char label[64];
    std::snprintf(label, sizeof label, "metastability/kappa/%.6g", spec.kappa);
    series.per_kappa.push_back(lambda_for_kappa(spec, trials, dt, master_seed,
                                                label, g_hat, threads));
  }
  std::vector<double> ks, ls;
  for (const auto& e : series.per_kappa) {
    ks.push_back(e.kappa);
    ls.push_back(e.lambda_mean);
  }
  const LinearFit fit = fit_log_rate(ks, ls);
  series.slope = fit.slope;
  series.intercept = fit.intercept;
  return series;
}

std::vector<double> occupation_outside_ball(const TrajectoryGrid& traj,
                                            double center, double radius,
                                            double window,
                                            std::size_t particle) {
  if (!(window > 0.0)) throw std::invalid_argument("window must be positive");
  if (particle >= traj.n_particles)
    throw std::invalid_argument("particle index out of range");
  const std::size_t rows = traj.rows();
  const double span = traj.time_at(rows - 1) - traj.start_time;
  const auto windows = static_cast<std::size_t>(std::floor(span / window + 1e-12));
  if (windows == 0)
    throw std::invalid_argument("window wider than the trajectory span");
  std::vector<double> frac(windows, 0.0);
  std::vector<std::size_t> total(windows, 0);
  for (std::size_t k = 0; k < rows; ++k) {
    const double rel = (traj.time_at(k) - traj.start_time) / window;
    const auto w = static_cast<std::size_t>(rel);
    if (w >= windows) break;
    ++total[w];
    if (std::fabs(traj.at(k, particle) - center) > radius) frac[w] += 1.0;
  }
  for (std::size_t w = 0; w < windows; ++w)
    frac[w] /= static_cast<double>(total[w]);
  return frac;
}

CoupledPair coupled_pair(const PotentialSpec& spec, double x0, double x0_bar,
                         double offset, double dt, double horizon,
                         std::uint64_t seed) {
  check_time_step(spec, dt);
  if (offset < 0.0) throw std::invalid_argument("offset must be >= 0");
  const auto off_steps = static_cast<std::size_t>(std::llround(offset / dt));
  if (std::fabs(static_cast<double>(off_steps) * dt - offset) > 1e-9 * dt * std::max<std::size_t>(1, off_steps))
    throw std::invalid_argument("offset must be a multiple of dt");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));

  CoupledPair out;
  out.offset = offset;
  RandomStream rng(seed);
  RandomStream fol_rng(derive_seed(seed, "coupled/follower"));
  const double sq_dt = std::sqrt(dt);

  // follower runs off_steps ahead on its own clock; its noise stays
  // independent of the leader's until the paths meet
  std::vector<double> fol(steps + off_steps + 1);
  fol[0] = x0_bar;
  for (std::size_t k = 0; k < off_steps; ++k)
    fol[k + 1] = em_step(spec, fol[k], dt, sq_dt, 1.0, fol_rng);
  std::vector<double> lead(steps + 1);
  lead[0] = x0;
  bool met = lead[0] == fol[off_steps];
  if (met) out.meet_time = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double g = rng.gaussian();
    lead[k + 1] = lead[k] - spec.kappa * eval_drift(spec, lead[k]) * dt +
                  sq_dt * g;
    if (met) {
      fol[k + off_steps + 1] = lead[k + 1];
      continue;
    }
    fol[k + off_steps + 1] = em_step(spec, fol[k + off_steps], dt, sq_dt, 1.0,
                                     fol_rng);
    const double d0 = lead[k] - fol[k + off_steps];
    const double d1 = lead[k + 1] - fol[k + off_steps + 1];
    if (d1 == 0.0 || (d0 < 0.0) != (d1 < 0.0)) {
      const double frac = d1 == 0.0 ? 1.0 : d0 / (d0 - d1);
      out.meet_time = (static_cast<double>(k) + frac) * dt;
      met = true;
      fol[k + off_steps + 1] = lead[k + 1];  // coalesce from the next grid point
    }
  }

  out.leader.dt = dt;
  out.leader.n_particles = 1;
  out.leader.rng_seed = seed;
  out.leader.positions = std::move(lead);
  out.follower.dt = dt;
  out.follower.n_particles = 1;
  out.follower.rng_seed = seed;
  out.follower.positions = std::move(fol);
  return out;
}

}  // namespace myosim
