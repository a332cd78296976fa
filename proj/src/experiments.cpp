#include "myosim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "myosim/analysis.hpp"
#include "myosim/csvio.hpp"
#include "myosim/myopic.hpp"
#include "myosim/parallel.hpp"
#include "myosim/rng.hpp"
#include "myosim/walks.hpp"

namespace myosim {
namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& stem) {
  std::filesystem::create_directories(cfg.out_dir);
  std::string name = stem;
  if (cfg.format == "csv.gz") name += ".gz";
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string json_path(const ExperimentConfig& cfg, const std::string& stem) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / stem).string();
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string render_config(const LatticeConfig& y) {
  std::string s = "(";
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(y[i]);
  }
  return s + ")";
}

StepPath step_path_from_jumps(const JumpPath& jp) {
  StepPath sp;
  sp.initial = jp.initial;
  sp.horizon = jp.horizon;
  LatticeConfig cur = jp.initial;
  for (const auto& e : jp.events) {
    cur[e.particle] += e.delta;
    sp.jumps.push_back({e.time, e.particle, cur[e.particle]});
  }
  return sp;
}

StepPath step_path_from_boxes(const BoxPath& bp, double time_scale,
                              double horizon) {
  StepPath sp;
  sp.initial = bp.initial;
  sp.horizon = horizon;
  for (const auto& e : bp.events) {
    const double t = e.time / time_scale;
    if (t > horizon) break;
    sp.jumps.push_back({t, e.particle, e.box});
  }
  return sp;
}

}  // namespace

PotentialSpec spec_from_config(const ExperimentConfig& cfg) {
  if (cfg.form == "user_table") {
    if (cfg.table.empty())
      throw ConfigError("form = user_table needs [potential] table = <file>");
    std::vector<double> x, u;
    load_potential_table(cfg.table, x, u);
    return make_table_spec(cfg.b, cfg.kappa, x, u);
  }
  PotentialSpec spec;
  spec.form = PotentialForm::default_trig;
  spec.tilt_b = cfg.b;
  spec.kappa = cfg.kappa;
  return spec;
}

PotentialSpec spec_with_kappa(const ExperimentConfig& cfg, double kappa) {
  PotentialSpec spec = spec_from_config(cfg);
  spec.kappa = kappa;
  return spec;
}

MetastabilityResult run_metastability_scan(const ExperimentConfig& cfg,
                                           std::size_t threads) {
  std::vector<double> kappas = cfg.kappas;
  if (kappas.empty()) kappas.push_back(cfg.kappa);
  if (kappas.size() < 3)
    throw ConfigError("metastability scan needs >= 3 kappa values for the slope");
  std::vector<PotentialSpec> specs;
  for (double k : kappas) specs.push_back(spec_with_kappa(cfg, k));
  MetastabilityResult res;
  res.g_hat = cfg.g_hat != 0.0 ? cfg.g_hat : default_g_hat(specs.front());
  res.series = estimate_lambda(specs, cfg.trials, cfg.dt, cfg.seed, res.g_hat,
                               threads);
  for (const auto& est : res.series.per_kappa) {
    std::vector<double> scaled;
    scaled.reserve(est.taus.size());
    for (double t : est.taus) scaled.push_back(t / est.lambda_mean);
    const KsResult ks = ks_exponential(EcdfSample(std::move(scaled)));
    res.ks_stats.push_back(ks.statistic);
    res.ks_pvalues.push_back(ks.p_value);
  }
  return res;
}

double first_box_event_time(const PotentialSpec& spec, double x0, double dt,
                            double cap, std::uint64_t seed) {
  check_time_step(spec, dt);
  RandomStream rng(seed);
  const long long box0 = box_of(x0);
  const double sq_dt = std::sqrt(dt);
  double x = x0;
  double t = 0.0;
  while (t < cap) {
    const double xn = x - spec.kappa * eval_drift(spec, x) * dt +
                      sq_dt * rng.gaussian();
    if (xn > x) {
      for (long long lv = static_cast<long long>(std::floor(x)) + 1;
           lv <= static_cast<long long>(std::floor(xn)); ++lv)
        if (lv != box0)
          return t + dt * (static_cast<double>(lv) - x) / (xn - x);
    } else if (xn < x) {
      for (long long lv = static_cast<long long>(std::ceil(x)) - 1;
           lv >= static_cast<long long>(std::ceil(xn)); --lv)
        if (lv != box0)
          return t + dt * (x - static_cast<double>(lv)) / (x - xn);
    }
    x = xn;
    t += dt;
  }
  return cap;
}

TheoremMainResult run_theorem_main(const PotentialSpec& spec, double L,
                                   const std::vector<double>& x0,
                                   std::size_t trials, double dt,
                                   std::uint64_t seed, std::size_t threads,
                                   double lambda_hat, std::size_t lambda_trials,
                                   double start_jitter) {
  if (!(L > 0.0)) throw std::invalid_argument("lookahead must be positive");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  if (start_jitter < 0.0)
    throw std::invalid_argument("start jitter must be >= 0");
  if (dt == 0.0) dt = default_dt(spec);
  TheoremMainResult res;
  res.kappa = spec.kappa;
  res.foresight = L;
  res.trials = trials;
  if (lambda_hat == 0.0) {
    const LambdaEstimate est =
        lambda_for_kappa(spec, lambda_trials, dt, seed, "theorem/lambda",
                         default_g_hat(spec), threads);
    lambda_hat = est.lambda_mean;
  }
  res.lambda_hat = lambda_hat;

  const std::size_t n = x0.size();
  WalkConfig wcfg{n, 1.0};
  LatticeConfig y0(n);
  for (std::size_t i = 0; i < n; ++i) y0[i] = box_of(x0[i]);
  if (!strictly_increasing(y0))
    throw std::invalid_argument("starting boxes must be strictly ordered");
  if (start_jitter > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (box_of(x0[i] - start_jitter) != y0[i] ||
          box_of(x0[i] + start_jitter) != y0[i])
        throw std::invalid_argument("start jitter can change a starting box");
      if (i > 0 && x0[i] - x0[i - 1] <= 2.0 * start_jitter)
        throw std::invalid_argument("start jitter can break the ordering");
    }
  }

  const double walk_horizon = 2.0 * L;
  const double native_T = L * lambda_hat;
  const double native_horizon = walk_horizon * lambda_hat;

  res.mbm_first.resize(trials);
  res.mrw_first.resize(trials);
  res.j1_distances.resize(trials);
  res.mbm_counts.resize(trials);
  res.mrw_counts.resize(trials);
  std::vector<char> fallback(trials, 0);

  parallel_for(trials, threads, [&](std::size_t i) {
    std::vector<double> start = x0;
    if (start_jitter > 0.0) {
      RandomStream jrng(derive_seed(seed, trial_label("theorem/jitter", i)));
      for (std::size_t q = 0; q < n; ++q)
        start[q] += start_jitter * (2.0 * jrng.uniform01() - 1.0);
    }
    const DiffusionRunRecord mbm = algorithm_b(
        spec, native_T, start, dt, native_horizon,
        derive_seed(seed, trial_label("theorem/mbm", i)));
    const BoxPath bp = box_process(mbm.path);
    const WalkRunRecord mrw = algorithm_a(
        wcfg, L, y0, walk_horizon,
        derive_seed(seed, trial_label("theorem/mrw", i)));

    const StepPath f = step_path_from_boxes(bp, lambda_hat, walk_horizon);
    const StepPath g = step_path_from_jumps(mrw.path);
    res.mbm_first[i] = f.jumps.empty() ? walk_horizon : f.jumps.front().time;
    res.mrw_first[i] = g.jumps.empty() ? walk_horizon : g.jumps.front().time;
    double c = 0.0;
    for (const auto& j : f.jumps) c += j.time <= 1.0 ? 1.0 : 0.0;
    res.mbm_counts[i] = c;
    c = 0.0;
    for (const auto& j : g.jumps) c += j.time <= 1.0 ? 1.0 : 0.0;
    res.mrw_counts[i] = c;
    const J1Result j1 = skorohod_j1(f, g);
    res.j1_distances[i] = j1.distance;
    fallback[i] = j1.exact ? 0 : 1;
  });

  res.first_event_ecdf_distance =
      ecdf_distance(EcdfSample(res.mbm_first), EcdfSample(res.mrw_first));
  res.median_j1 = median_of(res.j1_distances);
  for (char fb : fallback) res.j1_fallback_used |= fb != 0;
  double ma = 0.0, mb = 0.0;
  for (double v : res.mbm_counts) ma += v;
  for (double v : res.mrw_counts) mb += v;
  res.mean_count_gap = std::fabs(ma - mb) / static_cast<double>(trials);
  return res;
}

namespace {

int run_validate_potential(const ExperimentConfig& cfg) {
  const PotentialSpec spec = spec_from_config(cfg);
  const ValidationReport vr = validate_spec(spec);
  ExperimentReport rep;
  rep.name = "validate-potential";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  for (const auto& c : vr.checks)
    rep.criteria.push_back({c.name, c.passed ? 1.0 : 0.0, 1.0, ">=", 0.0, c.passed});
  rep.scalars["sup_curvature"] = max_abs_curvature(spec);
  rep.scalars["default_dt"] = default_dt(spec);
  write_report_json(rep, json_path(cfg, "report.json"));
  std::fputs(vr.summary().c_str(), stdout);
  return vr.all_passed() ? 0 : 1;
}

int run_simulate_diffusion(const ExperimentConfig& cfg) {
  const PotentialSpec spec = spec_from_config(cfg);
  if (cfg.x0.empty()) throw ConfigError("simulate-diffusion needs numerics.x0");
  const double dt = cfg.dt != 0.0 ? cfg.dt : default_dt(spec);
  const TrajectoryGrid traj =
      integrate(spec, cfg.x0, dt, cfg.horizon, cfg.seed);
  const std::string comment = provenance_comment(config_hash_hex(cfg), cfg.seed);
  dump_trajectory_csv(traj, out_path(cfg, "trajectory.csv"), comment);
  const BoxPath bp = box_process(traj);
  dump_boxpath_csv(bp, out_path(cfg, "boxes.csv"), comment);
  ExperimentReport rep;
  rep.name = "simulate-diffusion";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  rep.scalars["dt"] = dt;
  rep.scalars["rows"] = static_cast<double>(traj.rows());
  rep.scalars["box_events"] = static_cast<double>(bp.events.size());
  // exit times are only meaningful when the start is inside the chamber;
  // the integrator itself is happy with any x0
  bool ordered_start = true;
  for (std::size_t i = 1; i < cfg.x0.size(); ++i)
    if (cfg.x0[i] <= cfg.x0[i - 1]) ordered_start = false;
  if (ordered_start) {
    const ChamberExits exits = first_exit_weyl(traj);
    if (exits.continuous)
      rep.scalars["first_exit_continuous"] = *exits.continuous;
    if (exits.boxes) rep.scalars["first_exit_boxes"] = *exits.boxes;
  }
  write_report_json(rep, json_path(cfg, "report.json"));
  return 0;
}

int run_simulate_mrw(const ExperimentConfig& cfg) {
  if (cfg.y0.empty()) throw ConfigError("simulate-mrw needs walk.y0");
  WalkConfig wcfg{cfg.y0.size(), cfg.p};
  const WalkRunRecord rec = algorithm_a(wcfg, cfg.L, cfg.y0, cfg.horizon,
                                        cfg.seed, cfg.max_rejects);
  const std::string comment = provenance_comment(config_hash_hex(cfg), cfg.seed);
  dump_jumppath_csv(rec.path, out_path(cfg, "jumps.csv"), comment);
  ExperimentReport rep;
  rep.name = "simulate-mrw";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  rep.scalars["segments"] = static_cast<double>(rec.segment_times.size() - 1);
  rep.scalars["events"] = static_cast<double>(rec.path.events.size());
  double rej = 0.0;
  for (std::size_t r : rec.reject_counts) rej += static_cast<double>(r);
  rep.scalars["rejects"] = rej;
  rep.series["segment_times"] = rec.segment_times;
  rep.series["collision_times"] = rec.collision_times;
  write_report_json(rep, json_path(cfg, "report.json"));
  return 0;
}

int run_simulate_mbm(const ExperimentConfig& cfg) {
  const PotentialSpec spec = spec_from_config(cfg);
  if (cfg.x0.empty()) throw ConfigError("simulate-mbm needs numerics.x0");
  const double dt = cfg.dt != 0.0 ? cfg.dt : default_dt(spec);
  const DiffusionRunRecord rec =
      cfg.eps > 0.0
          ? algorithm_c(spec, cfg.T, cfg.x0, dt, cfg.horizon, cfg.seed,
                        cfg.eps, cfg.max_rejects)
          : algorithm_b(spec, cfg.T, cfg.x0, dt, cfg.horizon, cfg.seed,
                        cfg.max_rejects);
  const std::string comment = provenance_comment(config_hash_hex(cfg), cfg.seed);
  dump_trajectory_csv(rec.path, out_path(cfg, "trajectory.csv"), comment);
  dump_boxpath_csv(box_process(rec.path), out_path(cfg, "boxes.csv"), comment);
  ExperimentReport rep;
  rep.name = "simulate-mbm";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  rep.scalars["dt"] = dt;
  rep.scalars["eps"] = cfg.eps;
  rep.scalars["segments"] = static_cast<double>(rec.segment_times.size() - 1);
  double rej = 0.0;
  for (std::size_t r : rec.reject_counts) rej += static_cast<double>(r);
  rep.scalars["rejects"] = rej;
  rep.series["segment_times"] = rec.segment_times;
  rep.series["collision_times"] = rec.collision_times;
  write_report_json(rep, json_path(cfg, "report.json"));
  return 0;
}

int run_metastability(const ExperimentConfig& cfg) {
  const std::size_t threads = resolve_thread_count(cfg.threads);
  const MetastabilityResult res = run_metastability_scan(cfg, threads);
  ExperimentReport rep;
  rep.name = "metastability";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  std::vector<double> kappas, means, quantiles, rights;
  for (const auto& e : res.series.per_kappa) {
    kappas.push_back(e.kappa);
    means.push_back(e.lambda_mean);
    quantiles.push_back(e.lambda_quantile);
    rights.push_back(e.right_fraction);
  }
  rep.series["kappa"] = kappas;
  rep.series["lambda_mean"] = means;
  rep.series["lambda_quantile"] = quantiles;
  rep.series["right_fraction"] = rights;
  rep.series["ks_statistic"] = res.ks_stats;
  rep.series["ks_pvalue"] = res.ks_pvalues;
  rep.scalars["slope"] = res.series.slope;
  rep.scalars["intercept"] = res.series.intercept;
  rep.scalars["g_hat"] = res.g_hat;
  write_report_json(rep, json_path(cfg, "report.json"));
  std::printf("slope of log(lambda_mean) vs kappa: %.4f\n", res.series.slope);
  return 0;
}

int run_interpolate(const ExperimentConfig& cfg) {
  if (cfg.y0.empty()) throw ConfigError("interpolate needs walk.y0");
  if (cfg.L_grid.empty()) throw ConfigError("interpolate needs walk.L_grid");
  WalkConfig wcfg{cfg.y0.size(), cfg.p};
  std::vector<RateRow> rows;
  for (double L : cfg.L_grid) {
    const DirectedRates r = mrw_rates(wcfg, L, cfg.y0, cfg.window);
    char label[48];
    std::snprintf(label, sizeof label, "L=%g %s", L, render_config(cfg.y0).c_str());
    for (std::size_t i = 0; i < r.right.size(); ++i) {
      rows.push_back({label, i, "right", r.right[i]});
      if (cfg.p < 1.0) rows.push_back({label, i, "left", r.left[i]});
    }
  }
  if (cfg.p == 1.0) {
    const std::vector<double> lim = vandermonde_rates(cfg.y0);
    for (std::size_t i = 0; i < lim.size(); ++i)
      rows.push_back({"L=inf " + render_config(cfg.y0), i, "right", lim[i]});
  }
  dump_rates_csv(rows, out_path(cfg, "rates.csv"),
                 provenance_comment(config_hash_hex(cfg), cfg.seed));
  ExperimentReport rep;
  rep.name = "interpolate";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  if (cfg.p == 1.0) {
    const auto table = scaling_check(wcfg, cfg.y0, cfg.L_grid);
    std::vector<double> raw, corrected;
    for (const auto& p : table) {
      raw.push_back(p.raw);
      corrected.push_back(p.corrected);
    }
    rep.series["L_grid"] = cfg.L_grid;
    rep.series["scaled_h_raw"] = raw;
    rep.series["scaled_h_corrected"] = corrected;
    rep.scalars["vandermonde"] = vandermonde_value(cfg.y0);
  }
  write_report_json(rep, json_path(cfg, "report.json"));
  return 0;
}

int run_theorem_main_cmd(const ExperimentConfig& cfg) {
  const PotentialSpec spec = spec_from_config(cfg);
  if (cfg.x0.empty()) throw ConfigError("theorem-main needs numerics.x0");
  const std::size_t threads = resolve_thread_count(cfg.threads);
  const TheoremMainResult res =
      run_theorem_main(spec, cfg.L, cfg.x0, cfg.trials, cfg.dt, cfg.seed,
                       threads);
  ExperimentReport rep;
  rep.name = "theorem-main";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  rep.scalars["kappa"] = res.kappa;
  rep.scalars["lambda_hat"] = res.lambda_hat;
  rep.scalars["first_event_ecdf_distance"] = res.first_event_ecdf_distance;
  rep.scalars["median_j1"] = res.median_j1;
  rep.scalars["mean_count_gap"] = res.mean_count_gap;
  rep.scalars["j1_fallback_used"] = res.j1_fallback_used ? 1.0 : 0.0;
  rep.series["mbm_first"] = res.mbm_first;
  rep.series["mrw_first"] = res.mrw_first;
  rep.series["j1_distances"] = res.j1_distances;
  write_report_json(rep, json_path(cfg, "report.json"));
  std::printf("first-event ecdf distance %.4f, median J1 %.4f\n",
              res.first_event_ecdf_distance, res.median_j1);
  return 0;
}

int run_rates(const ExperimentConfig& cfg) {
  if (cfg.y0.empty()) throw ConfigError("rates needs walk.y0");
  WalkConfig wcfg{cfg.y0.size(), cfg.p};
  const DirectedRates r = mrw_rates(wcfg, cfg.L, cfg.y0, cfg.window);
  std::vector<RateRow> rows;
  const std::string label = render_config(cfg.y0);
  for (std::size_t i = 0; i < r.right.size(); ++i) {
    rows.push_back({label, i, "right", r.right[i]});
    if (cfg.p < 1.0) rows.push_back({label, i, "left", r.left[i]});
  }
  dump_rates_csv(rows, out_path(cfg, "rates.csv"),
                 provenance_comment(config_hash_hex(cfg), cfg.seed));
  ExperimentReport rep;
  rep.name = "rates";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  rep.scalars["total_rate"] = r.total();
  write_report_json(rep, json_path(cfg, "report.json"));
  for (const auto& row : rows)
    std::printf("%s particle %zu %s %.6f\n", row.config.c_str(), row.particle,
                row.direction.c_str(), row.rate);
  return 0;
}

int run_selftest(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.name = "selftest";
  rep.seed = cfg.seed;
  rep.config_hash = config_hash_hex(cfg);
  auto check = [&rep](const std::string& name, double value, double lo,
                      double hi) {
    rep.criteria.push_back({name, value, lo, "in", hi,
                            value >= lo && value <= hi});
  };

  // Poisson pmf anchor
  check("pmf-poisson-e-inv", transition_pmf({1, 1.0}, 1.0, 0),
        std::exp(-1.0) - 1e-15, std::exp(-1.0) + 1e-15);
  // two-sided pmf sums to one
  {
    const WalkConfig c{1, 0.7};
    double s = 0.0;
    for (long long dx = -60; dx <= 80; ++dx) s += transition_pmf(c, 2.0, dx);
    check("pmf-two-sided-normalised", s, 1.0 - 1e-12, 1.0 + 1e-12);
  }
  // determinant of identical start/end rows; the off-diagonal corner is
  // zero for the one-sided walk, so the determinant is exactly p(0)^2
  {
    const WalkConfig c{2, 1.0};
    const double d = km_determinant(c, 1.0, {0, 2}, {0, 2});
    const double p0 = transition_pmf(c, 1.0, 0);
    check("km-2x2-closed-form", d, p0 * p0 - 1e-15, p0 * p0 + 1e-15);
  }
  // limit rates at (0,1): blocked left particle, doubled right particle
  {
    const auto r = vandermonde_rates({0, 1});
    check("limit-rate-blocked", r[0], 0.0, 0.0);
    check("limit-rate-free", r[1], 2.0, 2.0);
    check("limit-rate-identity", vandermonde_sum_is_exactly_n({0, 5, 9}) ? 1 : 0,
          1, 1);
  }
  // J1 of a path against its small time shift
  {
    StepPath f, g;
    f.initial = {0};
    g.initial = {0};
    f.horizon = g.horizon = 10.0;
    f.jumps.push_back({5.0, 0, 1});
    g.jumps.push_back({5.25, 0, 1});
    const J1Result j1 = skorohod_j1(f, g);
    check("j1-time-shift", j1.distance, 0.25 - 1e-9, 0.25 + 1e-9);
  }
  // box path of a deterministic ramp
  {
    TrajectoryGrid traj;
    traj.dt = 0.1;
    traj.n_particles = 1;
    for (int k = 0; k <= 10; ++k)
      traj.positions.push_back(0.4 + 0.1 * static_cast<double>(k));
    const BoxPath bp = box_process(traj);
    check("box-ramp-events", static_cast<double>(bp.events.size()), 1, 1);
    if (!bp.events.empty())
      check("box-ramp-time", bp.events.front().time, 0.6 - 1e-12, 0.6 + 1e-12);
  }
  write_report_json(rep, json_path(cfg, "report.json"));
  std::fputs(render_criteria_text(rep).c_str(), stdout);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  if (cfg.name == "validate-potential") return run_validate_potential(cfg);
  if (cfg.name == "simulate-diffusion") return run_simulate_diffusion(cfg);
  if (cfg.name == "simulate-mrw") return run_simulate_mrw(cfg);
  if (cfg.name == "simulate-mbm") return run_simulate_mbm(cfg);
  if (cfg.name == "metastability") return run_metastability(cfg);
  if (cfg.name == "interpolate") return run_interpolate(cfg);
  if (cfg.name == "theorem-main") return run_theorem_main_cmd(cfg);
  if (cfg.name == "rates") return run_rates(cfg);
  if (cfg.name == "selftest") return run_selftest(cfg);
  throw ConfigError("unknown experiment name: " + cfg.name);
}

}  // namespace myosim
