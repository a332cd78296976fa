#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "myosim/analysis.hpp"
#include "myosim/diffusion.hpp"
#include "myosim/experiments.hpp"
#include "myosim/myopic.hpp"
#include "myosim/potential.hpp"
#include "myosim/rng.hpp"
#include "myosim/walks.hpp"

using namespace myosim;

namespace {

WalkConfig cfg_of(std::size_t n, double p) {
  WalkConfig c;
  c.n_particles = n;
  c.p_right = p;
  return c;
}

PotentialSpec trig(double b, double kappa) {
  PotentialSpec s;
  s.form = PotentialForm::default_trig;
  s.tilt_b = b;
  s.kappa = kappa;
  return s;
}

// replay a jump path up to t_max; returns false on the first ordering
// violation, and optionally requires particle 0 to keep a gap of at least
// two below its neighbour whenever it moves
bool replay_ordered(const JumpPath& path, double t_max) {
  LatticeConfig y = path.initial;
  for (const auto& e : path.events) {
    if (e.time > t_max) break;
    y[e.particle] += e.delta;
    for (std::size_t i = 1; i < y.size(); ++i)
      if (y[i] <= y[i - 1]) return false;
  }
  return true;
}

bool rows_ordered(const TrajectoryGrid& t) {
  for (std::size_t k = 0; k < t.rows(); ++k)
    for (std::size_t i = 1; i < t.n_particles; ++i)
      if (t.at(k, i) <= t.at(k, i - 1)) return false;
  return true;
}

}  // namespace

TEST_CASE("conditioned walk sampler guards its inputs") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  CHECK_THROWS(sample_conditioned_walk(cfg, 1.0, {1, 0}, 2.0, 1u));
  CHECK_THROWS(sample_conditioned_walk(cfg, 0.0, {0, 1}, 2.0, 1u));
  CHECK_THROWS(sample_conditioned_walk(cfg, 1.0, {0, 1, 2}, 2.0, 1u));
}

TEST_CASE("single walker needs no rejection and stays Poisson") {
  const WalkConfig cfg = cfg_of(1, 1.0);
  double total = 0.0;
  const int runs = 2000;
  for (int i = 0; i < runs; ++i) {
    SampleStats st;
    const JumpPath p = sample_conditioned_walk(
        cfg, 1.0, {0}, 3.0, derive_seed(0xd0u, trial_label("one", i)), 1000, &st);
    CHECK(st.attempts == 1);
    CHECK(st.rejects == 0);
    total += static_cast<double>(p.events_up_to(3.0));
  }
  const double mean = total / runs;
  CHECK(std::fabs(mean - 3.0) < 4.0 * std::sqrt(3.0 / runs));
}

TEST_CASE("walk acceptance rate reproduces the survival determinant") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  const double h = survival_h(cfg, 1.0, {0, 1});
  std::size_t attempts = 0;
  const int accepted = 6000;
  for (int i = 0; i < accepted; ++i) {
    SampleStats st;
    const JumpPath p = sample_conditioned_walk(
        cfg, 1.0, {0, 1}, 1.0, derive_seed(0xd1u, trial_label("acc", i)), 100000,
        &st);
    attempts += st.attempts;
    CHECK(replay_ordered(p, 1.0));
  }
  const double p_hat = static_cast<double>(accepted) / static_cast<double>(attempts);
  const double se = std::sqrt(h * (1.0 - h) / static_cast<double>(attempts));
  CHECK(std::fabs(p_hat - h) <= 3.0 * se);
}

TEST_CASE("conditioning stops at the lookahead") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  int violated_later = 0;
  for (int i = 0; i < 400; ++i) {
    const JumpPath p = sample_conditioned_walk(
        cfg, 0.6, {0, 2}, 3.0, derive_seed(0xd2u, trial_label("tail", i)));
    CHECK(replay_ordered(p, 0.6));
    if (!replay_ordered(p, 3.0)) ++violated_later;
  }
  // beyond L the sample is free, so collisions do appear
  CHECK(violated_later > 0);
}

TEST_CASE("myopic walk bookkeeping is consistent") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  const WalkRunRecord rec = algorithm_a(cfg, 1.0, {0, 2}, 10.0, 0xd3u);
  CHECK(rec.foresight == 1.0);
  REQUIRE(!rec.segment_times.empty());
  CHECK(rec.segment_times.front() == 0.0);
  CHECK(rec.segment_times.size() == rec.collision_times.size() + 1);
  for (std::size_t n = 0; n + 1 < rec.segment_times.size(); ++n) {
    CHECK(rec.segment_times[n + 1] > rec.segment_times[n]);
    const double dt_seg = rec.segment_times[n + 1] - rec.segment_times[n];
    CHECK(std::fabs(dt_seg - (rec.collision_times[n] - 1.0)) <= 1e-12);
    CHECK(rec.collision_times[n] > 1.0);
    CHECK(rec.segment_times[n + 1] <= 10.0 + 1e-12);
  }
  CHECK(rec.reject_counts.size() >= rec.collision_times.size());
  double prev = 0.0;
  for (const auto& e : rec.path.events) {
    CHECK(e.time >= prev);
    prev = e.time;
    CHECK(e.time <= 10.0);
  }
  CHECK(replay_ordered(rec.path, 10.0));
}

TEST_CASE("myopic walk first-jump rates match the conditioned generator") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  const LatticeConfig y0{0, 2};
  const double h = 0.02;
  const int runs = 20000;
  std::vector<double> seen_r0;
  int which = 0;
  for (double L : {0.25, 1.0, 4.0}) {
    const DirectedRates oracle = mrw_rates(cfg, L, y0);
    std::size_t c0 = 0, c1 = 0;
    for (int i = 0; i < runs; ++i) {
      const WalkRunRecord rec =
          algorithm_a(cfg, L, y0, h,
                      derive_seed(0xd4u + which, trial_label("rate", i)));
      for (const auto& e : rec.path.events) {
        if (e.time > h) break;
        CHECK(e.delta == 1);
        if (e.particle == 0) ++c0;
        else ++c1;
      }
    }
    const double r0 = static_cast<double>(c0) / (runs * h);
    const double r1 = static_cast<double>(c1) / (runs * h);
    CHECK(std::fabs(r0 - oracle.right[0]) <=
          3.0 * std::sqrt(oracle.right[0] / (runs * h)));
    CHECK(std::fabs(r1 - oracle.right[1]) <=
          3.0 * std::sqrt(oracle.right[1] / (runs * h)));
    // foresight interpolates between the TASEP and Vandermonde envelopes
    CHECK(r0 > 0.45);
    CHECK(r0 < 1.05);
    CHECK(r1 > 0.95);
    CHECK(r1 < 1.55);
    seen_r0.push_back(r0);
    ++which;
  }
  CHECK(seen_r0[0] > seen_r0[1]);
  CHECK(seen_r0[1] > seen_r0[2]);
}

TEST_CASE("vanishing foresight reduces to the exclusion walk") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  const LatticeConfig y0{0, 1};
  const int runs = 10000;
  std::vector<double> myopic_first, asep_first;
  for (int i = 0; i < runs; ++i) {
    const WalkRunRecord rec = algorithm_a(
        cfg, 0.01, y0, 5.0, derive_seed(0xd5u, trial_label("tasep-a", i)));
    myopic_first.push_back(rec.path.first_event_time().value_or(5.0));
    const JumpPath asep =
        simulate_asep(cfg, y0, 5.0, derive_seed(0xd6u, trial_label("tasep-b", i)));
    asep_first.push_back(asep.first_event_time().value_or(5.0));
  }
  CHECK(ecdf_distance(EcdfSample(myopic_first), EcdfSample(asep_first)) <= 0.05);
}

TEST_CASE("blocked walker never moves while adjacent") {
  const WalkConfig cfg = cfg_of(2, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const WalkRunRecord rec = algorithm_a(
        cfg, 1.0, {0, 1}, 0.3, derive_seed(0xd7u, trial_label("blocked", i)));
    LatticeConfig y{0, 1};
    for (const auto& e : rec.path.events) {
      if (e.particle == 0) CHECK(y[1] - y[0] >= 2);
      y[e.particle] += e.delta;
    }
  }
}

TEST_CASE("single conditioned diffusion is the plain integrator") {
  const PotentialSpec s = trig(0.5, 2.0);
  SampleStats st;
  const TrajectoryGrid cond =
      sample_conditioned_diffusion(s, 0.2, {0.3}, 1e-3, 1.0, 21u, 10, &st);
  const TrajectoryGrid base = integrate(s, {0.3}, 1e-3, 1.0, 21u);
  CHECK(st.attempts == 1);
  CHECK(st.rejects == 0);
  CHECK(cond.positions == base.positions);

  CHECK_THROWS(sample_conditioned_diffusion(s, 0.2, {1.0, 0.0}, 1e-3, 1.0, 1u));
  CHECK_THROWS(sample_conditioned_diffusion(s, 1e-5, {0.0, 1.0}, 1e-3, 1.0, 1u));
}

TEST_CASE("pair acceptance matches the no-crossing probability of free motion") {
  // nearly coupling-free, so the gap is a variance-2t Brownian motion and
  // P(no crossing by T) = 1 - 2*Phi-bar(gap / sqrt(2T)) = 0.843 at gap 1,
  // T = 1/4, slightly lifted by grid monitoring
  const PotentialSpec s = trig(0.5, 0.01);
  std::size_t attempts = 0;
  const int accepted = 3000;
  for (int i = 0; i < accepted; ++i) {
    SampleStats st;
    const TrajectoryGrid t = sample_conditioned_diffusion(
        s, 0.25, {0.0, 1.0}, 1e-3, 0.25,
        derive_seed(0xd8u, trial_label("band", i)), 100000, &st);
    attempts += st.attempts;
    CHECK(rows_ordered(t));
  }
  const double p_hat = static_cast<double>(accepted) / static_cast<double>(attempts);
  CHECK(p_hat > 0.83);
  CHECK(p_hat < 0.87);
}

TEST_CASE("conditioning separates particles uniformly in the start") {
  const PotentialSpec s = trig(0.5, 2.0);
  int gap_index = 0;
  for (double gap : {0.05, 0.2, 1.0}) {
    const std::uint64_t master = 0xd900u + 16u * static_cast<unsigned>(gap_index++);
    const int want = 150;
    int wide = 0;
    for (int i = 0; i < want; ++i) {
      const TrajectoryGrid t = sample_conditioned_diffusion(
          s, 1.0, {0.0, gap}, 1e-3, 1.0, derive_seed(master, trial_label("sep", i)),
          2000000);
      const std::size_t last = t.rows() - 1;
      if (t.at(last, 1) - t.at(last, 0) > 0.05) ++wide;
    }
    INFO("gap ", gap);
    CHECK(wide >= static_cast<int>(0.7 * want));
  }
}

TEST_CASE("myopic diffusion keeps order and its bookkeeping") {
  const PotentialSpec s = trig(0.5, 2.0);
  const DiffusionRunRecord rec =
      algorithm_b(s, 0.5, {0.1, 1.1}, 1e-3, 2.5, 0xdau);
  CHECK(rec.eps == 0.0);
  CHECK(rec.path.rows() == 2501);
  CHECK(rows_ordered(rec.path));
  REQUIRE(rec.segment_times.size() == rec.collision_times.size() + 1);
  REQUIRE(rec.segment_steps.size() == rec.segment_times.size());
  for (std::size_t n = 0; n + 1 < rec.segment_times.size(); ++n) {
    CHECK(rec.segment_times[n + 1] > rec.segment_times[n]);
    CHECK(rec.collision_times[n] > 0.5);
    // boundary advance equals collision row minus lookahead, in steps
    const long long adv = rec.segment_steps[n + 1] - rec.segment_steps[n];
    CHECK(adv >= 1);
    const long long k_tau = std::llround(rec.collision_times[n] / 1e-3);
    CHECK(adv == k_tau - 500);
    CHECK(rec.segment_times[n + 1] ==
          doctest::Approx(1e-3 * static_cast<double>(rec.segment_steps[n + 1]))
              .epsilon(1e-12));
  }
}

TEST_CASE("myopic diffusion forgets its past at matched states") {
  const PotentialSpec s = trig(0.5, 2.0);
  const std::vector<double> x0{0.0, 1.0};
  std::vector<double> early, late;
  const int runs = 2000;
  for (int i = 0; i < runs; ++i) {
    const DiffusionRunRecord rec = algorithm_b(
        s, 0.5, x0, 1e-3, 2.5, derive_seed(0xdbu, trial_label("markov", i)));
    const auto& p = rec.path;
    early.push_back(p.at(500, 0) - p.at(0, 0));
    if (std::fabs(p.at(2000, 0) - x0[0]) <= 0.1 &&
        std::fabs(p.at(2000, 1) - x0[1]) <= 0.1)
      late.push_back(p.at(2500, 0) - p.at(2000, 0));
  }
  REQUIRE(late.size() > 200);
  CHECK(ecdf_distance(EcdfSample(early), EcdfSample(late)) <= 0.1);
}

TEST_CASE("grid-aligned variant degenerates to the plain one at eps = dt") {
  const PotentialSpec s = trig(0.5, 2.0);
  const DiffusionRunRecord b = algorithm_b(s, 0.5, {0.1, 1.1}, 1e-3, 2.5, 0xdcu);
  const DiffusionRunRecord c =
      algorithm_c(s, 0.5, {0.1, 1.1}, 1e-3, 2.5, 0xdcu, 1e-3);
  CHECK(b.path.positions == c.path.positions);
  CHECK(b.segment_steps == c.segment_steps);
  CHECK(b.collision_times == c.collision_times);
}

TEST_CASE("grid-aligned boundaries are exact multiples with minimum spacing") {
  // weak wells and a small gap so collisions, and therefore boundaries,
  // actually show up inside the horizon
  const PotentialSpec s = trig(0.5, 0.5);
  const double eps = 8e-3;
  std::size_t boundaries = 0;
  for (int i = 0; i < 20; ++i) {
    const DiffusionRunRecord rec =
        algorithm_c(s, 0.2, {0.1, 0.6}, 1e-3, 2.5,
                    derive_seed(0xddu, trial_label("grid", i)), eps);
    CHECK(rec.eps == eps);
    boundaries += rec.collision_times.size();
    for (std::size_t n = 0; n < rec.segment_steps.size(); ++n)
      CHECK(rec.segment_steps[n] % 8 == 0);
    for (std::size_t n = 0; n + 1 < rec.segment_steps.size(); ++n) {
      CHECK(rec.segment_steps[n + 1] - rec.segment_steps[n] >= 8);
      CHECK(rec.segment_times[n + 1] - rec.segment_times[n] >= eps - 1e-12);
    }
    CHECK(rows_ordered(rec.path));
  }
  CHECK(boundaries >= 10);

  CHECK_THROWS(algorithm_c(s, 0.5, {0.1, 1.1}, 1e-3, 2.5, 1u, 1.5e-3));
  CHECK_THROWS(algorithm_c(s, 0.5, {0.1, 1.1}, 1e-3, 2.5, 1u, 0.0));
  CHECK_THROWS(algorithm_c(s, 0.5, {0.1, 1.1}, 1e-3, 2.5, 1u, 0.6));
}

TEST_CASE("halving eps tightens the seed-paired coupling") {
  // the grid variant consumes the stream exactly like the plain one until
  // the first boundary, so with a shared seed its first boundary must be
  // the plain boundary rounded up to the eps grid, the committed rows must
  // agree bitwise up to that point, and the rounding delay is below eps
  const PotentialSpec s = trig(0.5, 0.25);
  const std::vector<double> x0{0.1, 0.6};
  const double dt = 1e-3;
  int with_boundary = 0;
  double mean_coarse = 0.0, mean_fine = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t seed = derive_seed(0xdeu, trial_label("eps", i));
    const DiffusionRunRecord b = algorithm_b(s, 0.256, x0, dt, 0.512, seed);
    if (b.segment_steps.size() < 2) continue;
    ++with_boundary;
    const long long kb = b.segment_steps[1];
    for (double eps : {0.064, 0.008}) {
      const DiffusionRunRecord c =
          algorithm_c(s, 0.256, x0, dt, 0.512, seed, eps);
      REQUIRE(c.segment_steps.size() >= 2);
      const long long es = std::llround(eps / dt);
      const long long kc = c.segment_steps[1];
      CHECK(kc == (kb + es - 1) / es * es);
      CHECK(c.collision_times[0] == b.collision_times[0]);
      bool same = true;
      for (long long k = 0; k <= kb && same; ++k)
        for (std::size_t p = 0; p < 2; ++p)
          if (c.path.at(static_cast<std::size_t>(k), p) !=
              b.path.at(static_cast<std::size_t>(k), p))
            same = false;
      CHECK(same);
      const double gap = static_cast<double>(kc - kb) * dt;
      CHECK(gap >= 0.0);
      CHECK(gap < eps);
      (eps == 0.064 ? mean_coarse : mean_fine) += gap;
    }
  }
  REQUIRE(with_boundary >= 40);
  mean_coarse /= with_boundary;
  mean_fine /= with_boundary;
  CHECK(mean_fine < mean_coarse);
}

TEST_CASE("paired walk and diffusion experiment runs and repeats") {
  const PotentialSpec s = trig(0.5, 2.0);
  const TheoremMainResult r =
      run_theorem_main(s, 0.5, {0.1, 1.1}, 40, 1e-3, 0xdfu, 1, 0.0, 120);
  CHECK(r.kappa == 2.0);
  CHECK(r.foresight == 0.5);
  CHECK(r.lambda_hat > 1.0);
  CHECK(r.trials == 40);
  CHECK(r.mbm_first.size() == 40);
  CHECK(r.mrw_first.size() == 40);
  CHECK(r.j1_distances.size() == 40);
  CHECK(r.first_event_ecdf_distance >= 0.0);
  CHECK(r.first_event_ecdf_distance <= 1.0);
  CHECK(r.median_j1 >= 0.0);
  CHECK(r.mbm_counts.size() == 40);
  CHECK(r.mrw_counts.size() == 40);

  const TheoremMainResult again =
      run_theorem_main(s, 0.5, {0.1, 1.1}, 40, 1e-3, 0xdfu, 1, 0.0, 120);
  CHECK(again.lambda_hat == r.lambda_hat);
  CHECK(again.mbm_first == r.mbm_first);
  CHECK(again.mrw_first == r.mrw_first);
  CHECK(again.median_j1 == r.median_j1);
}

TEST_CASE("single-particle box clock is nearly exponential") {
  const PotentialSpec s = trig(0.5, 3.0);
  const TheoremMainResult r =
      run_theorem_main(s, 0.5, {0.1}, 400, 1e-3, 0xe0u, 1, 0.0, 300);
  CHECK(r.first_event_ecdf_distance <= 0.15);
}
