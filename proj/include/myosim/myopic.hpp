#pragma once
// Myopic construction: the non-intersecting process is built segment by
// segment from samples of the free dynamics conditioned to stay ordered over
// a lookahead window.  A segment's sample is accepted by plain rejection,
// its free continuation is run until the first collision time tau, and only
// the prefix of length tau - lookahead is kept, so the process never sees
// less than the full lookahead of collision-free future:
//
//   t_{n+1} = t_n + tau_{n+1} - L            (walks, lookahead L)
//   t_{n+1} = t_n + tau_{n+1} - T            (diffusions, lookahead T)
//   t_{n+1} = eps ceil((tau_{n+1} - T + t_n)/eps)   (grid-aligned variant)
//
// In the grid-aligned variant every boundary is an exact multiple of eps
// (integer step arithmetic, eps itself a multiple of dt) and consecutive
// boundaries differ by at least eps.

#include <cstdint>
#include <vector>

#include "myosim/diffusion.hpp"
#include "myosim/walks.hpp"

namespace myosim {

struct SampleStats {
  std::size_t attempts = 0;
  std::size_t rejects = 0;
  double acceptance_rate() const {
    return attempts ? 1.0 - static_cast<double>(rejects) / static_cast<double>(attempts)
                    : 0.0;
  }
};

// free N-walk conditioned to stay ordered on [0, L], free beyond; events
// reported up to the horizon
JumpPath sample_conditioned_walk(const WalkConfig& cfg, double L,
                                 const LatticeConfig& y0, double horizon,
                                 std::uint64_t seed,
                                 std::size_t max_rejects = 1000000,
                                 SampleStats* stats = nullptr);

// free N-diffusion conditioned to stay ordered on [0, T] (grid check), free
// beyond, on the grid covering [0, horizon]
TrajectoryGrid sample_conditioned_diffusion(const PotentialSpec& spec, double T,
                                            const std::vector<double>& x0,
                                            double dt, double horizon,
                                            std::uint64_t seed,
                                            std::size_t max_rejects = 1000000,
                                            SampleStats* stats = nullptr);

struct WalkRunRecord {
  double foresight = 0.0;
  std::vector<double> segment_times;     // t_0 = 0 < t_1 < ...; the run can
                                         // end inside a truncated segment
  std::vector<double> collision_times;   // tau per completed segment
  std::vector<std::size_t> reject_counts;  // per segment
  JumpPath path;                         // assembled path on [0, horizon]
};

WalkRunRecord algorithm_a(const WalkConfig& cfg, double L,
                          const LatticeConfig& y0, double horizon,
                          std::uint64_t seed, std::size_t max_rejects = 1000000);

struct DiffusionRunRecord {
  double foresight = 0.0;
  double eps = 0.0;  // 0 for the unrounded variant
  std::vector<double> segment_times;
  std::vector<long long> segment_steps;  // same boundaries in grid steps
  std::vector<double> collision_times;
  std::vector<std::size_t> reject_counts;
  TrajectoryGrid path;
};

DiffusionRunRecord algorithm_b(const PotentialSpec& spec, double T,
                               const std::vector<double>& x0, double dt,
                               double horizon, std::uint64_t seed,
                               std::size_t max_rejects = 1000000);

// eps must be a positive multiple of dt and no larger than T
DiffusionRunRecord algorithm_c(const PotentialSpec& spec, double T,
                               const std::vector<double>& x0, double dt,
                               double horizon, std::uint64_t seed, double eps,
                               std::size_t max_rejects = 1000000);

}  // namespace myosim
