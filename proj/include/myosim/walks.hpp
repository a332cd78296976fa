#pragma once
// Lattice side: N-particle continuous-time walks on Z, each particle jumping
// right at rate p and left at rate 1-p.  The survival weight
//
//   h_L(y) = sum_z det[ p_L(y_i, z_j) ]
//
// (a determinant per target configuration, summed over ordered z) is the
// probability that N independent copies started at y stay strictly ordered
// up to time L.  Jump rates of the walk conditioned to never collide within
// lookahead L are ratios of h_L at neighbouring configurations; as L grows
// they approach the Vandermonde-ratio rates of the fully non-intersecting
// walk.

#include <cstdint>
#include <optional>
#include <vector>

namespace myosim {

struct WalkConfig {
  std::size_t n_particles = 1;
  double p_right = 1.0;  // in [1/2, 1]
};

using LatticeConfig = std::vector<long long>;

bool strictly_increasing(const LatticeConfig& y);
bool strictly_increasing_real(const std::vector<double>& x);

struct JumpEvent {
  double time;
  std::size_t particle;
  int delta;  // +1 or -1
};

struct JumpPath {
  LatticeConfig initial;
  std::vector<JumpEvent> events;  // strictly increasing times
  double horizon = 0.0;

  LatticeConfig at(double t) const;  // config after all events with time <= t
  std::optional<double> first_event_time() const;
  std::size_t events_up_to(double t) const;  // count of events with time <= t
};

// single-particle transition probability over elapsed time t for displacement
// dx; p = 1 is a Poisson pmf, p < 1 the two-sided series truncated at
// relative tail 1e-16
double transition_pmf(const WalkConfig& cfg, double t, long long dx);

// det[ transition_pmf(t, y_j - x_i) ]; tiny negative results (roundoff at
// underflow scale) clamp to 0 and bump the counter below
double km_determinant(const WalkConfig& cfg, double t, const LatticeConfig& x,
                      const LatticeConfig& y);
std::uint64_t km_clamp_count();

// truncation window for the h_L sum; default ceil(L + 10 sqrt(L) + 10) keeps
// the discarded Poisson tail below ~1e-20 relative
long long default_window(double L);

// h_L(y); returns 0 off the ordered chamber.  window = 0 picks the default;
// anything below ceil(L + 10 sqrt(L)) is refused.
double survival_h(const WalkConfig& cfg, double L, const LatticeConfig& y,
                  long long window = 0);

struct DirectedRates {
  std::vector<double> right;
  std::vector<double> left;
  double total() const;
};

// myopic rates at y: right_i = p h_L(y+e_i)/h_L(y), left_i = (1-p) h_L(y-e_i)/h_L(y)
DirectedRates mrw_rates(const WalkConfig& cfg, double L, const LatticeConfig& y,
                        long long window = 0);

// L -> infinity limit rates (p = 1 walk): Delta(y + e_i) / Delta(y) as a
// product of gap ratios
std::vector<double> vandermonde_rates(const LatticeConfig& y);
// exact-integer check of the rate normalisation sum_i Delta(y+e_i) = N Delta(y)
bool vandermonde_sum_is_exactly_n(const LatticeConfig& y);
double vandermonde_value(const LatticeConfig& y);

// interacting benchmark: jump attempts at the free rates, suppressed when the
// target site is occupied
JumpPath simulate_asep(const WalkConfig& cfg, const LatticeConfig& y0,
                       double horizon, std::uint64_t seed);
// fully non-intersecting walk (p = 1), jumping at the Vandermonde rates;
// total jump rate is exactly N in every configuration
JumpPath simulate_ni_walks(const LatticeConfig& y0, double horizon,
                           std::uint64_t seed);

struct ScalingPoint {
  double L;
  double raw;        // L^{N(N-1)/4} h_L(y)
  double corrected;  // raw / K_N, comparable to Delta(y)
};
// convergence table toward the Vandermonde limit; requires p = 1.  K_N is
// the Gaussian chamber integral of the Vandermonde (Mehta's integral at
// gamma = 1/2) over N! prod_{j<N} j!, the constant the local CLT puts in
// front of Delta; K_2 = 1/sqrt(pi).
std::vector<ScalingPoint> scaling_check(const WalkConfig& cfg,
                                        const LatticeConfig& y,
                                        const std::vector<double>& L_grid);

}  // namespace myosim
