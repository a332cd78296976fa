#pragma once
// Statistics used by the experiments: empirical-CDF distances, a one-sample
// exponential Kolmogorov-Smirnov test, Poisson rate estimation with normal
// CIs, log-linear fits, and an exact Skorohod J1 distance between
// integer-valued step paths on a common time interval.

#include <cstddef>
#include <vector>

namespace myosim {

struct EcdfSample {
  std::vector<double> values;  // sorted ascending on construction
  explicit EcdfSample(std::vector<double> v);
  std::size_t size() const { return values.size(); }
  double cdf(double x) const;  // fraction of values <= x
};

// sup_x |F_a(x) - F_b(x)|, exact two-sample statistic
double ecdf_distance(const EcdfSample& a, const EcdfSample& b);

// one-sample distance against F(x) = 1 - e^{-x}
double ks_statistic_exponential(const EcdfSample& s);

// survival function of the Kolmogorov distribution, Q(lambda) = 2 sum_{k>=1}
// (-1)^{k-1} e^{-2 k^2 lambda^2}
double kolmogorov_tail(double lambda);

struct KsResult {
  double statistic;
  double p_value;  // kolmogorov_tail(sqrt(n) * statistic)
};
KsResult ks_exponential(const EcdfSample& s);  // needs >= 20 samples

// cadlag step path: particle values start at initial and change by jumps;
// jumps are time-ordered in (0, horizon]
struct StepPath {
  struct Jump {
    double time;
    std::size_t particle;
    long long value;  // value after the jump
  };
  std::vector<long long> initial;
  std::vector<Jump> jumps;
  double horizon = 0.0;
};

// max over time of the componentwise gap between the two step functions
double supnorm_distance(const StepPath& f, const StepPath& g);

struct J1Result {
  double distance;
  bool exact;  // false: jump count over the cap, distance is the sup-norm bound
};

// Skorohod J1 distance: inf over nondecreasing time changes lambda of
// max(sup |lambda(t) - t|, sup |f(lambda(t)) - g(t)|).  For step paths the
// infimum is computed exactly by bisection over the threshold d with a
// feasibility sweep that matches jump epochs within d while preserving
// order.  Both paths must share the same horizon.
J1Result skorohod_j1(const StepPath& f, const StepPath& g);

struct RateEstimate {
  double rate;
  double ci_low;
  double ci_high;
};
// counts of events in windows of width h over repeated runs; normal-theory
// 95% CI, widened by the rule-of-three bound when every count is zero
RateEstimate rate_estimate(const std::vector<double>& counts, double h);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};
// least squares of log(rate) against kappa; rates must be positive and the
// kappa values distinct
LinearFit fit_log_rate(const std::vector<double>& kappas,
                       const std::vector<double>& rates);

}  // namespace myosim
