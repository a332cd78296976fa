#include "myosim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace myosim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// value table for a step path: row k = configuration after k jumps
struct ValueTable {
  std::size_t particles;
  std::vector<long long> rows;  // (jumps+1) x particles

  explicit ValueTable(const StepPath& p) : particles(p.initial.size()) {
    rows.reserve((p.jumps.size() + 1) * particles);
    rows.insert(rows.end(), p.initial.begin(), p.initial.end());
    std::vector<long long> cur = p.initial;
    for (const auto& j : p.jumps) {
      if (j.particle >= particles)
        throw std::invalid_argument("jump particle index out of range");
      cur[j.particle] = j.value;
      rows.insert(rows.end(), cur.begin(), cur.end());
    }
  }

  const long long* row(std::size_t k) const { return rows.data() + k * particles; }
};

double row_gap(const ValueTable& a, std::size_t i, const ValueTable& b,
               std::size_t j) {
  const long long* ra = a.row(i);
  const long long* rb = b.row(j);
  long long worst = 0;
  for (std::size_t p = 0; p < a.particles; ++p)
    worst = std::max(worst, std::llabs(ra[p] - rb[p]));
  return static_cast<double>(worst);
}

void check_pair(const StepPath& f, const StepPath& g) {
  if (f.initial.size() != g.initial.size())
    throw std::invalid_argument("paths have different particle counts");
  if (f.horizon != g.horizon)
    throw std::invalid_argument("paths must share one horizon");
  for (const StepPath* p : {&f, &g}) {
    double prev = 0.0;
    for (const auto& j : p->jumps) {
      if (!(j.time > prev) || j.time > p->horizon)
        throw std::invalid_argument("jump times must strictly increase within (0, horizon]");
      prev = j.time;
    }
  }
}

// Feasibility of threshold d: can a time change with |lambda(t) - t| <= d
// carry f's jump epochs onto g's timeline so that every value pair realised
// on a nonempty interval differs by at most d?  States (i consumed f-jumps,
// j consumed g-jumps); only the minimal reachable epoch per state matters
// because every transition constraint is a lower bound on the position.
// A diagonal step pins an f-jump exactly onto a g-jump and is the only way
// to skip the mixed intermediate states; it is barred at the right endpoint
// (lambda(M) = M) unless the f-jump itself sits at M.
bool j1_feasible(double d, const ValueTable& vf, const ValueTable& vg,
                 const std::vector<double>& s, const std::vector<double>& u,
                 double M, std::vector<double>& best) {
  const std::size_t m = s.size(), n = u.size();
  if (row_gap(vf, 0, vg, 0) > d) return false;
  best.assign((m + 1) * (n + 1), kInf);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return best[i * (n + 1) + j];
  };
  at(0, 0) = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (i == 0 && j == 0) continue;
      if (row_gap(vf, i, vg, j) > d) continue;  // stays infeasible
      double cand = kInf;
      if (i > 0 && at(i - 1, j) < kInf) {
        // place sigma_i as early as allowed; it may not pass the next
        // unconsumed g-jump
        const double lo = std::max({0.0, s[i - 1] - d, at(i - 1, j)});
        double cap = std::min(M, s[i - 1] + d);
        if (j < n) cap = std::min(cap, u[j]);
        if (lo <= cap) cand = lo;
      }
      if (j > 0 && at(i, j - 1) <= u[j - 1]) cand = std::min(cand, u[j - 1]);
      if (i > 0 && j > 0 && at(i - 1, j - 1) <= u[j - 1] &&
          std::fabs(u[j - 1] - s[i - 1]) <= d &&
          (u[j - 1] < M || s[i - 1] == M))
        cand = std::min(cand, u[j - 1]);
      at(i, j) = cand;
    }
  }
  return at(m, n) < kInf;
}

}  // namespace

EcdfSample::EcdfSample(std::vector<double> v) : values(std::move(v)) {
  std::sort(values.begin(), values.end());
}

double EcdfSample::cdf(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) /
         static_cast<double>(values.size());
}

double ecdf_distance(const EcdfSample& a, const EcdfSample& b) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("empty sample");
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() || j < b.size()) {
    double x;
    if (i == a.size()) x = b.values[j];
    else if (j == b.size()) x = a.values[i];
    else x = std::min(a.values[i], b.values[j]);
    while (i < a.size() && a.values[i] == x) ++i;
    while (j < b.size() && b.values[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic_exponential(const EcdfSample& s) {
  if (s.size() == 0) throw std::invalid_argument("empty sample");
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = 1.0 - std::exp(-s.values[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.2) return 1.0;  // Q exceeds 1 - 1e-9 below here
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-14) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

KsResult ks_exponential(const EcdfSample& s) {
  if (s.size() < 20)
    throw std::invalid_argument("exponential KS test needs >= 20 samples");
  const double d = ks_statistic_exponential(s);
  return {d, kolmogorov_tail(std::sqrt(static_cast<double>(s.size())) * d)};
}

double supnorm_distance(const StepPath& f, const StepPath& g) {
  check_pair(f, g);
  ValueTable vf(f), vg(g);
  std::size_t i = 0, j = 0;
  double d = row_gap(vf, 0, vg, 0);
  // consume merged events; simultaneous jumps advance atomically
  while (i < f.jumps.size() || j < g.jumps.size()) {
    double t;
    if (i == f.jumps.size()) t = g.jumps[j].time;
    else if (j == g.jumps.size()) t = f.jumps[i].time;
    else t = std::min(f.jumps[i].time, g.jumps[j].time);
    while (i < f.jumps.size() && f.jumps[i].time == t) ++i;
    while (j < g.jumps.size() && g.jumps[j].time == t) ++j;
    d = std::max(d, row_gap(vf, i, vg, j));
  }
  return d;
}

J1Result skorohod_j1(const StepPath& f, const StepPath& g) {
  check_pair(f, g);
  const double sup = supnorm_distance(f, g);
  if (f.jumps.size() > 64 || g.jumps.size() > 64) return {sup, false};
  ValueTable vf(f), vg(g);
  std::vector<double> s, u;
  for (const auto& j : f.jumps) s.push_back(j.time);
  for (const auto& j : g.jumps) u.push_back(j.time);
  const double M = f.horizon;
  std::vector<double> work;
  if (j1_feasible(0.0, vf, vg, s, u, M, work)) return {0.0, true};
  double lo = 0.0, hi = sup;  // sup-norm is always a feasible threshold
  for (int it = 0; it < 64 && hi - lo > 1e-12 * std::max(1.0, sup); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (j1_feasible(mid, vf, vg, s, u, M, work)) hi = mid;
    else lo = mid;
  }
  return {hi, true};
}

RateEstimate rate_estimate(const std::vector<double>& counts, double h) {
  if (counts.size() < 100)
    throw std::invalid_argument("rate estimate needs >= 100 runs");
  if (!(h > 0.0)) throw std::invalid_argument("window width must be positive");
  const double runs = static_cast<double>(counts.size());
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= runs;
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= runs - 1.0;
  const double rate = mean / h;
  const double se = std::sqrt(var / runs) / h;
  RateEstimate est{rate, rate - 1.96 * se, rate + 1.96 * se};
  if (est.ci_low < 0.0) est.ci_low = 0.0;
  if (var == 0.0 && mean == 0.0) {
    // all-zero counts: the normal CI collapses; rule-of-three upper bound
    est.ci_high = std::max(est.ci_high, 3.0 / (h * runs));
  }
  return est;
}

LinearFit fit_log_rate(const std::vector<double>& kappas,
                       const std::vector<double>& rates) {
  const std::size_t n = kappas.size();
  if (n != rates.size() || n < 3)
    throw std::invalid_argument("fit needs >= 3 matched points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rates[i] > 0.0)) throw std::invalid_argument("rates must be positive");
    for (std::size_t j = i + 1; j < n; ++j)
      if (kappas[i] == kappas[j])
        throw std::invalid_argument("kappa values must be distinct");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = std::log(rates[i]);
    sx += kappas[i];
    sy += y;
    sxx += kappas[i] * kappas[i];
    sxy += kappas[i] * y;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  LinearFit fit;
  fit.slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    fit.residuals[i] = std::log(rates[i]) - fit.slope * kappas[i] - fit.intercept;
  return fit;
}

}  // namespace myosim
