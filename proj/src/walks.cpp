#include "myosim/walks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "myosim/rng.hpp"

namespace myosim {
namespace {

std::atomic<std::uint64_t> g_clamp_count{0};

void require_config(const WalkConfig& cfg) {
  if (cfg.n_particles == 0) throw std::invalid_argument("n_particles must be >= 1");
  if (!(cfg.p_right >= 0.5 && cfg.p_right <= 1.0))
    throw std::invalid_argument("p_right must lie in [1/2, 1]");
}

// det with the tiny-negative clamp shared by km_determinant and survival_h
double clamped_det(Eigen::MatrixXd& a) {
  double det;
  const auto n = a.rows();
  if (n == 1) {
    det = a(0, 0);
  } else if (n == 2) {
    det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  } else {
    det = a.partialPivLu().determinant();
  }
  if (det < 0.0) {
    if (det < -1e-14) ++g_clamp_count;
    det = 0.0;
  }
  return det;
}

}  // namespace

bool strictly_increasing(const LatticeConfig& y) {
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] <= y[i - 1]) return false;
  return true;
}

bool strictly_increasing_real(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] <= x[i - 1]) return false;
  return true;
}

LatticeConfig JumpPath::at(double t) const {
  LatticeConfig y = initial;
  for (const auto& e : events) {
    if (e.time > t) break;
    y[e.particle] += e.delta;
  }
  return y;
}

std::optional<double> JumpPath::first_event_time() const {
  if (events.empty()) return std::nullopt;
  return events.front().time;
}

std::size_t JumpPath::events_up_to(double t) const {
  std::size_t k = 0;
  for (const auto& e : events) {
    if (e.time > t) break;
    ++k;
  }
  return k;
}

double transition_pmf(const WalkConfig& cfg, double t, long long dx) {
  require_config(cfg);
  if (t < 0.0) throw std::invalid_argument("elapsed time must be >= 0");
  if (t == 0.0) return dx == 0 ? 1.0 : 0.0;
  const double p = cfg.p_right;
  if (p == 1.0) {
    if (dx < 0) return 0.0;
    return std::exp(-t + static_cast<double>(dx) * std::log(t) -
                    std::lgamma(static_cast<double>(dx) + 1.0));
  }
  // two-sided: right jumps k+dx, left jumps k, k >= max(0, -dx)
  const long long k0 = std::max<long long>(0, -dx);
  const double lr = std::log(p * t);
  const double ll = std::log((1.0 - p) * t);
  double term = std::exp(-t + static_cast<double>(k0 + dx) * lr +
                         static_cast<double>(k0) * ll -
                         std::lgamma(static_cast<double>(k0 + dx) + 1.0) -
                         std::lgamma(static_cast<double>(k0) + 1.0));
  double sum = term;
  const double cross = p * (1.0 - p) * t * t;
  for (long long k = k0 + 1; k < k0 + 200000; ++k) {
    term *= cross / (static_cast<double>(k + dx) * static_cast<double>(k));
    sum += term;
    // series is eventually geometric-decaying; stop at 1e-16 relative
    if (term < 1e-16 * sum && static_cast<double>(k) > t) break;
  }
  return sum;
}

double km_determinant(const WalkConfig& cfg, double t, const LatticeConfig& x,
                      const LatticeConfig& y) {
  require_config(cfg);
  const std::size_t n = cfg.n_particles;
  if (x.size() != n || y.size() != n)
    throw std::invalid_argument("configuration size mismatch");
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = transition_pmf(cfg, t, y[j] - x[i]);
  return clamped_det(a);
}

std::uint64_t km_clamp_count() { return g_clamp_count.load(); }

long long default_window(double L) {
  return static_cast<long long>(std::ceil(L + 10.0 * std::sqrt(L) + 10.0));
}

namespace {

// enumerate ordered z with z_i in [y_i - lo_reach, y_i + window] and sum the
// determinants; pmf values cached by displacement
struct SurvivalSummer {
  const WalkConfig& cfg;
  double L;
  long long back, fwd;
  const LatticeConfig& y;
  std::unordered_map<long long, double> pmf;
  Eigen::MatrixXd mat;
  LatticeConfig z;
  double total = 0.0;

  SurvivalSummer(const WalkConfig& c, double l, long long b, long long f,
                 const LatticeConfig& yy)
      : cfg(c), L(l), back(b), fwd(f), y(yy),
        mat(static_cast<long>(yy.size()), static_cast<long>(yy.size())),
        z(yy.size(), 0) {}

  double prob(long long dx) {
    auto it = pmf.find(dx);
    if (it != pmf.end()) return it->second;
    const double v = transition_pmf(cfg, L, dx);
    pmf.emplace(dx, v);
    return v;
  }

  void recurse(std::size_t i, long long floor_z) {
    const std::size_t n = y.size();
    const long long lo = std::max(y[i] - back, floor_z);
    const long long hi = y[i] + fwd;
    for (long long v = lo; v <= hi; ++v) {
      z[i] = v;
      if (i + 1 < n) {
        recurse(i + 1, v + 1);
      } else {
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < n; ++c) mat(r, c) = prob(z[c] - y[r]);
        total += clamped_det(mat);
      }
    }
  }
};

}  // namespace

double survival_h(const WalkConfig& cfg, double L, const LatticeConfig& y,
                  long long window) {
  require_config(cfg);
  if (y.size() != cfg.n_particles)
    throw std::invalid_argument("configuration size mismatch");
  if (L < 0.0) throw std::invalid_argument("lookahead must be >= 0");
  if (!strictly_increasing(y)) return 0.0;
  if (window == 0) window = default_window(L);
  const long long floor_window =
      static_cast<long long>(std::ceil(L + 10.0 * std::sqrt(L)));
  if (window < floor_window)
    throw std::invalid_argument("window below the truncation floor ceil(L + 10 sqrt(L))");
  const long long back = cfg.p_right < 1.0 ? window : 0;
  SurvivalSummer s(cfg, L, back, window, y);
  s.recurse(0, std::numeric_limits<long long>::min());
  // h is a probability; roundoff can push the truncated sum past 1
  return std::min(s.total, 1.0);
}

double DirectedRates::total() const {
  double t = 0.0;
  for (double r : right) t += r;
  for (double l : left) t += l;
  return t;
}

DirectedRates mrw_rates(const WalkConfig& cfg, double L, const LatticeConfig& y,
                        long long window) {
  require_config(cfg);
  if (!strictly_increasing(y))
    throw std::invalid_argument("rates are defined on the ordered chamber only");
  const double h0 = survival_h(cfg, L, y, window);
  if (!(h0 > 0.0) || h0 < 1e-300)
    throw std::runtime_error("survival weight underflow at the current configuration");
  const std::size_t n = cfg.n_particles;
  DirectedRates out;
  out.right.assign(n, 0.0);
  out.left.assign(n, 0.0);
  LatticeConfig z = y;
  for (std::size_t i = 0; i < n; ++i) {
    if (cfg.p_right > 0.0) {
      z[i] = y[i] + 1;
      out.right[i] = cfg.p_right * survival_h(cfg, L, z, window) / h0;
      z[i] = y[i];
    }
    if (cfg.p_right < 1.0) {
      z[i] = y[i] - 1;
      out.left[i] = (1.0 - cfg.p_right) * survival_h(cfg, L, z, window) / h0;
      z[i] = y[i];
    }
  }
  return out;
}

std::vector<double> vandermonde_rates(const LatticeConfig& y) {
  if (!strictly_increasing(y))
    throw std::invalid_argument("rates are defined on the ordered chamber only");
  const std::size_t n = y.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      r *= static_cast<double>(y[i] + 1 - y[j]) / static_cast<double>(y[i] - y[j]);
    }
    out[i] = r;
  }
  return out;
}

bool vandermonde_sum_is_exactly_n(const LatticeConfig& y) {
  using boost::multiprecision::cpp_int;
  const std::size_t n = y.size();
  auto delta = [&](const LatticeConfig& v) {
    cpp_int d = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d *= cpp_int(v[j] - v[i]);
    return d;
  };
  cpp_int lhs = 0;
  LatticeConfig z = y;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = y[i] + 1;
    lhs += delta(z);
    z[i] = y[i];
  }
  return lhs == cpp_int(n) * delta(y);
}

double vandermonde_value(const LatticeConfig& y) {
  double d = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size(); ++j)
      d *= static_cast<double>(y[j] - y[i]);
  return d;
}

JumpPath simulate_asep(const WalkConfig& cfg, const LatticeConfig& y0,
                       double horizon, std::uint64_t seed) {
  require_config(cfg);
  if (y0.size() != cfg.n_particles)
    throw std::invalid_argument("configuration size mismatch");
  if (!strictly_increasing(y0))
    throw std::invalid_argument("initial configuration must be ordered");
  RandomStream rng(seed);
  JumpPath path;
  path.initial = y0;
  path.horizon = horizon;
  LatticeConfig y = y0;
  const std::size_t n = y.size();
  double t = 0.0;
  for (;;) {
    t += rng.exponential(static_cast<double>(n));
    if (t > horizon) break;
    const auto i = static_cast<std::size_t>(rng.below(n));
    // uniform01 is in (0,1], so p = 1 always goes right, p = 1/2 is a fair coin
    const int delta = rng.uniform01() <= cfg.p_right ? +1 : -1;
    const long long target = y[i] + delta;
    const bool blocked = (delta > 0) ? (i + 1 < n && y[i + 1] == target)
                                     : (i > 0 && y[i - 1] == target);
    if (blocked) continue;  // suppressed attempt burns the clock tick
    y[i] = target;
    path.events.push_back({t, i, delta});
  }
  return path;
}

JumpPath simulate_ni_walks(const LatticeConfig& y0, double horizon,
                           std::uint64_t seed) {
  if (!strictly_increasing(y0))
    throw std::invalid_argument("initial configuration must be ordered");
  RandomStream rng(seed);
  JumpPath path;
  path.initial = y0;
  path.horizon = horizon;
  LatticeConfig y = y0;
  const auto n = static_cast<double>(y.size());
  double t = 0.0;
  for (;;) {
    // the rate identity sum_i Delta(y+e_i) = N Delta(y) makes the total
    // jump rate exactly N in every chamber configuration
    t += rng.exponential(n);
    if (t > horizon) break;
    const std::vector<double> rates = vandermonde_rates(y);
    double pick = rng.uniform01() * n;
    std::size_t i = 0;
    for (; i + 1 < rates.size(); ++i) {
      pick -= rates[i];
      if (pick <= 0.0) break;
    }
    // fp tail: land on the last particle with positive rate
    while (rates[i] == 0.0 && i > 0) --i;
    y[i] += 1;
    path.events.push_back({t, i, +1});
  }
  return path;
}

std::vector<ScalingPoint> scaling_check(const WalkConfig& cfg,
                                        const LatticeConfig& y,
                                        const std::vector<double>& L_grid) {
  require_config(cfg);
  if (cfg.p_right != 1.0)
    throw std::invalid_argument("scaling table is for the p = 1 walk");
  const auto n = static_cast<double>(cfg.n_particles);
  // K_N = (Gaussian chamber integral of Delta) / (N! prod_{j<N} j!)
  //     = prod_{j=1}^{N} Gamma(1 + j/2)/Gamma(3/2) / (N! prod_{j<N} j!)
  double log_k = 0.0;
  for (std::size_t j = 1; j <= cfg.n_particles; ++j)
    log_k += std::lgamma(1.0 + static_cast<double>(j) / 2.0) -
             std::lgamma(1.5);
  // denominator N! prod_{j=1}^{N-1} j! telescopes to prod_{j=1}^{N} j!
  for (std::size_t j = 1; j <= cfg.n_particles; ++j)
    log_k -= std::lgamma(static_cast<double>(j) + 1.0);
  const double k_n = std::exp(log_k);
  std::vector<ScalingPoint> out;
  out.reserve(L_grid.size());
  for (double L : L_grid) {
    const double h = survival_h(cfg, L, y);
    const double raw = std::pow(L, n * (n - 1.0) / 4.0) * h;
    out.push_back({L, raw, raw / k_n});
  }
  return out;
}

}  // namespace myosim
