#pragma once
// Splittable pseudorandom streams.  Every consumer derives an independent
// stream from (master seed, stable label) so that thread scheduling cannot
// change which numbers a trial sees.  Distributions are hand-rolled on top
// of mt19937_64: the std:: distribution types are implementation-defined,
// which would break byte-identical reports across standard libraries.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <string_view>

namespace myosim {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// SplitMix64 finalizer; bijective, so distinct labels keep distinct seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return mix64(master ^ mix64(fnv1a64(label)));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t raw_seed) : gen_(raw_seed) {}
  RandomStream(std::uint64_t master, std::string_view label)
      : gen_(derive_seed(master, label)) {}

  std::uint64_t raw() { return gen_(); }

  // uniform on (0,1]; never 0, so log(u) is always finite
  double uniform01() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double t = 2.0 * 3.14159265358979323846 * uniform01();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // uniform integer in [0, n), rejection keeps it unbiased
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// "metastability/trial/0041" style; zero-padded so logs sort lexically.
inline std::string trial_label(std::string_view prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/trial/%04zu", index);
  return std::string(prefix) + buf;
}

}  // namespace myosim
