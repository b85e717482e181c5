#pragma once

#include <cmath>
#include <cstdint>

namespace sgne {

// Counter-based splittable RNG. Every stream is identified by a
// (master seed, agent, iteration, nonce) tuple, so samples drawn for
// distinct agents or iterations never overlap and a run is reproducible
// regardless of how work is scheduled across threads.
//
// The generator is SplitMix64; normal variates come from Box-Muller with
// the spare value cached, which keeps the draw loop free of libstdc++
// distribution internals (their output is implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Derive the stream for one (agent, iteration) pair. The nonce
  // separates multiple oracle calls within the same iteration
  // (extragradient-type methods evaluate twice).
  static RngStream derive(std::uint64_t master, std::uint64_t agent,
                          std::uint64_t iteration, std::uint64_t nonce = 0) {
    std::uint64_t key = mix(master);
    key = mix(key ^ (0x1000193ULL * (agent + 1)));
    key = mix(key ^ (0x100000001b3ULL * (iteration + 1)));
    key = mix(key ^ (nonce + 1));
    return RngStream(key);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Standard normal.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sgne
