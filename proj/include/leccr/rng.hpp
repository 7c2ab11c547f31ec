#pragma once

#include <cmath>
#include <cstdint>

namespace leccr {

// Self-contained splitmix64 generator. Keeps every seeded artifact
// bit-reproducible independent of the standard library's distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, one value per call (the pair's second half is discarded so
  // the stream stays insensitive to call grouping).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Derive an independent stream; used to decouple substreams from call order.
  Rng fork(std::uint64_t tag) {
    Rng child(state_ ^ (0x632be59bd9b4e019ull * (tag + 1)));
    child.next_u64();
    return child;
  }

private:
  std::uint64_t state_;
};

}  // namespace leccr
