#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace epps {

// SplitMix64 finalizer. Bijective on 64-bit words, used to spread
// (seed, stream) pairs over the full seed space.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// FNV-1a hash of a component name, used as a stream id so that every
// consumer of randomness gets its own stream derived from the one
// top-level seed.
constexpr std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// Seeded generator with independent streams: stream k of seed s is an
// mt19937_64 whose seed is mix64(s ^ mix64(k)). Two distinct (seed, stream)
// pairs give unrelated sequences, so concurrent paths stay reproducibly
// independent regardless of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix64(seed ^ mix64(stream))) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace epps
