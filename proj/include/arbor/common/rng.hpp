#pragma once

#include <cstdint>
#include <utility>
#include <random>
#include <string_view>

namespace arbor {

/// SplitMix64 finalizer. Used for stream derivation and counter-based draws.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seedable generator with portable conversions. The engine is mt19937_64,
/// whose raw output is fixed by the standard; uniform and normal draws are
/// implemented here so results do not depend on the standard library vendor.
///
/// Independent purposes draw from named streams (`Rng::stream(seed, "trunk")`)
/// so adding a consumer never perturbs an existing one.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  static Rng stream(std::uint64_t seed, std::string_view name) {
    return Rng(mix64(seed) ^ hash_name(name));
  }
  static Rng stream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    return Rng(mix64(mix64(seed) ^ hash_name(name)) + index);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t index(std::uint64_t n);

  /// Standard normal via Box-Muller (no cached second value).
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
};

/// Counter-based uniform in [0, 1): a pure function of (seed, counter).
/// Lets per-pixel noise be drawn in parallel without ordering effects.
inline double hash_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(mix64(mix64(seed) ^ (counter * 0xd1b54a32d192ed03ULL)) >> 11) *
         0x1.0p-53;
}

/// Counter-based standard normal built from two hashed uniforms.
double hash_normal(std::uint64_t seed, std::uint64_t counter);

/// Both Box-Muller outputs for one counter; the first equals hash_normal.
std::pair<double, double> hash_normal_pair(std::uint64_t seed, std::uint64_t counter);

}  // namespace arbor
