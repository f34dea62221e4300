#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gradeloc {

// splitmix64 finaliser; used only to spread seeds, not as a generator.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable sub-seed for a named lane: mix64(seed ^ fnv1a(lane)).
// Lane names used by the engine: "phase", "walk", "radio/<node>",
// "tdoa/<label>", "sense/<label>".
constexpr std::uint64_t lane_seed(std::uint64_t seed, std::string_view lane) {
  return mix64(seed ^ fnv1a(lane));
}

// Seed of replicate k. Replicate 0 is the scenario seed itself so a single
// replicate reproduces a plain run.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t k) {
  return k == 0 ? master : mix64(master ^ mix64(k * 0xd1b54a32d192ed03ULL));
}

// mt19937_64 with portable uniform draws (the std distributions are not
// specified bit-for-bit across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view lane) : engine_(lane_seed(seed, lane)) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool coin() { return (engine_() >> 63) != 0; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gradeloc
