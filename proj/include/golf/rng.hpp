#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace golf::rng {

// Stateless seed derivation. Every random decision in the trainer draws from
// an engine seeded by mix(master_seed, stream, indices...), so adding or
// removing a consumer never shifts any other stream. This is what makes
// checkpoint resume and cross-algorithm step comparisons exact.
enum class Stream : uint64_t {
  param_init = 1,
  instance = 2,
  rollout = 3,
  aggregate = 4,
  refine_rollout = 5,
  inject = 6,
  holdout_instance = 7,
  holdout_rollout = 8,
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
uint64_t mix(uint64_t seed, uint64_t head, Rest... rest) {
  return mix(splitmix64(seed ^ splitmix64(head + 0x632be59bd9b4e019ULL)), rest...);
}

template <typename... Rest>
uint64_t mix(uint64_t seed, Stream stream, Rest... rest) {
  return mix(seed, static_cast<uint64_t>(stream), rest...);
}

// Thin engine wrapper. Draw primitives are hand-rolled rather than going
// through std distributions so a given seed always yields the same values.
class Engine {
 public:
  explicit Engine(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0.
  uint64_t uniform_int(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(gen_()) * n) >> 64);
  }

  // Index drawn from an unnormalized weight vector by CDF walk.
  size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace golf::rng
