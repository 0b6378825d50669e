#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace wsnphm {

// Long-lived streams (deployment, training sets, bagging).
using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule: child = mix64(parent XOR mix64(stream)). Every
// sub-stream in the simulator is derived this way, so results never depend
// on the order in which work is scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return mix64(parent ^ mix64(stream));
}

// Cheap engine for the many short per-(node, step) streams, where seeding a
// Mersenne twister each time would dominate the run time.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Named stream identifiers so sub-seeds stay stable when code moves around.
namespace streams {
inline constexpr std::uint64_t kTraining = 0x7472616e;
inline constexpr std::uint64_t kModels = 0x6d6f646c;
inline constexpr std::uint64_t kDeploy = 0x64706c79;
inline constexpr std::uint64_t kTopology = 0x746f706f;
inline constexpr std::uint64_t kSensing = 0x73656e73;
}  // namespace streams

}  // namespace wsnphm
