#pragma once

#include <cstdint>
#include <utility>

#include "et14/linalg.hpp"
#include "et14/state.hpp"

namespace et14 {

/// Deterministic generator with a stdlib-independent stream (splitmix64),
/// so identical seeds replay bit-identically on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  static std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
    Rng mix(base ^ (0xD1B54A32D192ED03ull + index * 0x8CB92BA72F3D8DD7ull));
    return mix.next_u64();
  }

 private:
  std::uint64_t state_;
};

struct SamplerConfig {
  std::pair<double, double> lambda_range{-1.0, 1.0};
  std::pair<double, double> lambda_i_range{-1.0, 1.0};
  std::pair<double, double> lambda_ij_range{-1.0, 1.0};
  std::pair<double, double> lambda_ill_range{-1.0, 1.0};
  std::pair<double, double> lambda_ppll_range{-1.0, 1.0};
  bool require_x1_nonzero = false;
  double eps1 = 1e-6;
  bool require_independence = false;
  double independence_tol = 1e-10;
  int max_retries = 200;
};

/// Deterministic in (config, seed). Throws RetriesExhausted when the
/// independence conditions cannot be met within the retry cap.
MultiplierState random_state(const SamplerConfig& config, std::uint64_t seed);

/// Uniform random rotation (unit quaternion construction).
Mat3d random_rotation(std::uint64_t seed);

}  // namespace et14
