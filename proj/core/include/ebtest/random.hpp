#pragma once

#include <cstdint>
#include <random>

namespace ebtest {

/// splitmix64 finalizer applied to master ^ f(index); gives well-separated seeds
/// for consecutive substream indices.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Standard normal quantile (Wichura's AS241, about 1e-16 relative accuracy).
/// p must lie in (0, 1); returns -inf / +inf at 0 / 1.
double normal_quantile(double p) noexcept;

/// A 64-bit Mersenne Twister with explicitly specified variate transforms, so
/// streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform01() noexcept;
  /// Standard normal by inversion.
  double normal() noexcept { return normal_quantile(uniform01()); }
  /// Uniform on {0, ..., bound - 1}; bound > 0. Unbiased (rejection on the top range).
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

 private:
  std::mt19937_64 engine_;
};

}  // namespace ebtest
