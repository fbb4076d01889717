#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace phi4 {

/// Counter-seeded xoshiro256++ stream. Two streams with distinct
/// (seed, stream) pairs are statistically independent; identical pairs
/// replay bit-identical sequences. Normal variates use Box-Muller so the
/// output does not depend on the standard library implementation.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal.
  double gaussian();

  /// Standard complex normal with E|g|^2 = 1.
  std::complex<double> gaussian_complex();

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable 64-bit task seed from a root seed and a label. Adding new task
/// labels never perturbs the streams of existing ones.
std::uint64_t task_seed(std::uint64_t root_seed, std::string_view label);

}  // namespace phi4
