#include "phi4/rng.hpp"

#include <cmath>

namespace phi4 {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  // splitmix over the pair; mixing the stream id in twice keeps
  // (seed, stream) and (seed', stream') collisions out of reach.
  std::uint64_t x = seed;
  x ^= 0x6a09e667f3bcc909ULL;
  std::uint64_t a = splitmix64(x);
  x ^= stream * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(x);
  std::uint64_t c = splitmix64(x);
  std::uint64_t d = splitmix64(x);
  s_ = {a, b, c, d};
  if (a == 0 && b == 0 && c == 0 && d == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0,1] so the log is finite
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::complex<double> RngStream::gaussian_complex() {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  double re = gaussian();
  double im = gaussian();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

std::uint64_t task_seed(std::uint64_t root_seed, std::string_view label) {
  // FNV-1a over the label, then splitmix-finalized together with the root.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t x = root_seed ^ rotl(h, 32);
  std::uint64_t out = splitmix64(x);
  return out;
}

}  // namespace phi4
