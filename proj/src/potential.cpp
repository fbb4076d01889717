#include "phi4/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

PotentialValue potential_v(const SpectralField& phi, int cutoff, double sigma, int grid_size) {
  const SpectralField phi_n = project(phi, cutoff);
  const int n = phi_n.cutoff();
  const int m = grid_size == 0 ? aliasfree_grid(n) : grid_size;
  if (m < 4 * n + 1)
    throw std::invalid_argument("potential_v: grid too small for alias-free quartic quadrature");
  WickBundle b = wick_powers(to_grid(phi_n, m), sigma);
  const double i2 = b.p2.mean();
  const double i4 = b.p4.mean();
  PotentialValue out;
  out.v1 = 0.25 * i4 - 0.5 * i2 + 0.25;
  out.v2 = -0.5 * i2;
  return out;
}

H34 h3_h4(const WickBundle& b, double d) {
  H34 out;
  out.h4 = b.p4.mean() - 6.0 * d * b.p2.mean();
  out.h3 = b.p3.mean() - 3.0 * d * b.v.mean();
  return out;
}

double model_norm(const WickBundle& b, double eta) {
  const int m = b.grid_size();
  if (m == 1) {
    // constant field: every component sits in shell 0
    return std::abs(b.v.at(0, 0)) + std::sqrt(std::abs(b.p2.at(0, 0))) +
           std::cbrt(std::abs(b.p3.at(0, 0))) + std::pow(std::abs(b.p4.at(0, 0)), 0.25);
  }
  // full representable cutoff of the grid
  const int n_full = m / 2 - 1;
  auto shell_norm = [&](const GridField& g) {
    return field_norm(to_spectral(g, n_full), NormKind::Cminus, eta);
  };
  return shell_norm(b.v) + std::sqrt(shell_norm(b.p2)) + std::cbrt(shell_norm(b.p3)) +
         std::pow(shell_norm(b.p4), 0.25);
}

}  // namespace phi4
