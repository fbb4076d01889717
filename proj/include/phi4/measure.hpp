#pragma once

#include "phi4/rng.hpp"
#include "phi4/spectral_field.hpp"

namespace phi4 {

/// The three Gaussian reference measures on cutoff fields. Mode n carries
/// eigenvalue lambda_n and variance 1/lambda_n:
///   mu      : lambda_n = 1 + |n|^2            (massive free field)
///   mu_eps  : lambda_n = (1 + |n|^2) / eps    (temperature-scaled free field)
///   mu_w    : lambda_n = 2 + |n|^2            (Hessian Gaussian at a well,
///                                              Hessian of the double well is 2 at w = +-1)
struct ReferenceMeasure {
  enum class Kind { Mu, MuEps, MuW };

  Kind kind = Kind::Mu;
  double eps = 1.0;
  int well = +1;

  static ReferenceMeasure mu() { return {Kind::Mu, 1.0, +1}; }
  static ReferenceMeasure mu_eps(double eps);
  static ReferenceMeasure mu_w(int well);

  double eigenvalue(int n1, int n2) const;
};

/// Draws a Hermitian-symmetric field with independent modes,
/// coeff(n) = g_n / sqrt(lambda_n), zero mode real. The draw order over modes
/// is canonical so coupled streams stay coupled across measures.
SpectralField sample_gaussian(const ReferenceMeasure& measure, int cutoff, RngStream& rng);

}  // namespace phi4
