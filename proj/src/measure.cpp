#include "phi4/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

ReferenceMeasure ReferenceMeasure::mu_eps(double eps) {
  if (eps <= 0.0) throw std::invalid_argument("mu_eps: eps must be > 0");
  return {Kind::MuEps, eps, +1};
}

ReferenceMeasure ReferenceMeasure::mu_w(int well) {
  if (well != 1 && well != -1) throw std::invalid_argument("mu_w: well must be +1 or -1");
  return {Kind::MuW, 1.0, well};
}

double ReferenceMeasure::eigenvalue(int n1, int n2) const {
  const double k2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
  switch (kind) {
    case Kind::Mu:
      return 1.0 + k2;
    case Kind::MuEps:
      return (1.0 + k2) / eps;
    case Kind::MuW:
      return 2.0 + k2;
  }
  return 1.0 + k2;
}

SpectralField sample_gaussian(const ReferenceMeasure& measure, int cutoff, RngStream& rng) {
  SpectralField f(cutoff);
  for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
    for (int n2 = -cutoff; n2 <= cutoff; ++n2) {
      if (!in_ball(n1, n2, cutoff)) continue;
      const bool zero_mode = (n1 == 0 && n2 == 0);
      const bool representative = (n1 > 0) || (n1 == 0 && n2 > 0);
      if (!zero_mode && !representative) continue;
      const double inv_sqrt_lambda = 1.0 / std::sqrt(measure.eigenvalue(n1, n2));
      if (zero_mode) {
        f.set_coeff(0, 0, {rng.gaussian() * inv_sqrt_lambda, 0.0});
      } else {
        f.set_pair(n1, n2, rng.gaussian_complex() * inv_sqrt_lambda);
      }
    }
  }
  return f;
}

}  // namespace phi4
