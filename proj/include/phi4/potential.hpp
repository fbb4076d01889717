#pragma once

#include "phi4/spectral_field.hpp"
#include "phi4/wick.hpp"

namespace phi4 {

/// The renormalized interaction potential split as in the construction:
///   v1 = 1/4 int :phi^4: - 1/2 int :phi^2: + 1/4,   v2 = -1/2 int :phi^2:.
struct PotentialValue {
  double v1 = 0.0;
  double v2 = 0.0;
  double total() const { return v1 + v2; }
};

/// Default grid for alias-free quartic quadrature of a cutoff-N field.
inline int aliasfree_grid(int cutoff) { return 4 * cutoff + 4; }

/// Evaluates the potential of phi projected to the given cutoff, with Wick
/// variance sigma of phi's reference measure. grid_size = 0 picks the
/// alias-free default; anything below 4N+1 is rejected.
PotentialValue potential_v(const SpectralField& phi, int cutoff, double sigma,
                           int grid_size = 0);

/// The quartic and cubic functionals entering the change of measure:
///   h4 = int :v^4:_w - 6 d int :v^2:_w,   h3 = int :v^3:_w - 3 d int v,
/// with the bundle taken at sigma = c_{w,N} and d = c_N - c_{w,N} (or its
/// limit value).
struct H34 {
  double h3 = 0.0;
  double h4 = 0.0;
};

H34 h3_h4(const WickBundle& b, double d);

/// Homogeneous model-space norm of the enhanced data set,
/// ||v|| + ||:v^2:||^{1/2} + ||:v^3:||^{1/3} + ||:v^4:||^{1/4}
/// in the Cminus(eta) proxy norm.
double model_norm(const WickBundle& b, double eta = 0.5);

}  // namespace phi4
