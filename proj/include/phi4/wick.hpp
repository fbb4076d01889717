#pragma once

#include "phi4/spectral_field.hpp"

namespace phi4 {

/// Hermite polynomial H_k(x; sigma) in the variance-parameter convention:
/// H0 = 1, H1 = x, H2 = x^2 - s, H3 = x^3 - 3sx, H4 = x^4 - 6sx^2 + 3s^2.
/// Degrees above 4 are unsupported.
double hermite(int k, double x, double sigma);

/// Tadpole constants at cutoff N over the Euclidean ball:
///   c_n  = sum 1/(1+|n|^2),   c_wn = sum 1/(2+|n|^2),   d_n = c_n - c_wn.
struct WickConstants {
  int cutoff = 0;
  double c_n = 0.0;
  double c_wn = 0.0;
  double d_n = 0.0;
};

WickConstants wick_constants(int cutoff);

/// d_n at the convergence cutoff used for "limit mode"; the tail beyond it is
/// certified below 1e-6.
inline constexpr int kLimitCutoff = 2000;
double d_limit();

/// Pointwise Wick powers of a grid field: p_k = H_k(v; sigma).
struct WickBundle {
  GridField v, p2, p3, p4;
  double sigma = 0.0;

  int grid_size() const { return v.size(); }
};

WickBundle wick_powers(const GridField& v, double sigma);

/// Reference change sigma -> sigma - d through the Hermite shift identities;
/// equals wick_powers(v, sigma - d) exactly. Rejects sigma - d < 0.
WickBundle convert_reference(const WickBundle& b, double d);

}  // namespace phi4
