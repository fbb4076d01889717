#include "phi4/determinant.hpp"

#include <cmath>
#include <stdexcept>

#include "phi4/spectral_field.hpp"
#include "phi4/wick.hpp"

namespace phi4 {

double DeterminantResult::theta() const { return std::exp(log_theta); }

namespace {

struct KahanAcc {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Closed-form cell-covering bound: for decreasing f,
//   sum_{|n|>N} f(|n|) <= 2 pi int_{N-sqrt2}^inf f(u) (u + sqrt2/2) du.
// With f(u) = (1+u^2)^{-2} the integral evaluates elementarily.
double quad_tail_formula(int n) {
  const double m = static_cast<double>(n) - std::sqrt(2.0);
  // valid once m > 0; callers route small N elsewhere
  const double one_m2 = 1.0 + m * m;
  return 2.0 * M_PI * (0.5 / one_m2 + std::sqrt(2.0) / (4.0 * m * one_m2));
}

}  // namespace

double quad_tail_bound(int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("quad_tail_bound: cutoff must be >= 0");
  constexpr int kSafe = 64;
  if (cutoff >= kSafe) return quad_tail_formula(cutoff);
  // exact partial sum over the annulus cutoff < |n| <= kSafe, then the formula
  KahanAcc acc;
  for (int n1 = -kSafe; n1 <= kSafe; ++n1) {
    for (int n2 = -kSafe; n2 <= kSafe; ++n2) {
      if (!in_ball(n1, n2, kSafe) || in_ball(n1, n2, cutoff)) continue;
      const double k2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
      acc.add(1.0 / ((1.0 + k2) * (1.0 + k2)));
    }
  }
  return acc.sum + quad_tail_formula(kSafe);
}

double log_fredholm(int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("log_fredholm: cutoff must be >= 0");
  KahanAcc acc;
  for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
    for (int n2 = -cutoff; n2 <= cutoff; ++n2) {
      if (!in_ball(n1, n2, cutoff)) continue;
      const double lambda = 1.0 + static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
      acc.add(std::log1p(1.0 / lambda));
    }
  }
  return acc.sum;
}

DeterminantResult theta_re(int cutoff, double eps) {
  if (eps < 0.0) throw std::invalid_argument("theta_re: eps must be >= 0");
  const WickConstants wc = wick_constants(cutoff);
  DeterminantResult r;
  r.cutoff = cutoff;
  r.eps = eps;
  r.log_fredholm = log_fredholm(cutoff);
  r.log_theta = 0.5 * wc.c_n - 0.5 * r.log_fredholm - 0.75 * eps * wc.d_n * wc.d_n;
  // Determinant tail: 0 <= sum_{|n|>N} (1/lambda - log(1+1/lambda))/2
  //                   <= sum lambda^{-2} / 4  (x - log(1+x) <= x^2/2).
  // d_N tail: |d_inf^2 - d_N^2| <= (2 d_N + t) t with t bounding d_inf - d_N.
  const double t_quad = quad_tail_bound(cutoff);
  r.tail_bound = 0.25 * t_quad + 0.75 * eps * (2.0 * wc.d_n + t_quad) * t_quad;
  return r;
}

DeterminantResult theta_re_limit(double eps) { return theta_re(kLimitCutoff, eps); }

WeightTable weights_b(double theta_plus, double theta_minus) {
  if (!(theta_plus > 0.0) || !(theta_minus > 0.0))
    throw std::invalid_argument("weights_b: determinants must be positive");
  const double z = theta_plus + theta_minus;
  return {theta_plus / z, theta_minus / z};
}

}  // namespace phi4
