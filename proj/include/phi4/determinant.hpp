#pragma once

namespace phi4 {

/// Carleman-Fredholm data at cutoff N. All arithmetic stays in log space:
///   log_fredholm = sum_{|n|<=N} log(1 + 1/lambda_n),   lambda_n = 1 + |n|^2,
///   log_theta    = c_N/2 - log_fredholm/2 - (3 eps/4) d_N^2,
/// and tail_bound certifies |log theta_inf - log theta_N|.
struct DeterminantResult {
  int cutoff = 0;
  double log_fredholm = 0.0;
  double log_theta = 0.0;
  double tail_bound = 0.0;
  double eps = 0.0;

  double theta() const;
};

double log_fredholm(int cutoff);

DeterminantResult theta_re(int cutoff, double eps);

/// theta_re at the convergence cutoff (N = 2000); the remaining tail is below
/// 1e-6 for eps in [0, 1].
DeterminantResult theta_re_limit(double eps);

/// Certified upper bound on sum_{|n| > N} (1 + |n|^2)^{-2}, which also bounds
/// sum_{|n| > N} 1/((1+|n|^2)(2+|n|^2)). Elementary cell-covering integral
/// estimate, monotone in N.
double quad_tail_bound(int cutoff);

/// LLN well weights b(w) = theta(w) / (theta(+1) + theta(-1)).
struct WeightTable {
  double b_plus = 0.5;
  double b_minus = 0.5;
};

WeightTable weights_b(double theta_plus, double theta_minus);

}  // namespace phi4
