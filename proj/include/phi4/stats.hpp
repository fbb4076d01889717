#pragma once

#include <cstddef>
#include <vector>

namespace phi4 {

/// Point estimate with its Monte Carlo error and effective sample size.
struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  bool low_ess = false;
};

double mean_of(const std::vector<double>& x);
double variance_of(const std::vector<double>& x);  // unbiased, 0 for n < 2

/// Effective sample size from the integrated autocorrelation time, using
/// Geyer's initial positive sequence on lag-pair sums.
double ess_autocorr(const std::vector<double>& x);

/// Standard error of the mean by non-overlapping batch means.
double batch_means_se(const std::vector<double>& x, std::size_t n_batches = 32);

/// Mean, batch-means standard error, autocorrelation ESS; flags ESS < 10 and
/// returns std_error 0 for constant series.
EstimateWithError diagnose_series(const std::vector<double>& x);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace phi4
