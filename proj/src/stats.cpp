#include "phi4/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phi4 {

double mean_of(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean_of: empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(n - 1);
}

double ess_autocorr(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double m = mean_of(x);
  const double c0 = [&] {
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n);
  }();
  if (c0 == 0.0) return static_cast<double>(n);

  auto gamma = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - m) * (x[i + lag] - m);
    return s / static_cast<double>(n);
  };

  // Geyer: accumulate rho(2k-1) + rho(2k) while the pair sums stay positive.
  double tau = 1.0;
  const std::size_t max_lag = n / 2;
  for (std::size_t k = 1; 2 * k <= max_lag; ++k) {
    const double pair = (gamma(2 * k - 1) + gamma(2 * k)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  if (tau < 1.0) tau = 1.0;  // keep ess <= n for anticorrelated series
  return static_cast<double>(n) / tau;
}

double batch_means_se(const std::vector<double>& x, std::size_t n_batches) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  n_batches = std::min(n_batches, n);
  if (n_batches < 2) n_batches = 2;
  const std::size_t len = n / n_batches;
  if (len == 0) return std::sqrt(variance_of(x) / static_cast<double>(n));
  std::vector<double> batch(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
    batch[b] = s / static_cast<double>(len);
  }
  return std::sqrt(variance_of(batch) / static_cast<double>(n_batches));
}

EstimateWithError diagnose_series(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("diagnose_series: empty batch");
  EstimateWithError e;
  e.value = mean_of(x);
  if (variance_of(x) == 0.0) {
    e.std_error = 0.0;
    e.ess = static_cast<double>(x.size());
    e.low_ess = true;  // constant series carries no usable error information
    return e;
  }
  e.ess = ess_autocorr(x);
  e.std_error = batch_means_se(x);
  e.low_ess = e.ess < 10.0;
  return e;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need two equal-length series");
  const double mx = mean_of(x), my = mean_of(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  if (den == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return num / den;
}

}  // namespace phi4
