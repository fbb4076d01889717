#pragma once

#include <cstdint>
#include <vector>

#include "phi4/determinant.hpp"
#include "phi4/observable.hpp"
#include "phi4/sampler.hpp"
#include "phi4/spectral_field.hpp"
#include "phi4/stats.hpp"

namespace phi4 {

/// Truncated series in t = sqrt(eps) of the density G(w, t v) at a fixed
/// sample v; q[j] is the t^j coefficient, i.e. Q_j(w, v)/j!.
struct FormalSeries {
  std::vector<double> q;

  int truncation() const { return static_cast<int>(q.size()) - 1; }
  double eval(double t) const;
};

/// Density of the shifted measure against mu_w:
///   G(w, sqrt(eps) v) = F(w + sqrt(eps) v) exp{-(eps/4) H4 - sqrt(eps) w H3}
/// with (H3, H4) evaluated at sigma = c_{w,N} and d = c_N - c_{w,N}
/// (cutoff mode) or its limit value (limit mode). exponent_on = false drops
/// the exponential factor (used by the closed-form toy checks).
double density_g(const Observable& f, int w, const SpectralField& v, double eps, int cutoff,
                 bool limit_d = false, bool exponent_on = true);

/// Exact truncated-series expansion of G(w, t v) in t up to the given order:
/// F(w + t v) is a finite polynomial in t, multiplied by the truncated
/// exponential of -t w H3 - (t^2/4) H4.
FormalSeries taylor_q(const Observable& f, int w, const SpectralField& v, int order, int cutoff,
                      bool limit_d = false, bool exponent_on = true);

/// Monte Carlo coefficient table a_j = sum_w theta(w) E_{mu_w}[q_j(w, .)],
/// with one common sample set for all j and both wells.
struct CoefficientTable {
  int order = 0;
  std::vector<double> a, a_se;
  std::vector<double> mean_plus, se_plus, mean_minus, se_minus;
  double theta_plus = 1.0, theta_minus = 1.0;
  long n_mc = 0;
  bool low_ess = false;
};

CoefficientTable coefficients_a(const Observable& f, int order, int cutoff, long n_mc,
                                double theta_plus, double theta_minus, std::uint64_t seed,
                                bool limit_d = false, bool exponent_on = true);

/// Remainder study: R(eps) = |I(eps) - sum_{j<=k} a_j eps^{j/2}| over a grid,
/// with I from the reweighting sampler (or, in toy mode, the plain Gaussian
/// well average with unit weights and no exponent).
struct ExpansionRow {
  double eps = 0.0;
  double integral = 0.0;
  double integral_se = 0.0;
  double expansion = 0.0;
  double remainder = 0.0;
};

struct ExpansionReport {
  CoefficientTable coeffs;
  std::vector<ExpansionRow> rows;
  double slope = 0.0;   // of log R against log eps
  bool inconclusive = false;  // MC error not below the remainder everywhere
};

ExpansionReport verify_expansion(const Observable& f, int order, const std::vector<double>& eps_grid,
                                 int cutoff, long n_mc, long n_reweight, std::uint64_t seed,
                                 bool toy_mode = false);

/// LLN / CLT experiment over Langevin chains.
struct LlnCltConfig {
  std::vector<double> eps_grid{0.4, 0.2, 0.1, 0.05};
  int cutoff = 8;
  int n_chains = 20;
  // the explicit Wick cubic needs dt well below 2/(3(1 + 3 c_N)); 0.01 is
  // safe across the default grid at N = 8
  double dt = 0.01;
  long n_steps = 60000;
  long n_burnin = 10000;
  long thin = 10;
  std::uint64_t seed = 1;
  double delta_conc = 0.3;      // concentration indicator radius
  double delta_classify = 0.6;  // projection radius for occupancy / CLT
  double eta = 0.5;
  std::vector<Frequency> clt_modes{{0, 0}, {1, 0}, {1, 1}};
};

struct LlnCltPerEps {
  double eps = 0.0;
  double occ_plus = 0.0, occ_minus = 0.0, occ_se = 0.0;
  double classified_frac = 0.0;
  bool occupancy_flagged = false;  // a well saw fewer than 10 samples
  double f_mean = 0.0, f_se = 0.0;
  double conc_mass = 0.0, conc_se = 0.0;
  long n_kept = 0;
};

struct CltModeRow {
  int n1 = 0, n2 = 0;
  double var_emp = 0.0;
  double var_target = 0.0;
  long n_samples = 0;
};

struct LlnCltReport {
  std::vector<LlnCltPerEps> per_eps;
  std::vector<CltModeRow> clt;  // at the smallest eps of the grid
  WeightTable weights;
  double lln_target = 0.0;  // sum_w b(w) F(w)
};

LlnCltReport lln_clt_experiment(const Observable& f, const LlnCltConfig& cfg);

}  // namespace phi4
