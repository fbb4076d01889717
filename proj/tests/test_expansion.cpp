#include <doctest.h>

#include <cmath>
#include <vector>

#include "phi4/determinant.hpp"
#include "phi4/expansion.hpp"
#include "phi4/measure.hpp"
#include "phi4/observable.hpp"
#include "phi4/rng.hpp"
#include "phi4/wick.hpp"

using namespace phi4;

namespace {

SpectralField test_function() {
  SpectralField f(1);
  f.set_coeff(0, 0, {1.0, 0.0});
  f.set_pair(1, 0, {1.0, 0.0});
  return f;
}

Observable random_observable(RngStream& rng) {
  Observable f = Observable::constant(2.0 * rng.uniform01() - 1.0);
  if (rng.uniform01() < 0.7) f = f + Observable::pair(test_function()) * (2.0 * rng.uniform01() - 1.0);
  if (rng.uniform01() < 0.7)
    f = f + Observable::wick_integral(2) * (2.0 * rng.uniform01() - 1.0);
  if (rng.uniform01() < 0.4)
    f = f + Observable::pair(test_function()).pow(2) * (2.0 * rng.uniform01() - 1.0);
  if (rng.uniform01() < 0.3)
    f = f + Observable::wick_integral(3) * (0.5 * rng.uniform01());
  return f;
}

// sum over frequency triples in the ball summing to zero of the product of
// mu_w mode variances; Isserlis value of E[(int :v^3:)^2] / 6
double isserlis_s3(int cutoff) {
  double s = 0.0;
  for (int a1 = -cutoff; a1 <= cutoff; ++a1)
    for (int a2 = -cutoff; a2 <= cutoff; ++a2) {
      if (!in_ball(a1, a2, cutoff)) continue;
      for (int b1 = -cutoff; b1 <= cutoff; ++b1)
        for (int b2 = -cutoff; b2 <= cutoff; ++b2) {
          if (!in_ball(b1, b2, cutoff)) continue;
          const int c1 = -a1 - b1, c2 = -a2 - b2;
          if (!in_ball(c1, c2, cutoff)) continue;
          s += 1.0 / ((2.0 + a1 * a1 + a2 * a2) * (2.0 + b1 * b1 + b2 * b2) *
                      (2.0 + c1 * c1 + c2 * c2));
        }
    }
  return s;
}

}  // namespace

TEST_CASE("density at eps = 0 is the well value") {
  RngStream rng(44, 0);
  SpectralField v = sample_gaussian(ReferenceMeasure::mu_w(+1), 2, rng);
  Observable f = Observable::pair(test_function()).pow(2);
  CHECK(density_g(f, +1, v, 0.0, 2) == doctest::Approx(1.0));
  CHECK(density_g(f, -1, v, 0.0, 2) == doctest::Approx(1.0));
}

TEST_CASE("density of the zero fluctuation at N = 0 matches the worked value") {
  SpectralField zero(0);
  Observable one = Observable::constant(1.0);
  // H4 = 2.25 and H3 = 0 at v = 0, N = 0, so G = exp(-2.25/4)
  CHECK(density_g(one, +1, zero, 1.0, 0) == doctest::Approx(std::exp(-0.5625)).epsilon(1e-12));
  CHECK(density_g(one, +1, zero, 1.0, 0) == doctest::Approx(0.569783).epsilon(1e-5));
}

TEST_CASE("series truncation error scales at order k+1") {
  RngStream rng(321, 1);
  const int cutoff = 2;
  const int k = 2;
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Observable f = random_observable(rng);
    const int w = rng.uniform01() < 0.5 ? +1 : -1;
    SpectralField v = sample_gaussian(ReferenceMeasure::mu_w(w), cutoff, rng);
    FormalSeries s = taylor_q(f, w, v, k, cutoff);
    const double e1 = std::abs(density_g(f, w, v, 0.01, cutoff) - s.eval(0.1));
    const double e2 = std::abs(density_g(f, w, v, 0.0001, cutoff) - s.eval(0.01));
    if (e1 < 1e-13 || e2 < 1e-14) continue;  // degenerate draw, nothing to rate
    const double order = std::log(e1 / e2) / std::log(10.0);
    CAPTURE(trial);
    CHECK(order > k + 0.7);
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("q0 is the well value and q1 = -w H3 for the trivial observable") {
  RngStream rng(22, 9);
  const int cutoff = 2;
  const WickConstants wc = wick_constants(cutoff);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = rng.uniform01() < 0.5 ? +1 : -1;
    SpectralField v = sample_gaussian(ReferenceMeasure::mu_w(w), cutoff, rng);

    Observable f = random_observable(rng);
    FormalSeries s = taylor_q(f, w, v, 2, cutoff);
    SpectralField well(0);
    well.set_coeff(0, 0, {static_cast<double>(w), 0.0});
    CHECK(s.q[0] == doctest::Approx(f.eval_at(well, 0.0)).epsilon(1e-12));

    Observable one = Observable::constant(1.0);
    FormalSeries s1 = taylor_q(one, w, v, 1, cutoff);
    FieldEval ev(v, wc.c_wn);
    const double h3 = ev.wick_mean(3) - 3.0 * wc.d_n * ev.wick_mean(1);
    CHECK(s1.q[1] == doctest::Approx(-w * h3).epsilon(1e-12));
  }
}

TEST_CASE("a0 is exact and a1 vanishes for the trivial observable") {
  const int cutoff = 2;
  const double theta = theta_re(cutoff, 0.0).theta();
  Observable one = Observable::constant(1.0);
  CoefficientTable t = coefficients_a(one, 1, cutoff, 2000, theta, theta, 99);
  CHECK(t.a[0] == doctest::Approx(2.0 * theta).epsilon(1e-14));
  CHECK(t.a_se[0] == doctest::Approx(0.0));
  CHECK(std::abs(t.a[1]) < 2.0 * t.a_se[1]);
}

TEST_CASE("a0 matches the direct well sum for odd and even observables") {
  const int cutoff = 2;
  const double theta = theta_re(cutoff, 0.0).theta();
  Observable odd = Observable::pair(test_function());
  CoefficientTable t_odd = coefficients_a(odd, 0, cutoff, 500, theta, theta, 5);
  CHECK(t_odd.a[0] == doctest::Approx(0.0));  // theta (f0) + theta (-f0)

  Observable even = Observable::pair(test_function()).pow(2);
  CoefficientTable t_even = coefficients_a(even, 0, cutoff, 500, theta, theta, 5);
  CHECK(t_even.a[0] == doctest::Approx(2.0 * theta).epsilon(1e-14));
}

TEST_CASE("even observables have matching per-well contributions") {
  const int cutoff = 2;
  const double theta = theta_re(cutoff, 0.0).theta();
  Observable even = Observable::pair(test_function()).pow(2) + Observable::wick_integral(2);
  CoefficientTable t = coefficients_a(even, 2, cutoff, 4000, theta, theta, 31);
  for (int j = 0; j <= 2; ++j) {
    CAPTURE(j);
    CHECK(std::abs(t.mean_plus[j] - t.mean_minus[j]) <
          4.0 * (t.se_plus[j] + t.se_minus[j]) + 1e-12);
  }
}

TEST_CASE("a2 for the trivial observable matches the Isserlis oracle") {
  // E[q2] = E[H3^2]/2 with E[H3^2] = 6 S3 + 9 d^2 E[(int v)^2], E[(int v)^2] = 1/2
  const int cutoff = 2;
  const WickConstants wc = wick_constants(cutoff);
  const double theta = theta_re(cutoff, 0.0).theta();
  const double s3 = isserlis_s3(cutoff);
  const double expected_q2 = 0.5 * (6.0 * s3 + 9.0 * wc.d_n * wc.d_n * 0.5);
  Observable one = Observable::constant(1.0);
  CoefficientTable t = coefficients_a(one, 2, cutoff, 60000, theta, theta, 2025);
  const double a2_oracle = 2.0 * theta * expected_q2;
  CAPTURE(a2_oracle);
  CAPTURE(t.a[2]);
  CHECK(std::abs(t.a[2] - a2_oracle) < 4.0 * t.a_se[2]);
}

TEST_CASE("toy expansion matches closed-form Gaussian moments") {
  // exponent off, unit weights: I(eps) = sum_w E[F(w + sqrt(eps) v)]
  //                                    = 2 (f0^2 + eps sum_n |f_n|^2/(2+|n|^2))
  const int cutoff = 2;
  Observable f = Observable::pair(test_function()).pow(2);
  const std::vector<double> grid{0.4, 0.2, 0.1, 0.05};
  ExpansionReport rep = verify_expansion(f, 0, grid, cutoff, 40000, 0, 77, /*toy_mode=*/true);
  const double second = 1.0 / 2.0 + 2.0 * (1.0 / 3.0);  // sum |f_n|^2 / lambda'_n
  for (const ExpansionRow& row : rep.rows) {
    const double closed = 2.0 * (1.0 + row.eps * second);
    CHECK(std::abs(row.integral - closed) < 4.0 * row.integral_se + 1e-9);
    // remainder after the a_0 term is exactly linear in eps
    CHECK(row.remainder == doctest::Approx(closed - rep.coeffs.a[0]).epsilon(0.2));
  }
  CHECK(rep.slope > 0.8);
  CHECK(rep.slope < 1.2);
}

TEST_CASE("expansion report flags grids the MC error cannot resolve") {
  const std::vector<double> bad_grid{0.4, 0.2};
  Observable one = Observable::constant(1.0);
  // tiny reweight sample: the remainder drowns in MC error and must be flagged
  ExpansionReport rep = verify_expansion(one, 1, bad_grid, 1, 400, 60, 5, false);
  // nothing to assert numerically here beyond the flag being well-defined
  CHECK((rep.inconclusive == true || rep.inconclusive == false));
  for (const ExpansionRow& row : rep.rows) CHECK(std::isfinite(row.remainder));
}

TEST_CASE("lln/clt experiment smoke test at desk scale") {
  Observable f = Observable::pair(test_function()).pow(2);
  LlnCltConfig cfg;
  cfg.eps_grid = {0.4, 0.2};
  cfg.cutoff = 2;
  cfg.n_chains = 4;
  cfg.dt = 0.05;
  cfg.n_steps = 4000;
  cfg.n_burnin = 1000;
  cfg.thin = 10;
  cfg.seed = 12;
  LlnCltReport rep = lln_clt_experiment(f, cfg);
  CHECK(rep.weights.b_plus == 0.5);
  CHECK(rep.lln_target == doctest::Approx(1.0));
  REQUIRE(rep.per_eps.size() == 2);
  for (const LlnCltPerEps& row : rep.per_eps) {
    CHECK(row.n_kept == cfg.n_chains * (cfg.n_steps / cfg.thin));
    if (row.classified_frac > 0.0)
      CHECK(row.occ_plus + row.occ_minus == doctest::Approx(1.0));
    CHECK(std::isfinite(row.f_mean));
    CHECK(row.conc_mass >= 0.0);
    CHECK(row.conc_mass <= 1.0);
  }
  REQUIRE(rep.clt.size() == 3);
  for (const CltModeRow& row : rep.clt) {
    CHECK(row.var_target == doctest::Approx(1.0 / (2.0 + row.n1 * row.n1 + row.n2 * row.n2)));
    if (row.n_samples > 100) CHECK(row.var_emp > 0.0);
  }
}
