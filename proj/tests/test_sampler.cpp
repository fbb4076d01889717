#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "phi4/measure.hpp"
#include "phi4/observable.hpp"
#include "phi4/rng.hpp"
#include "phi4/sampler.hpp"
#include "phi4/stats.hpp"
#include "phi4/wick.hpp"

using namespace phi4;

namespace {

SpectralField test_function() {
  SpectralField f(1);
  f.set_coeff(0, 0, {1.0, 0.0});
  f.set_pair(1, 0, {1.0, 0.0});
  return f;
}

// Dense Gauss-Hermite quadrature over the 5 real coordinates of the cutoff-1
// mode space (zero mode a, complex modes c1 at (1,0) and c2 at (0,1)), with
// closed-form mode sums for the integrals of psi^2, psi^4. Independent of the
// grid/FFT evaluation path.
double quadrature_partition_cutoff1(double eps) {
  constexpr std::array<double, 16> node = {
      -4.68873893930581875e+00, -3.86944790486012291e+00, -3.17699916197995602e+00,
      -2.54620215784748138e+00, -1.95178799091625388e+00, -1.38025853919888086e+00,
      -8.22951449144655900e-01, -2.73481046138152439e-01, 2.73481046138152439e-01,
      8.22951449144655900e-01,  1.38025853919888086e+00,  1.95178799091625388e+00,
      2.54620215784748138e+00,  3.17699916197995602e+00,  3.86944790486012291e+00,
      4.68873893930581875e+00};
  constexpr std::array<double, 16> weight = {
      2.65480747401116728e-10, 2.32098084486520325e-07, 2.71186009253788920e-05,
      9.32284008624180709e-04, 1.28803115355099890e-02, 8.38100413989858323e-02,
      2.80647458528533678e-01, 5.07929479016613672e-01, 5.07929479016613672e-01,
      2.80647458528533678e-01, 8.38100413989858323e-02, 1.28803115355099890e-02,
      9.32284008624180709e-04, 2.71186009253788920e-05, 2.32098084486520325e-07,
      2.65480747401116728e-10};
  const double c1 = 3.0;  // c_N at N = 1
  // mode variances: a ~ N(0, 1/1), Re/Im of c1, c2 ~ N(0, 1/4) since lambda = 2
  const double sd_a = 1.0, sd_c = 0.5;
  const double norm = std::pow(M_PI, -2.5);  // 5 factors of pi^{-1/2}
  double total = 0.0;
  for (int ia = 0; ia < 16; ++ia) {
    const double a = std::sqrt(2.0) * sd_a * node[ia];
    for (int ix = 0; ix < 16; ++ix) {
      const double x1 = std::sqrt(2.0) * sd_c * node[ix];
      for (int iy = 0; iy < 16; ++iy) {
        const double y1 = std::sqrt(2.0) * sd_c * node[iy];
        const double m1 = x1 * x1 + y1 * y1;  // |c1|^2
        for (int jx = 0; jx < 16; ++jx) {
          const double x2 = std::sqrt(2.0) * sd_c * node[jx];
          const double wj = weight[ia] * weight[ix] * weight[iy] * weight[jx];
          for (int jy = 0; jy < 16; ++jy) {
            const double y2 = std::sqrt(2.0) * sd_c * node[jy];
            const double m2 = x2 * x2 + y2 * y2;
            const double int2 = a * a + 2.0 * m1 + 2.0 * m2;
            const double int4 = std::pow(a, 4) + 12.0 * a * a * (m1 + m2) +
                                6.0 * (m1 * m1 + m2 * m2) + 24.0 * m1 * m2;
            const double wick4 = int4 - 6.0 * c1 * int2 + 3.0 * c1 * c1;
            const double wick2 = int2 - c1;
            const double exponent = -((eps / 4.0) * wick4 - wick2 + 1.0 / (4.0 * eps));
            total += wj * weight[jy] * std::exp(exponent);
          }
        }
      }
    }
  }
  return norm * total;
}

}  // namespace

TEST_CASE("chain config validation") {
  ChainConfig cfg;
  cfg.cutoff = 8;
  cfg.dt = 0.04;  // dt (1 + 64) = 2.6 > 2
  CHECK_THROWS(cfg.validate());
  cfg.dt = 0.02;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps = 0.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("reweighting with the potential off is exact for Z and centered for pairings") {
  Observable one = Observable::constant(1.0);
  ReweightResult z = reweight_estimate(one, 0.5, 2, 5000, 7, 0, /*potential_on=*/false);
  CHECK(z.partition.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(z.partition.std_error == doctest::Approx(0.0));
  CHECK(z.n_rejected == 0);

  Observable p = Observable::pair(test_function());
  ReweightResult r = reweight_estimate(p, 0.5, 2, 20000, 8, 0, /*potential_on=*/false);
  CHECK(std::abs(r.integral.value) < 4.0 * r.integral.std_error);
}

TEST_CASE("reweighted partition function matches dense quadrature at cutoff 1") {
  const double eps = 0.5;
  const double oracle = quadrature_partition_cutoff1(eps);
  Observable one = Observable::constant(1.0);
  ReweightResult r = reweight_estimate(one, eps, 1, 200000, 4242, 0);
  CAPTURE(oracle);
  CAPTURE(r.partition.value);
  CHECK(std::abs(r.partition.value - oracle) < 3.0 * r.partition.std_error);
}

TEST_CASE("reweighting aborts when weights go non-finite") {
  SpectralField bad = test_function();
  bad.set_coeff(0, 0, {std::nan(""), 0.0});
  Observable f = Observable::pair(bad);
  CHECK_THROWS(reweight_estimate(f, 0.5, 1, 2000, 3, 0));
}

TEST_CASE("free dynamics reproduces the mu covariance per mode") {
  ChainConfig cfg;
  cfg.cutoff = 2;
  cfg.eps = 0.3;
  cfg.dt = 0.1;
  cfg.n_steps = 60000;
  cfg.n_burnin = 2000;
  cfg.thin = 5;
  cfg.seed = 91;
  cfg.quartic_on = false;
  std::vector<double> sq00, sq10, sq11;
  langevin_run(cfg, [&](long, const SpectralField& psi) {
    sq00.push_back(std::norm(psi.coeff(0, 0)));
    sq10.push_back(std::norm(psi.coeff(1, 0)));
    sq11.push_back(std::norm(psi.coeff(1, 1)));
  });
  auto check_mode = [&](std::vector<double>& xs, int n1, int n2) {
    EstimateWithError e = diagnose_series(xs);
    const double target = 1.0 / (1.0 + n1 * n1 + n2 * n2);
    CAPTURE(n1);
    CAPTURE(n2);
    CHECK(std::abs(e.value - target) < 4.0 * e.std_error);
  };
  check_mode(sq00, 0, 0);
  check_mode(sq10, 1, 0);
  check_mode(sq11, 1, 1);
}

TEST_CASE("noise-free flow lands on the Wick-shifted well at N = 0") {
  // fixed points of xdot = x - (x^3 - 3 c_0 x) at eps = 1: x* = +-sqrt(1 + 3 c_0) = +-2
  ChainConfig cfg;
  cfg.cutoff = 0;
  cfg.eps = 1.0;
  cfg.dt = 0.01;
  cfg.n_steps = 3000;
  cfg.n_burnin = 0;
  cfg.thin = 3000;
  cfg.noise_on = false;
  SpectralField init(0);
  init.set_coeff(0, 0, {0.1, 0.0});
  double final_value = 0.0;
  langevin_run_from(cfg, init, [&](long, const SpectralField& psi) {
    final_value = psi.coeff(0, 0).real();
  });
  CHECK(std::abs(final_value - 2.0) < 1e-6);
}

TEST_CASE("identical chain configs replay bit-identical batches") {
  ChainConfig cfg;
  cfg.cutoff = 2;
  cfg.eps = 0.4;
  cfg.dt = 0.05;
  cfg.n_steps = 500;
  cfg.n_burnin = 100;
  cfg.thin = 50;
  cfg.seed = 1234;
  cfg.stream = 3;
  SampleBatch a = langevin_chain(cfg);
  SampleBatch b = langevin_chain(cfg);
  REQUIRE(a.fields.size() == b.fields.size());
  REQUIRE(a.fields.size() == static_cast<std::size_t>(cfg.n_kept()));
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    a.fields[i].for_each([&](int n1, int n2, std::complex<double> c) {
      CHECK(b.fields[i].coeff(n1, n2) == c);
    });
  }
}

TEST_CASE("projection onto the wells") {
  SpectralField plus(0);
  plus.set_coeff(0, 0, {1.0, 0.0});
  CHECK(projection_pi(plus, 0.01) == +1);
  CHECK(projection_pi(plus, 10.0) == +1);

  SpectralField zero(0);
  CHECK(projection_pi(zero, 0.5) == 0);   // distance 1 to both wells
  CHECK(projection_pi(zero, 1.5) == +1);  // tie breaks toward +1
  CHECK(dist_to_wells(zero) == doctest::Approx(1.0));

  RngStream rng(55, 0);
  SpectralField noise = sample_gaussian(ReferenceMeasure::mu_w(-1), 3, rng);
  const double delta = 0.5;
  noise *= 0.4 * delta / field_norm(noise, NormKind::Cminus, 0.5);
  noise.add_constant(-1.0);
  CHECK(projection_pi(noise, delta) == -1);

  CHECK_THROWS(projection_pi(zero, 0.0));
}

TEST_CASE("diagnostics: iid, AR(1), constant series") {
  RngStream rng(17, 17);
  std::vector<double> iid(20000);
  for (double& x : iid) x = rng.gaussian();
  EstimateWithError ei = diagnose_series(iid);
  CHECK(ei.ess > 0.9 * iid.size());
  CHECK(ei.ess <= static_cast<double>(iid.size()));
  CHECK(!ei.low_ess);

  const double rho = 0.9;
  std::vector<double> ar(60000);
  double x = 0.0;
  for (double& v : ar) {
    x = rho * x + std::sqrt(1.0 - rho * rho) * rng.gaussian();
    v = x;
  }
  EstimateWithError ea = diagnose_series(ar);
  const double target = (1.0 - rho) / (1.0 + rho);
  const double ratio = ea.ess / static_cast<double>(ar.size());
  CHECK(std::abs(ratio - target) / target < 0.2);

  std::vector<double> flat(100, 3.0);
  EstimateWithError ec = diagnose_series(flat);
  CHECK(ec.std_error == 0.0);
  CHECK(ec.low_ess);
}

TEST_CASE("batch diagnostics evaluate the observable over chain states") {
  ChainConfig cfg;
  cfg.cutoff = 1;
  cfg.eps = 0.5;
  cfg.dt = 0.05;
  cfg.n_steps = 4000;
  cfg.n_burnin = 500;
  cfg.thin = 4;
  SampleBatch batch = langevin_chain(cfg);
  EstimateWithError e = diagnostics(batch, Observable::wick_integral(2));
  CHECK(std::isfinite(e.value));
  CHECK(e.std_error > 0.0);
  CHECK(e.ess > 10.0);
}

TEST_CASE("dt halving leaves the chain mean within combined errors") {
  // discretization bias check in place of a Metropolis correction
  Observable w2 = Observable::wick_integral(2);
  auto run = [&](double dt) {
    ChainConfig cfg;
    cfg.cutoff = 2;
    cfg.eps = 0.5;
    cfg.dt = dt;
    cfg.n_steps = 160000;
    cfg.n_burnin = 4000;
    cfg.thin = 8;
    cfg.seed = 314;
    const double sigma = wick_constants(cfg.cutoff).c_n;
    std::vector<double> vals;
    langevin_run(cfg, [&](long, const SpectralField& psi) {
      vals.push_back(observable_eval(w2, psi, cfg.eps, sigma));
    });
    return diagnose_series(vals);
  };
  EstimateWithError coarse = run(0.02);
  EstimateWithError fine = run(0.01);
  CHECK(std::abs(coarse.value - fine.value) <
        4.0 * (coarse.std_error + fine.std_error) + 0.01);
}
