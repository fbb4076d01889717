#include "phi4/expansion.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "phi4/parallel.hpp"
#include "phi4/potential.hpp"
#include "phi4/rng.hpp"
#include "phi4/wick.hpp"

namespace phi4 {

double FormalSeries::eval(double t) const { return series::eval(q, t); }

namespace {

struct WellContext {
  double sigma_w = 0.0;  // c_{w,N}
  double d = 0.0;        // c_N - c_{w,N}, cutoff or limit value
};

WellContext well_context(int cutoff, bool limit_d) {
  const WickConstants wc = wick_constants(cutoff);
  return {wc.c_wn, limit_d ? d_limit() : wc.d_n};
}

H34 h34_from_eval(const FieldEval& ev, double d) {
  return {ev.wick_mean(3) - 3.0 * d * ev.wick_mean(1),
          ev.wick_mean(4) - 6.0 * d * ev.wick_mean(2)};
}

void check_well(int w) {
  if (w != 1 && w != -1) throw std::invalid_argument("well must be +1 or -1");
}

}  // namespace

double density_g(const Observable& f, int w, const SpectralField& v, double eps, int cutoff,
                 bool limit_d, bool exponent_on) {
  check_well(w);
  if (eps < 0.0) throw std::invalid_argument("density_g: eps must be >= 0");
  const WellContext ctx = well_context(cutoff, limit_d);
  const SpectralField v_n = project(v, cutoff);
  const double sqrt_eps = std::sqrt(eps);

  SpectralField phi = v_n;
  phi *= sqrt_eps;
  phi.add_constant(static_cast<double>(w));
  const double f_val = f.eval_at(phi, eps * ctx.sigma_w);

  if (!exponent_on) return f_val;
  const H34 h = h34_from_eval(FieldEval(v_n, ctx.sigma_w), ctx.d);
  return f_val * std::exp(-(eps / 4.0) * h.h4 - sqrt_eps * w * h.h3);
}

FormalSeries taylor_q(const Observable& f, int w, const SpectralField& v, int order, int cutoff,
                      bool limit_d, bool exponent_on) {
  check_well(w);
  if (order < 0) throw std::invalid_argument("taylor_q: order must be >= 0");
  const WellContext ctx = well_context(cutoff, limit_d);
  const SpectralField v_n = project(v, cutoff);
  const FieldEval ev(v_n, ctx.sigma_w);

  std::vector<double> f_poly = f.taylor_at(static_cast<double>(w), ev);
  std::vector<double> g_poly;
  if (exponent_on) {
    const H34 h = h34_from_eval(ev, ctx.d);
    const std::vector<double> u{0.0, -static_cast<double>(w) * h.h3, -h.h4 / 4.0};
    g_poly = series::mul(f_poly, series::exp(u, order), order);
  } else {
    g_poly = std::move(f_poly);
  }
  g_poly.resize(static_cast<std::size_t>(order) + 1, 0.0);
  return {std::move(g_poly)};
}

CoefficientTable coefficients_a(const Observable& f, int order, int cutoff, long n_mc,
                                double theta_plus, double theta_minus, std::uint64_t seed,
                                bool limit_d, bool exponent_on) {
  if (order < 0 || n_mc < 1) throw std::invalid_argument("coefficients_a: bad order or n_mc");
  const WellContext ctx = well_context(cutoff, limit_d);
  const std::size_t width = static_cast<std::size_t>(order) + 1;

  // mu_w has the same law for both wells, so one draw serves both:
  // coupled Monte Carlo across wells and across all orders j.
  constexpr long kChunk = 1024;
  const std::size_t n_chunks = static_cast<std::size_t>((n_mc + kChunk - 1) / kChunk);
  struct Acc {
    std::vector<double> sum_p, sum_p2, sum_m, sum_m2;
    long n = 0;
  };
  std::vector<Acc> chunks(n_chunks);

  parallel_tasks(n_chunks, [&](std::size_t ci) {
    Acc acc;
    acc.sum_p.assign(width, 0.0);
    acc.sum_p2.assign(width, 0.0);
    acc.sum_m.assign(width, 0.0);
    acc.sum_m2.assign(width, 0.0);
    const long lo = static_cast<long>(ci) * kChunk;
    const long hi = std::min(n_mc, lo + kChunk);
    RngStream rng(seed, ci);
    for (long i = lo; i < hi; ++i) {
      const SpectralField v = sample_gaussian(ReferenceMeasure::mu_w(+1), cutoff, rng);
      const FieldEval ev(v, ctx.sigma_w);
      for (int w : {+1, -1}) {
        std::vector<double> f_poly = f.taylor_at(static_cast<double>(w), ev);
        std::vector<double> q;
        if (exponent_on) {
          const H34 h = h34_from_eval(ev, ctx.d);
          const std::vector<double> u{0.0, -static_cast<double>(w) * h.h3, -h.h4 / 4.0};
          q = series::mul(f_poly, series::exp(u, order), order);
        } else {
          q = std::move(f_poly);
        }
        q.resize(width, 0.0);
        auto& sum = (w == +1) ? acc.sum_p : acc.sum_m;
        auto& sum2 = (w == +1) ? acc.sum_p2 : acc.sum_m2;
        for (std::size_t j = 0; j < width; ++j) {
          sum[j] += q[j];
          sum2[j] += q[j] * q[j];
        }
      }
      ++acc.n;
    }
    chunks[ci] = std::move(acc);
  });

  CoefficientTable table;
  table.order = order;
  table.theta_plus = theta_plus;
  table.theta_minus = theta_minus;
  table.a.assign(width, 0.0);
  table.a_se.assign(width, 0.0);
  table.mean_plus.assign(width, 0.0);
  table.se_plus.assign(width, 0.0);
  table.mean_minus.assign(width, 0.0);
  table.se_minus.assign(width, 0.0);

  std::vector<double> sum_p(width, 0.0), sum_p2(width, 0.0), sum_m(width, 0.0), sum_m2(width, 0.0);
  long n_total = 0;
  for (const Acc& acc : chunks) {
    n_total += acc.n;
    for (std::size_t j = 0; j < width; ++j) {
      sum_p[j] += acc.sum_p[j];
      sum_p2[j] += acc.sum_p2[j];
      sum_m[j] += acc.sum_m[j];
      sum_m2[j] += acc.sum_m2[j];
    }
  }
  table.n_mc = n_total;
  table.low_ess = n_total < 10;
  const double n = static_cast<double>(n_total);
  for (std::size_t j = 0; j < width; ++j) {
    const double mp = sum_p[j] / n;
    const double mm = sum_m[j] / n;
    const double vp = std::max(0.0, sum_p2[j] / n - mp * mp);
    const double vm = std::max(0.0, sum_m2[j] / n - mm * mm);
    table.mean_plus[j] = mp;
    table.se_plus[j] = std::sqrt(vp / n);
    table.mean_minus[j] = mm;
    table.se_minus[j] = std::sqrt(vm / n);
    table.a[j] = theta_plus * mp + theta_minus * mm;
    // coupled samples: conservative error combining the wells linearly
    table.a_se[j] = theta_plus * table.se_plus[j] + theta_minus * table.se_minus[j];
  }
  return table;
}

namespace {

// Toy-mode integral: sum over wells of the plain Gaussian expectation of
// F(w + sqrt(eps) v) with unit weights, via the exact Taylor polynomial.
EstimateWithError toy_integral(const Observable& f, double eps, int cutoff, long n_mc,
                               std::uint64_t seed) {
  CoefficientTable t = coefficients_a(f, f.degree(), cutoff, n_mc, 1.0, 1.0, seed, false, false);
  const double sqrt_eps = std::sqrt(eps);
  double value = 0.0, se = 0.0;
  double t_pow = 1.0;
  for (std::size_t j = 0; j < t.a.size(); ++j) {
    value += t.a[j] * t_pow;
    se += t.a_se[j] * t_pow;
    t_pow *= sqrt_eps;
  }
  return {value, se, static_cast<double>(t.n_mc), t.low_ess};
}

}  // namespace

ExpansionReport verify_expansion(const Observable& f, int order, const std::vector<double>& eps_grid,
                                 int cutoff, long n_mc, long n_reweight, std::uint64_t seed,
                                 bool toy_mode) {
  if (eps_grid.size() < 2)
    throw std::invalid_argument("verify_expansion: need at least two eps values");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument("verify_expansion: eps grid must be strictly decreasing");

  ExpansionReport report;
  const double theta = toy_mode ? 1.0 : theta_re(cutoff, 0.0).theta();
  report.coeffs = coefficients_a(f, order, cutoff, n_mc, theta, theta,
                                 task_seed(seed, "coefficients"), false, !toy_mode);

  report.rows.resize(eps_grid.size());
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    const double eps = eps_grid[i];
    EstimateWithError integral;
    if (toy_mode) {
      integral = toy_integral(f, eps, cutoff, n_mc, task_seed(seed, "toy-integral"));
    } else {
      const ReweightResult rw = reweight_estimate(f, eps, cutoff, n_reweight,
                                                  task_seed(seed, "reweight"),
                                                  (i + 1) * 1000000ULL);
      integral = rw.integral;
    }
    double expansion = 0.0, t_pow = 1.0;
    const double sqrt_eps = std::sqrt(eps);
    for (int j = 0; j <= order; ++j) {
      expansion += report.coeffs.a[static_cast<std::size_t>(j)] * t_pow;
      t_pow *= sqrt_eps;
    }
    ExpansionRow row;
    row.eps = eps;
    row.integral = integral.value;
    row.integral_se = integral.std_error;
    row.expansion = expansion;
    row.remainder = std::abs(integral.value - expansion);
    report.rows[i] = row;
    if (integral.std_error >= row.remainder) report.inconclusive = true;
  }

  std::vector<double> log_eps, log_r;
  for (const ExpansionRow& row : report.rows) {
    if (row.remainder > 0.0) {
      log_eps.push_back(std::log(row.eps));
      log_r.push_back(std::log(row.remainder));
    }
  }
  report.slope = log_eps.size() >= 2 ? fit_slope(log_eps, log_r) : 0.0;
  return report;
}

namespace {

struct ChainAcc {
  long n_kept = 0;
  long n_plus = 0, n_minus = 0, n_unclassified = 0;
  long n_conc = 0;
  double sum_f = 0.0;
  std::vector<std::complex<double>> mode_sum;
  std::vector<double> mode_sum2;
  long n_classified = 0;
};

}  // namespace

LlnCltReport lln_clt_experiment(const Observable& f, const LlnCltConfig& cfg) {
  if (cfg.eps_grid.empty()) throw std::invalid_argument("lln_clt: empty eps grid");
  if (cfg.n_chains < 1) throw std::invalid_argument("lln_clt: need at least one chain");

  LlnCltReport report;
  {
    const DeterminantResult th = theta_re_limit(0.0);
    report.weights = weights_b(th.theta(), th.theta());
  }
  {
    SpectralField one(0);
    one.set_coeff(0, 0, {1.0, 0.0});
    SpectralField minus_one(0);
    minus_one.set_coeff(0, 0, {-1.0, 0.0});
    report.lln_target = report.weights.b_plus * f.eval_at(one, 0.0) +
                        report.weights.b_minus * f.eval_at(minus_one, 0.0);
  }

  const double sigma = wick_constants(cfg.cutoff).c_n;
  const std::size_t n_modes = cfg.clt_modes.size();
  const double eps_min = cfg.eps_grid.back();

  for (std::size_t ei = 0; ei < cfg.eps_grid.size(); ++ei) {
    const double eps = cfg.eps_grid[ei];
    const double sqrt_eps = std::sqrt(eps);
    std::vector<ChainAcc> acc(static_cast<std::size_t>(cfg.n_chains));

    parallel_tasks(static_cast<std::size_t>(cfg.n_chains), [&](std::size_t chain) {
      ChainConfig cc;
      cc.cutoff = cfg.cutoff;
      cc.eps = eps;
      cc.dt = cfg.dt;
      cc.n_steps = cfg.n_steps;
      cc.n_burnin = cfg.n_burnin;
      cc.thin = cfg.thin;
      cc.seed = cfg.seed;
      cc.stream = ei * 100000ULL + chain;
      ChainAcc& a = acc[chain];
      a.mode_sum.assign(n_modes, {0.0, 0.0});
      a.mode_sum2.assign(n_modes, 0.0);
      langevin_run(cc, [&](long, const SpectralField& psi) {
        ++a.n_kept;
        SpectralField phi = psi;
        phi *= sqrt_eps;
        a.sum_f += observable_eval(f, psi, eps, sigma);
        if (dist_to_wells(phi, cfg.eta) >= cfg.delta_conc) ++a.n_conc;
        const int w = projection_pi(phi, cfg.delta_classify, cfg.eta);
        if (w == 0) {
          ++a.n_unclassified;
          return;
        }
        (w > 0 ? a.n_plus : a.n_minus)++;
        ++a.n_classified;
        for (std::size_t mi = 0; mi < n_modes; ++mi) {
          const Frequency& fr = cfg.clt_modes[mi];
          std::complex<double> vhat = psi.coeff(fr.n1, fr.n2);
          if (fr.n1 == 0 && fr.n2 == 0) vhat -= static_cast<double>(w) / sqrt_eps;
          a.mode_sum[mi] += vhat;
          a.mode_sum2[mi] += std::norm(vhat);
        }
      });
    });

    LlnCltPerEps row;
    row.eps = eps;
    long n_kept = 0, n_plus = 0, n_minus = 0, n_conc = 0, n_classified = 0;
    std::vector<double> chain_occ, chain_f, chain_conc;
    for (const ChainAcc& a : acc) {
      n_kept += a.n_kept;
      n_plus += a.n_plus;
      n_minus += a.n_minus;
      n_conc += a.n_conc;
      n_classified += a.n_classified;
      if (a.n_classified > 0)
        chain_occ.push_back(static_cast<double>(a.n_plus) / static_cast<double>(a.n_classified));
      chain_f.push_back(a.sum_f / static_cast<double>(a.n_kept));
      chain_conc.push_back(static_cast<double>(a.n_conc) / static_cast<double>(a.n_kept));
    }
    row.n_kept = n_kept;
    row.classified_frac = n_kept > 0 ? static_cast<double>(n_classified) / n_kept : 0.0;
    row.occupancy_flagged = (n_plus < 10 || n_minus < 10);
    if (n_classified > 0) {
      row.occ_plus = static_cast<double>(n_plus) / n_classified;
      row.occ_minus = static_cast<double>(n_minus) / n_classified;
    }
    row.occ_se = chain_occ.size() > 1
                     ? std::sqrt(variance_of(chain_occ) / static_cast<double>(chain_occ.size()))
                     : 0.5;
    row.f_mean = mean_of(chain_f);
    row.f_se = std::sqrt(variance_of(chain_f) / static_cast<double>(chain_f.size()));
    row.conc_mass = mean_of(chain_conc);
    row.conc_se = std::sqrt(variance_of(chain_conc) / static_cast<double>(chain_conc.size()));
    report.per_eps.push_back(row);

    if (eps == eps_min) {
      for (std::size_t mi = 0; mi < n_modes; ++mi) {
        std::complex<double> s{0.0, 0.0};
        double s2 = 0.0;
        for (const ChainAcc& a : acc) {
          s += a.mode_sum[mi];
          s2 += a.mode_sum2[mi];
        }
        CltModeRow mrow;
        mrow.n1 = cfg.clt_modes[mi].n1;
        mrow.n2 = cfg.clt_modes[mi].n2;
        mrow.n_samples = n_classified;
        if (n_classified > 0) {
          const std::complex<double> mean = s / static_cast<double>(n_classified);
          mrow.var_emp = s2 / static_cast<double>(n_classified) - std::norm(mean);
        }
        mrow.var_target = 1.0 / (2.0 + mrow.n1 * mrow.n1 + mrow.n2 * mrow.n2);
        report.clt.push_back(mrow);
      }
    }
  }
  return report;
}

}  // namespace phi4
