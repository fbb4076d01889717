#include "phi4/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phi4/parallel.hpp"
#include "phi4/potential.hpp"
#include "phi4/rng.hpp"
#include "phi4/wick.hpp"

namespace phi4 {

void ChainConfig::validate() const {
  if (cutoff < 0) throw std::invalid_argument("chain: cutoff must be >= 0");
  if (eps <= 0.0) throw std::invalid_argument("chain: eps must be > 0");
  if (dt <= 0.0) throw std::invalid_argument("chain: dt must be > 0");
  if (dt * (1.0 + static_cast<double>(cutoff) * cutoff) > 2.0)
    throw std::invalid_argument("chain: stability constraint dt*(1+N^2) <= 2 violated");
  if (thin < 1) throw std::invalid_argument("chain: thin must be >= 1");
  if (n_steps < thin) throw std::invalid_argument("chain: n_steps must be >= thin");
  if (n_burnin < 0) throw std::invalid_argument("chain: n_burnin must be >= 0");
  if (grid_size != 0 && grid_size < 4 * cutoff + 1)
    throw std::invalid_argument("chain: grid too small for alias-free cubic projection");
}

namespace {

struct Mode {
  int n1, n2;
  bool zero;       // the (0,0) mode, kept real
  double decay;    // e^{-lambda dt}
  double phi1;     // (1 - e^{-lambda dt}) / lambda
  double noise_sd; // sqrt((1 - e^{-2 lambda dt}) / lambda)
};

std::vector<Mode> build_modes(int cutoff, double dt) {
  std::vector<Mode> modes;
  for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
    for (int n2 = -cutoff; n2 <= cutoff; ++n2) {
      if (!in_ball(n1, n2, cutoff)) continue;
      const bool zero = (n1 == 0 && n2 == 0);
      const bool rep = (n1 > 0) || (n1 == 0 && n2 > 0);
      if (!zero && !rep) continue;
      const double lambda = 1.0 + static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
      Mode m;
      m.n1 = n1;
      m.n2 = n2;
      m.zero = zero;
      m.decay = std::exp(-lambda * dt);
      m.phi1 = (1.0 - m.decay) / lambda;
      m.noise_sd = std::sqrt((1.0 - m.decay * m.decay) / lambda);
      modes.push_back(m);
    }
  }
  return modes;
}

}  // namespace

namespace {

void run_chain(const ChainConfig& cfg, SpectralField psi, RngStream rng,
               const std::function<void(long, const SpectralField&)>& keep) {
  const int n = cfg.cutoff;
  const int m = cfg.grid_size == 0 ? aliasfree_grid(n) : cfg.grid_size;
  const double c_n = wick_constants(n).c_n;
  const std::vector<Mode> modes = build_modes(n, cfg.dt);

  auto wick_cubic_hat = [&](const SpectralField& state) {
    GridField g = to_grid(state, m);
    for (double& x : g.values()) x = x * (x * x - 3.0 * c_n);
    return to_spectral(g, n);
  };

  std::vector<std::complex<double>> noise(modes.size(), {0.0, 0.0});
  const long total = cfg.n_burnin + cfg.n_steps;
  long kept = 0;
  for (long step = 1; step <= total; ++step) {
    if (cfg.noise_on) {
      for (std::size_t i = 0; i < modes.size(); ++i) {
        noise[i] = modes[i].zero
                       ? std::complex<double>{rng.gaussian() * modes[i].noise_sd, 0.0}
                       : rng.gaussian_complex() * modes[i].noise_sd;
      }
    }
    auto advance = [&](const SpectralField& from, const SpectralField& cubic_a,
                       const SpectralField* cubic_b, const SpectralField* state_b) {
      SpectralField next(n);
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const Mode& mode = modes[i];
        const std::complex<double> c = from.coeff(mode.n1, mode.n2);
        std::complex<double> drift{0.0, 0.0};
        if (cfg.quartic_on) {
          drift = 2.0 * c - cfg.eps * cubic_a.coeff(mode.n1, mode.n2);
          if (cubic_b != nullptr) {
            const std::complex<double> drift_b =
                2.0 * state_b->coeff(mode.n1, mode.n2) -
                cfg.eps * cubic_b->coeff(mode.n1, mode.n2);
            drift = 0.5 * (drift + drift_b);
          }
        }
        const std::complex<double> value = mode.decay * c + mode.phi1 * drift + noise[i];
        if (mode.zero) {
          next.set_coeff(0, 0, {value.real(), 0.0});
        } else if ((mode.n1 > 0) || (mode.n1 == 0 && mode.n2 > 0)) {
          next.set_pair(mode.n1, mode.n2, value);
        }
      }
      return next;
    };

    if (cfg.quartic_on) {
      const SpectralField cubic = wick_cubic_hat(psi);
      SpectralField predicted = advance(psi, cubic, nullptr, nullptr);
      if (cfg.heun) {
        const SpectralField cubic_pred = wick_cubic_hat(predicted);
        psi = advance(psi, cubic, &cubic_pred, &predicted);
      } else {
        psi = std::move(predicted);
      }
    } else {
      psi = advance(psi, psi, nullptr, nullptr);
    }

    if (!psi.all_finite())
      throw std::runtime_error("langevin_chain: non-finite field at step " + std::to_string(step));
    if (step > cfg.n_burnin && (step - cfg.n_burnin) % cfg.thin == 0) keep(kept++, psi);
  }
}

}  // namespace

void langevin_run(const ChainConfig& cfg,
                  const std::function<void(long, const SpectralField&)>& keep) {
  cfg.validate();
  RngStream rng(cfg.seed, cfg.stream);
  // start from a free-field draw: symmetric under phi -> -phi
  SpectralField init = sample_gaussian(ReferenceMeasure::mu(), cfg.cutoff, rng);
  run_chain(cfg, std::move(init), std::move(rng), keep);
}

void langevin_run_from(const ChainConfig& cfg, const SpectralField& init,
                       const std::function<void(long, const SpectralField&)>& keep) {
  cfg.validate();
  if (init.cutoff() != cfg.cutoff)
    throw std::invalid_argument("langevin_run_from: initial state cutoff mismatch");
  run_chain(cfg, init, RngStream(cfg.seed, cfg.stream), keep);
}

SampleBatch langevin_chain(const ChainConfig& cfg) {
  SampleBatch batch;
  batch.provenance = cfg;
  batch.fields.reserve(static_cast<std::size_t>(cfg.n_kept()));
  langevin_run(cfg, [&](long, const SpectralField& psi) {
    batch.fields.push_back(psi);
    batch.weights.push_back(1.0);
  });
  return batch;
}

namespace {

struct ChunkAcc {
  double sum_w = 0.0, sum_w2 = 0.0;
  std::vector<double> sum_wf, sum_wf2, sum_w_wf;
  long n = 0, rejected = 0;
};

}  // namespace

std::vector<ReweightResult> reweight_estimate_multi(std::span<const Observable> fs, double eps,
                                                    int cutoff, long n_samples,
                                                    std::uint64_t seed, std::uint64_t stream_base,
                                                    bool potential_on) {
  if (eps <= 0.0) throw std::invalid_argument("reweight_estimate: eps must be > 0");
  if (n_samples < 1) throw std::invalid_argument("reweight_estimate: need n >= 1");
  const std::size_t nf = fs.size();
  const double c_n = wick_constants(cutoff).c_n;
  const double sqrt_eps = std::sqrt(eps);

  constexpr long kChunk = 4096;
  const std::size_t n_chunks = static_cast<std::size_t>((n_samples + kChunk - 1) / kChunk);
  std::vector<ChunkAcc> chunks(n_chunks);

  parallel_tasks(n_chunks, [&](std::size_t ci) {
    ChunkAcc acc;
    acc.sum_wf.assign(nf, 0.0);
    acc.sum_wf2.assign(nf, 0.0);
    acc.sum_w_wf.assign(nf, 0.0);
    const long lo = static_cast<long>(ci) * kChunk;
    const long hi = std::min(n_samples, lo + kChunk);
    RngStream rng(seed, stream_base + ci);
    std::vector<double> fvals(nf);
    for (long i = lo; i < hi; ++i) {
      SpectralField psi = sample_gaussian(ReferenceMeasure::mu(), cutoff, rng);
      FieldEval ev(psi, c_n);
      double log_w = 0.0;
      if (potential_on) {
        // (1/eps) V(sqrt(eps) psi) in rescaled variables
        log_w = -((eps / 4.0) * ev.wick_mean(4) - ev.wick_mean(2) + 1.0 / (4.0 * eps));
      }
      const double w = std::exp(log_w);
      bool ok = std::isfinite(w);
      for (std::size_t k = 0; k < nf && ok; ++k) {
        fvals[k] = fs[k].eval(ev, sqrt_eps);
        ok = std::isfinite(fvals[k]);
      }
      if (!ok) {
        ++acc.rejected;
        continue;
      }
      ++acc.n;
      acc.sum_w += w;
      acc.sum_w2 += w * w;
      for (std::size_t k = 0; k < nf; ++k) {
        const double wf = w * fvals[k];
        acc.sum_wf[k] += wf;
        acc.sum_wf2[k] += wf * wf;
        acc.sum_w_wf[k] += w * wf;
      }
    }
    chunks[ci] = std::move(acc);
  });

  ChunkAcc total;
  total.sum_wf.assign(nf, 0.0);
  total.sum_wf2.assign(nf, 0.0);
  total.sum_w_wf.assign(nf, 0.0);
  for (const ChunkAcc& acc : chunks) {
    total.n += acc.n;
    total.rejected += acc.rejected;
    total.sum_w += acc.sum_w;
    total.sum_w2 += acc.sum_w2;
    for (std::size_t k = 0; k < nf; ++k) {
      total.sum_wf[k] += acc.sum_wf[k];
      total.sum_wf2[k] += acc.sum_wf2[k];
      total.sum_w_wf[k] += acc.sum_w_wf[k];
    }
  }

  if (total.rejected * 100 > n_samples)
    throw std::runtime_error("reweight_estimate: more than 1% non-finite weights (" +
                             std::to_string(total.rejected) + " rejects)");
  const double n = static_cast<double>(total.n);
  const double mean_w = total.sum_w / n;
  const double var_w = std::max(0.0, total.sum_w2 / n - mean_w * mean_w);
  const double ess_is = total.sum_w2 > 0.0 ? total.sum_w * total.sum_w / total.sum_w2 : n;

  std::vector<ReweightResult> out(nf);
  for (std::size_t k = 0; k < nf; ++k) {
    ReweightResult r;
    r.n_samples = total.n;
    r.n_rejected = total.rejected;
    const double mean_wf = total.sum_wf[k] / n;
    const double var_wf = std::max(0.0, total.sum_wf2[k] / n - mean_wf * mean_wf);
    r.integral = {mean_wf, std::sqrt(var_wf / n), ess_is, ess_is < 10.0};
    r.partition = {mean_w, std::sqrt(var_w / n), ess_is, ess_is < 10.0};
    const double ratio = total.sum_w > 0.0 ? total.sum_wf[k] / total.sum_w : 0.0;
    // delta method: Var(ratio) ~ sum_i (w_i (f_i - ratio))^2 / (sum w)^2
    const double s2 =
        total.sum_wf2[k] - 2.0 * ratio * total.sum_w_wf[k] + ratio * ratio * total.sum_w2;
    r.ratio = {ratio, total.sum_w > 0.0 ? std::sqrt(std::max(0.0, s2)) / total.sum_w : 0.0,
               ess_is, ess_is < 10.0};
    out[k] = r;
  }
  return out;
}

ReweightResult reweight_estimate(const Observable& f, double eps, int cutoff, long n_samples,
                                 std::uint64_t seed, std::uint64_t stream_base,
                                 bool potential_on) {
  return reweight_estimate_multi(std::span<const Observable>(&f, 1), eps, cutoff, n_samples,
                                 seed, stream_base, potential_on)[0];
}

double dist_to_wells(const SpectralField& phi, double eta) {
  SpectralField plus = phi;
  plus.add_constant(-1.0);
  SpectralField minus = phi;
  minus.add_constant(1.0);
  return std::min(field_norm(plus, NormKind::Cminus, eta),
                  field_norm(minus, NormKind::Cminus, eta));
}

int projection_pi(const SpectralField& phi, double delta, double eta) {
  if (delta <= 0.0) throw std::invalid_argument("projection_pi: delta must be > 0");
  SpectralField plus = phi;
  plus.add_constant(-1.0);
  SpectralField minus = phi;
  minus.add_constant(1.0);
  const double dp = field_norm(plus, NormKind::Cminus, eta);
  const double dm = field_norm(minus, NormKind::Cminus, eta);
  const double best = std::min(dp, dm);
  if (best >= delta) return 0;
  return dp <= dm ? +1 : -1;
}

EstimateWithError diagnostics(const SampleBatch& batch, const Observable& f) {
  if (batch.fields.empty()) throw std::invalid_argument("diagnostics: empty batch");
  const double sigma = wick_constants(batch.provenance.cutoff).c_n;
  std::vector<double> series;
  series.reserve(batch.fields.size());
  for (const SpectralField& psi : batch.fields)
    series.push_back(observable_eval(f, psi, batch.provenance.eps, sigma));
  return diagnose_series(series);
}

}  // namespace phi4
