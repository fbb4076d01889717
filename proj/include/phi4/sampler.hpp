#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "phi4/measure.hpp"
#include "phi4/observable.hpp"
#include "phi4/spectral_field.hpp"
#include "phi4/stats.hpp"

namespace phi4 {

/// Renormalized spectral Langevin chain in the rescaled variable psi, where
/// phi = sqrt(eps) psi. The drift is -(1-Delta) psi - grad[(1/eps) V(sqrt(eps) psi)]
/// = Delta psi + psi - eps P_N(:psi^3:_{c_N}); the linear (1-Delta) part is
/// integrated exactly per mode with the exact OU noise variance, the Wick
/// cubic explicitly. A predictor-corrector stage (heun = true) averages the
/// explicit drift over the step and removes the leading O(dt) bias of the
/// stationary law; heun = false keeps the plain exponential Euler step.
struct ChainConfig {
  int cutoff = 8;
  int grid_size = 0;  // 0 -> alias-free default 4N+4
  double eps = 0.1;
  double dt = 0.01;
  long n_steps = 100000;
  long n_burnin = 10000;
  long thin = 10;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  bool quartic_on = true;  // false: pure Ornstein-Uhlenbeck reference dynamics
  bool noise_on = true;    // false: deterministic gradient flow
  bool heun = true;        // corrector stage for the explicit drift

  long n_kept() const { return n_steps / thin; }
  void validate() const;  // throws on invalid settings
};

/// Batch of rescaled states psi with provenance; weights are 1 for chain
/// samples and importance weights for reweighting batches.
struct SampleBatch {
  std::vector<SpectralField> fields;
  std::vector<double> weights;
  ChainConfig provenance;
};

/// Runs the chain, invoking keep(kept_index, psi) for every post-burn-in,
/// thinned state. Aborts with the step index if the field leaves double range.
/// The default entry point starts from a free-field draw of the same stream.
void langevin_run(const ChainConfig& cfg,
                  const std::function<void(long, const SpectralField&)>& keep);

void langevin_run_from(const ChainConfig& cfg, const SpectralField& init,
                       const std::function<void(long, const SpectralField&)>& keep);

SampleBatch langevin_chain(const ChainConfig& cfg);

/// Importance-sampling estimate of I = int F(phi) e^{-V(phi)/eps} dmu_eps and
/// of the partition function Z (same with F = 1), from psi ~ mu draws and the
/// rescaled weight exp{-[(eps/4) int :psi^4: - int :psi^2: + 1/(4 eps)]}.
struct ReweightResult {
  EstimateWithError integral;
  EstimateWithError partition;
  EstimateWithError ratio;  // <F> = I/Z, delta-method error
  long n_rejected = 0;
  long n_samples = 0;
};

ReweightResult reweight_estimate(const Observable& f, double eps, int cutoff, long n_samples,
                                 std::uint64_t seed, std::uint64_t stream_base = 0,
                                 bool potential_on = true);

/// Shares one sample set (and one Z estimate) across several observables.
std::vector<ReweightResult> reweight_estimate_multi(std::span<const Observable> fs, double eps,
                                                    int cutoff, long n_samples,
                                                    std::uint64_t seed,
                                                    std::uint64_t stream_base = 0,
                                                    bool potential_on = true);

/// Projection onto the minimizer set: the well w in {-1,+1} closest to phi in
/// the Cminus(eta) proxy distance if that distance is below delta, else 0.
/// Ties break toward +1.
int projection_pi(const SpectralField& phi, double delta, double eta = 0.5);

double dist_to_wells(const SpectralField& phi, double eta = 0.5);

/// Mean, autocorrelation ESS and batch-means error of F over a batch.
EstimateWithError diagnostics(const SampleBatch& batch, const Observable& f);

}  // namespace phi4
