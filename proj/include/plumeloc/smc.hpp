#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "plumeloc/abc.hpp"
#include "plumeloc/linalg.hpp"
#include "plumeloc/rng.hpp"

namespace plumeloc {

struct SmcConfig {
  std::size_t population_size = 1000;  // N
  double phi_fraction = 0.128;         // order-statistic fraction of N
  double lambda = 0.4;                 // proposal scale factor
  double delta = 2e-10;                // termination threshold on tolerance gaps
  std::size_t max_iterations = 100;    // safety cap on repeated iterations
  SamplerOptions sampler;

  void validate() const;
};

/// Adaptive Gaussian proposal for one model population: a candidate is the
/// selected sample perturbed by lambda * h * Sigma * eps, with Sigma the
/// Cholesky root of the weighted sample covariance over the free (non-fixed)
/// parameter subspace and h the usual multivariate-Gaussian optimal
/// bandwidth for that dimension and count.
struct ProposalKernel {
  ModelId model = ModelId::GaussianLinear;
  std::vector<std::size_t> free_index;  // perturbed components of theta
  double bandwidth = 0.0;               // h
  double lambda = 0.0;
  SquareMatrix scale_root;              // lower-triangular Sigma
  double log_norm_const = 0.0;          // -(sum log diag(lambda*h*Sigma) + d/2 log 2pi)
};

struct IterationRecord {
  int iteration = 0;
  double epsilon_used = kInfTolerance;  // tolerance applied this iteration
  double epsilon_next = 0.0;            // order statistic of this iteration's distances
  std::array<std::size_t, kNumModels> counts{};
  std::array<double, kNumModels> probabilities{};
  double acceptance_rate = 0.0;
  std::uint64_t proposals = 0;
  std::uint64_t zero_prior_rejects = 0;
  std::uint64_t kernel_collapse_rejects = 0;
  double seconds = 0.0;  // wall clock; excluded from the determinism contract
};

struct RunTrace {
  std::vector<IterationRecord> records;
  bool cap_reached = false;
};

struct IterationOutput {
  Population population;
  double epsilon_next = 0.0;
  SamplerStats stats;
  std::uint64_t zero_prior_rejects = 0;
  std::uint64_t kernel_collapse_rejects = 0;
};

/// k-th smallest of the recorded distances with k = ceil(fraction * n), ties
/// kept (a discrete order statistic, no quantile interpolation).
double tolerance_order_statistic(std::vector<double> distances, double fraction);

/// Initial iteration: N draws straight from the priors (every draw accepted),
/// per-model weights normalised, first tolerance from the order statistic.
IterationOutput init_iter(const SensorArray& array, const PriorSet& priors,
                          const SmcConfig& config, std::uint64_t seed);

/// Weighted covariance + Cholesky root + bandwidth for one model population.
/// A rank-deficient covariance gets diagonal jitter of 1e-10 * trace/d (1e-10
/// when the trace is zero), escalating tenfold until the factorisation
/// succeeds; a singleton population therefore degenerates to a tiny ball.
ProposalKernel build_kernel(std::span<const WeightedSample> prev,
                            const ModelPriorSpec& spec, double lambda);

/// Draws the source index k by weight, then perturbs: returns the candidate
/// and k. Consumes one uniform plus free-dimension normals from the stream.
std::pair<std::vector<double>, std::size_t> propose(const ProposalKernel& kernel,
                                                    std::span<const WeightedSample> prev,
                                                    RngStream& rng);

/// Log of the unnormalised importance weight: log prior density minus the log
/// mixture density of the proposal over the previous population. Returns
/// -infinity when the mixture density underflows to zero (kernel collapse;
/// callers reject and count the event).
double log_weight_update(std::span<const double> candidate, const ModelPriorSpec& spec,
                         const ProposalKernel& kernel,
                         std::span<const WeightedSample> prev);

/// One repeated iteration at tolerance epsilon: kernel proposals from the
/// previous populations (model draws restricted to non-empty ones), rejection
/// at epsilon, importance weights, and the next tolerance.
IterationOutput repeated_iter(const Population& prev, double epsilon,
                              const SensorArray& array, const PriorSet& priors,
                              const SmcConfig& config, std::uint64_t seed);

struct AdaptiveResult {
  Population final_population;
  RunTrace trace;
};

/// Called after every completed iteration; populations passed here are valid
/// posteriors in their own right (the sampler is interruptible).
using IterationObserver =
    std::function<void(const Population&, const IterationRecord&)>;

/// Full adaptive run: initial iteration, then repeated iterations while the
/// tolerance gap exceeds delta (the first gap, from the infinite sentinel,
/// always passes). Stops with cap_reached when max_iterations hits first.
AdaptiveResult run_adaptive(const SensorArray& array, const PriorSet& priors,
                            const SmcConfig& config, std::uint64_t seed,
                            const IterationObserver& observer = {});

}  // namespace plumeloc
