#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "plumeloc/dispersion.hpp"
#include "plumeloc/priors.hpp"

namespace plumeloc {

/// Tolerance value standing in for "no tolerance yet" (initial iteration).
inline constexpr double kInfTolerance = std::numeric_limits<double>::infinity();

struct WeightedSample {
  double weight = 0.0;        // normalised within the model's population
  std::vector<double> theta;  // canonical parameter order for its model
  double distance = 0.0;      // the d* that admitted this sample

  friend bool operator==(const WeightedSample&, const WeightedSample&) = default;
};

/// Per-model weighted sample sets for one iteration.
struct Population {
  std::array<std::vector<WeightedSample>, kNumModels> models;
  int iteration = 0;
  double tolerance = kInfTolerance;  // the epsilon samples were accepted under

  std::size_t total_size() const;
  std::array<std::size_t, kNumModels> counts() const;

  friend bool operator==(const Population&, const Population&) = default;
};

/// Sum of squared differences between observed and predicted concentrations.
/// Throws UsageError on length mismatch or empty vectors.
double distance(std::span<const double> observed, std::span<const double> predicted);

/// Posterior model probabilities L_m / N from the population counts. The
/// largest entry absorbs the rounding residual so the vector sums to exactly
/// 1 and empty models stay at exactly 0.
std::array<double, kNumModels> model_probabilities(const Population& pop);

/// Knobs shared by every proposal loop.
struct SamplerOptions {
  double acceptance_floor = 1e-6;        // abort below this rate...
  std::uint64_t floor_window = 1000000;  // ...over this many consecutive proposals
  unsigned threads = 1;                  // proposal evaluation fan-out
};

struct SamplerStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;

  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

struct RejectionResult {
  Population population;
  SamplerStats stats;
};

/// Plain multiple-model rejection sampler: propose from the priors, accept
/// when the simulated measurement lands within epsilon of the observation.
/// Samples within each model get uniform weights. Deterministic given
/// (inputs, seed) regardless of thread count: proposal j draws from the
/// stream keyed (seed, 0, j) and the accepted set is the first n acceptances
/// in proposal order.
RejectionResult rejection_sample(const SensorArray& array, const PriorSet& priors,
                                 double epsilon, std::size_t n, std::uint64_t seed,
                                 const SamplerOptions& options = {});

}  // namespace plumeloc
