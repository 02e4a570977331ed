#include "plumeloc/abc.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"
#include "plumeloc/rng.hpp"
#include "sampler_loop.hpp"

namespace plumeloc {

std::size_t Population::total_size() const {
  std::size_t n = 0;
  for (const auto& m : models) n += m.size();
  return n;
}

std::array<std::size_t, kNumModels> Population::counts() const {
  std::array<std::size_t, kNumModels> c{};
  for (int i = 0; i < kNumModels; ++i) c[i] = models[i].size();
  return c;
}

double distance(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size()) {
    throw UsageError(fmt::format("distance: vector lengths differ ({} vs {})",
                                 observed.size(), predicted.size()));
  }
  if (observed.empty()) throw UsageError("distance: empty measurement vectors");
  double sum = 0.0;
  for (std::size_t s = 0; s < observed.size(); ++s) {
    const double diff = observed[s] - predicted[s];
    sum += diff * diff;
  }
  return sum;
}

std::array<double, kNumModels> model_probabilities(const Population& pop) {
  const auto counts = pop.counts();
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw ValidationError("model_probabilities: population is empty");

  std::array<double, kNumModels> p{};
  int last_nonzero = 0;
  for (int i = 0; i < kNumModels; ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    if (counts[i] > 0) last_nonzero = i;
  }
  // The last nonzero entry absorbs the rounding residual of the running sum,
  // so the left-to-right total is exactly 1 and zero counts keep exactly 0.
  double partial = 0.0;
  for (int i = 0; i < last_nonzero; ++i) partial += p[i];
  p[last_nonzero] = 1.0 - partial;
  return p;
}

namespace {

struct AcceptedDraw {
  int model_index;
  std::vector<double> theta;
  double dist;
};

}  // namespace

RejectionResult rejection_sample(const SensorArray& array, const PriorSet& priors,
                                 double epsilon, std::size_t n, std::uint64_t seed,
                                 const SamplerOptions& options) {
  array.validate();
  if (!array.has_observed()) {
    throw ValidationError("rejection_sample: sensor array carries no observations");
  }
  if (n < 1) throw ValidationError("rejection_sample: population size must be >= 1");
  if (std::isnan(epsilon) || epsilon < 0.0) {
    throw ValidationError(fmt::format("rejection_sample: tolerance {} invalid", epsilon));
  }
  priors.model_prior.validate();
  for (const auto& spec : priors.specs) spec.validate();

  const std::span<const double> model_probs(priors.model_prior.probabilities);

  struct Workspace {
    std::vector<double> theta;
    std::vector<double> predicted;
  };
  std::vector<Workspace> work(std::max(1u, options.threads));
  for (auto& w : work) w.predicted.resize(array.size());

  auto eval = [&](std::uint64_t j, unsigned slot) -> std::optional<AcceptedDraw> {
    auto& ws = work[slot];
    RngStream rng(seed, 0, j);
    const int mi = static_cast<int>(rng.discrete(model_probs));
    const auto& spec = priors.specs[mi];
    ws.theta.resize(spec.dim());
    spec.sample(rng, ws.theta);
    predict_all_into(spec.model, ws.theta, array, ws.predicted);
    const double d = distance(array.observed, ws.predicted);
    if (d <= epsilon) return AcceptedDraw{mi, ws.theta, d};
    return std::nullopt;
  };

  detail::LoopOptions loop;
  loop.target = n;
  loop.acceptance_floor = options.acceptance_floor;
  loop.floor_window = options.floor_window;
  loop.threads = options.threads;
  loop.epsilon = epsilon;
  auto [accepted, proposals] = detail::run_accept_loop<AcceptedDraw>(loop, eval);

  RejectionResult result;
  result.population.iteration = 0;
  result.population.tolerance = epsilon;
  for (auto& draw : accepted) {
    result.population.models[draw.model_index].push_back(
        WeightedSample{0.0, std::move(draw.theta), draw.dist});
  }
  for (auto& model : result.population.models) {
    if (model.empty()) continue;
    const double w = 1.0 / static_cast<double>(model.size());
    for (auto& sample : model) sample.weight = w;
  }
  result.stats.proposals = proposals;
  result.stats.accepted = n;
  return result;
}

}  // namespace plumeloc
