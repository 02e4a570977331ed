#include "plumeloc/smc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"
#include "sampler_loop.hpp"

namespace plumeloc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::size_t weighted_index(std::span<const WeightedSample> samples, RngStream& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    cum += samples[i].weight;
    if (u <= cum) return i;
  }
  return samples.size() - 1;
}

struct AcceptedDraw {
  int model_index;
  std::vector<double> theta;
  double dist;
  double log_weight;
};

}  // namespace

void SmcConfig::validate() const {
  if (population_size < 1) throw ValidationError("population size must be >= 1");
  if (!(phi_fraction > 0.0) || !(phi_fraction < 1.0)) {
    throw ValidationError(fmt::format("phi fraction {} outside (0,1)", phi_fraction));
  }
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw ValidationError(fmt::format("lambda {} outside (0,1)", lambda));
  }
  if (!(delta > 0.0)) throw ValidationError(fmt::format("delta {} must be > 0", delta));
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(sampler.acceptance_floor > 0.0)) {
    throw ValidationError("acceptance floor must be > 0");
  }
  if (sampler.floor_window < 1) throw ValidationError("floor window must be >= 1");
}

double tolerance_order_statistic(std::vector<double> distances, double fraction) {
  if (distances.empty()) throw ValidationError("order statistic of an empty distance list");
  const double kd = std::ceil(fraction * static_cast<double>(distances.size()));
  std::size_t k = kd < 1.0 ? 1 : static_cast<std::size_t>(kd);
  k = std::min(k, distances.size());
  std::nth_element(distances.begin(), distances.begin() + (k - 1), distances.end());
  return distances[k - 1];
}

IterationOutput init_iter(const SensorArray& array, const PriorSet& priors,
                          const SmcConfig& config, std::uint64_t seed) {
  array.validate();
  if (!array.has_observed()) throw ValidationError("init_iter: no observations");
  config.validate();
  priors.model_prior.validate();
  for (const auto& spec : priors.specs) spec.validate();

  const std::span<const double> model_probs(priors.model_prior.probabilities);

  struct Workspace {
    std::vector<double> theta;
    std::vector<double> predicted;
  };
  std::vector<Workspace> work(std::max(1u, config.sampler.threads));
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
    return AcceptedDraw{mi, ws.theta, d, 0.0};
  };

  detail::LoopOptions loop;
  loop.target = config.population_size;
  loop.acceptance_floor = config.sampler.acceptance_floor;
  loop.floor_window = config.sampler.floor_window;
  loop.threads = config.sampler.threads;
  loop.epsilon = kInfTolerance;
  auto [accepted, proposals] = detail::run_accept_loop<AcceptedDraw>(loop, eval);

  IterationOutput out;
  out.population.iteration = 0;
  out.population.tolerance = kInfTolerance;
  std::vector<double> dists;
  dists.reserve(accepted.size());
  for (auto& draw : accepted) {
    dists.push_back(draw.dist);
    out.population.models[draw.model_index].push_back(
        WeightedSample{1.0, std::move(draw.theta), draw.dist});
  }
  for (auto& model : out.population.models) {
    if (model.empty()) continue;
    const double w = 1.0 / static_cast<double>(model.size());
    for (auto& sample : model) sample.weight = w;
  }
  out.epsilon_next = tolerance_order_statistic(std::move(dists), config.phi_fraction);
  out.stats.proposals = proposals;
  out.stats.accepted = config.population_size;
  return out;
}

ProposalKernel build_kernel(std::span<const WeightedSample> prev,
                            const ModelPriorSpec& spec, double lambda) {
  if (prev.empty()) throw ValidationError("build_kernel: empty model population");

  ProposalKernel kernel;
  kernel.model = spec.model;
  kernel.free_index = spec.free_indices();
  kernel.lambda = lambda;
  const std::size_t d = kernel.free_index.size();
  const std::size_t count = prev.size();

  kernel.bandwidth = std::pow(4.0 / (static_cast<double>(d) + 2.0),
                              1.0 / (static_cast<double>(d) + 4.0)) *
                     std::pow(static_cast<double>(count),
                              -1.0 / (static_cast<double>(d) + 4.0));

  std::vector<double> mean(d, 0.0);
  for (const auto& sample : prev) {
    for (std::size_t f = 0; f < d; ++f) {
      mean[f] += sample.weight * sample.theta[kernel.free_index[f]];
    }
  }
  SquareMatrix cov(d);
  for (const auto& sample : prev) {
    for (std::size_t a = 0; a < d; ++a) {
      const double da = sample.theta[kernel.free_index[a]] - mean[a];
      for (std::size_t b = a; b < d; ++b) {
        const double db = sample.theta[kernel.free_index[b]] - mean[b];
        cov(a, b) += sample.weight * da * db;
      }
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < a; ++b) cov(a, b) = cov(b, a);
  }

  if (!cholesky_lower(cov, kernel.scale_root)) {
    const double trace = cov.trace();
    double jitter = 1e-10 * (trace > 0.0 ? trace / static_cast<double>(d) : 1.0);
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      for (std::size_t a = 0; a < d; ++a) cov(a, a) += jitter;
      ok = cholesky_lower(cov, kernel.scale_root);
      jitter *= 10.0;
    }
    if (!ok) throw ValidationError("build_kernel: covariance cannot be regularised");
  }

  const double lamh = kernel.lambda * kernel.bandwidth;
  double log_det = 0.0;
  for (std::size_t a = 0; a < d; ++a) log_det += std::log(lamh * kernel.scale_root(a, a));
  kernel.log_norm_const = -log_det - 0.5 * static_cast<double>(d) * std::log(kTwoPi);
  return kernel;
}

std::pair<std::vector<double>, std::size_t> propose(const ProposalKernel& kernel,
                                                    std::span<const WeightedSample> prev,
                                                    RngStream& rng) {
  const std::size_t k = weighted_index(prev, rng);
  const std::size_t d = kernel.free_index.size();
  std::vector<double> eps(d);
  for (std::size_t f = 0; f < d; ++f) eps[f] = rng.normal01();
  std::vector<double> step(d);
  lower_matvec(kernel.scale_root, eps, step);

  std::vector<double> candidate = prev[k].theta;
  const double lamh = kernel.lambda * kernel.bandwidth;
  for (std::size_t f = 0; f < d; ++f) candidate[kernel.free_index[f]] += lamh * step[f];
  return {std::move(candidate), k};
}

double log_weight_update(std::span<const double> candidate, const ModelPriorSpec& spec,
                         const ProposalKernel& kernel,
                         std::span<const WeightedSample> prev) {
  const double log_prior = spec.log_density(candidate);
  if (log_prior == kNegInf) return kNegInf;

  const std::size_t d = kernel.free_index.size();
  const double lamh = kernel.lambda * kernel.bandwidth;
  const double inv_lamh_sq = 1.0 / (lamh * lamh);

  std::vector<double> diff(d);
  std::vector<double> solved(d);
  std::vector<double> terms(prev.size());
  double max_term = kNegInf;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    for (std::size_t f = 0; f < d; ++f) {
      diff[f] = candidate[kernel.free_index[f]] - prev[i].theta[kernel.free_index[f]];
    }
    forward_substitute(kernel.scale_root, diff, solved);
    double quad = 0.0;
    for (std::size_t f = 0; f < d; ++f) quad += solved[f] * solved[f];
    const double log_q = -0.5 * quad * inv_lamh_sq + kernel.log_norm_const;
    terms[i] = std::log(prev[i].weight) + log_q;
    if (terms[i] > max_term) max_term = terms[i];
  }
  if (max_term == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  const double log_denominator = max_term + std::log(sum);
  if (log_denominator == kNegInf) return kNegInf;
  return log_prior - log_denominator;
}

IterationOutput repeated_iter(const Population& prev, double epsilon,
                              const SensorArray& array, const PriorSet& priors,
                              const SmcConfig& config, std::uint64_t seed) {
  config.validate();
  if (prev.total_size() == 0) throw ValidationError("repeated_iter: empty previous population");
  const int iteration = prev.iteration + 1;

  // Model draws restricted to models that still hold samples; dead models
  // stay dead.
  std::array<double, kNumModels> restricted{};
  double alive_mass = 0.0;
  for (int mi = 0; mi < kNumModels; ++mi) {
    if (!prev.models[mi].empty()) alive_mass += priors.model_prior.probabilities[mi];
  }
  if (!(alive_mass > 0.0)) {
    throw ValidationError("repeated_iter: no prior mass on surviving models");
  }
  for (int mi = 0; mi < kNumModels; ++mi) {
    restricted[mi] = prev.models[mi].empty()
                         ? 0.0
                         : priors.model_prior.probabilities[mi] / alive_mass;
  }

  std::array<ProposalKernel, kNumModels> kernels;
  for (int mi = 0; mi < kNumModels; ++mi) {
    if (!prev.models[mi].empty()) {
      kernels[mi] = build_kernel(prev.models[mi], priors.specs[mi], config.lambda);
    }
  }

  struct Workspace {
    std::vector<double> predicted;
  };
  std::vector<Workspace> work(std::max(1u, config.sampler.threads));
  for (auto& w : work) w.predicted.resize(array.size());

  std::atomic<std::uint64_t> zero_prior{0};
  std::atomic<std::uint64_t> kernel_collapse{0};

  auto eval = [&](std::uint64_t j, unsigned slot) -> std::optional<AcceptedDraw> {
    auto& ws = work[slot];
    RngStream rng(seed, static_cast<std::uint64_t>(iteration), j);
    const int mi = static_cast<int>(rng.discrete(restricted));
    const auto prev_samples = std::span<const WeightedSample>(prev.models[mi]);
    auto [candidate, k] = propose(kernels[mi], prev_samples, rng);
    const auto& spec = priors.specs[mi];
    if (spec.log_density(candidate) == kNegInf) {
      zero_prior.fetch_add(1, std::memory_order_relaxed);
      return std::nullopt;
    }
    predict_all_into(spec.model, candidate, array, ws.predicted);
    const double d = distance(array.observed, ws.predicted);
    if (!(d <= epsilon)) return std::nullopt;
    const double log_w = log_weight_update(candidate, spec, kernels[mi], prev_samples);
    if (log_w == kNegInf) {
      kernel_collapse.fetch_add(1, std::memory_order_relaxed);
      return std::nullopt;
    }
    return AcceptedDraw{mi, std::move(candidate), d, log_w};
  };

  detail::LoopOptions loop;
  loop.target = config.population_size;
  loop.acceptance_floor = config.sampler.acceptance_floor;
  loop.floor_window = config.sampler.floor_window;
  loop.threads = config.sampler.threads;
  loop.epsilon = epsilon;
  auto [accepted, proposals] = detail::run_accept_loop<AcceptedDraw>(loop, eval);

  IterationOutput out;
  out.population.iteration = iteration;
  out.population.tolerance = epsilon;
  std::vector<double> dists;
  dists.reserve(accepted.size());
  std::array<std::vector<double>, kNumModels> log_weights;
  for (auto& draw : accepted) {
    dists.push_back(draw.dist);
    log_weights[draw.model_index].push_back(draw.log_weight);
    out.population.models[draw.model_index].push_back(
        WeightedSample{0.0, std::move(draw.theta), draw.dist});
  }
  // Normalise per model from log weights.
  for (int mi = 0; mi < kNumModels; ++mi) {
    auto& model = out.population.models[mi];
    if (model.empty()) continue;
    const auto& lw = log_weights[mi];
    double mx = kNegInf;
    for (double v : lw) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) sum += std::exp(lw[i] - mx);
    for (std::size_t i = 0; i < lw.size(); ++i) {
      model[i].weight = std::exp(lw[i] - mx) / sum;
    }
  }
  out.epsilon_next = tolerance_order_statistic(std::move(dists), config.phi_fraction);
  out.stats.proposals = proposals;
  out.stats.accepted = config.population_size;
  out.zero_prior_rejects = zero_prior.load();
  out.kernel_collapse_rejects = kernel_collapse.load();
  return out;
}

AdaptiveResult run_adaptive(const SensorArray& array, const PriorSet& priors,
                            const SmcConfig& config, std::uint64_t seed,
                            const IterationObserver& observer) {
  AdaptiveResult result;

  double start = now_seconds();
  IterationOutput out = init_iter(array, priors, config, seed);

  auto record_of = [&](const IterationOutput& o, double eps_used, double secs) {
    IterationRecord rec;
    rec.iteration = o.population.iteration;
    rec.epsilon_used = eps_used;
    rec.epsilon_next = o.epsilon_next;
    rec.counts = o.population.counts();
    rec.probabilities = model_probabilities(o.population);
    rec.acceptance_rate = o.stats.acceptance_rate();
    rec.proposals = o.stats.proposals;
    rec.zero_prior_rejects = o.zero_prior_rejects;
    rec.kernel_collapse_rejects = o.kernel_collapse_rejects;
    rec.seconds = secs;
    return rec;
  };

  IterationRecord rec = record_of(out, kInfTolerance, now_seconds() - start);
  result.trace.records.push_back(rec);
  if (observer) observer(out.population, rec);

  // epsilon_t starts at the infinite sentinel, so the first gap test passes
  // unconditionally, whatever delta is.
  double epsilon_t = kInfTolerance;
  double epsilon_next = out.epsilon_next;
  Population population = std::move(out.population);
  std::size_t t = 0;

  while (std::isinf(epsilon_t) || epsilon_t - epsilon_next > config.delta) {
    if (t + 1 > config.max_iterations) {
      result.trace.cap_reached = true;
      break;
    }
    ++t;
    start = now_seconds();
    out = repeated_iter(population, epsilon_next, array, priors, config, seed);
    rec = record_of(out, epsilon_next, now_seconds() - start);
    result.trace.records.push_back(rec);
    if (observer) observer(out.population, rec);
    epsilon_t = epsilon_next;
    epsilon_next = out.epsilon_next;
    population = std::move(out.population);
  }

  result.final_population = std::move(population);
  return result;
}

}  // namespace plumeloc
