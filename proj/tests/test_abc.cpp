#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <doctest.h>

#include "plumeloc/abc.hpp"
#include "plumeloc/errors.hpp"
#include "plumeloc/rng.hpp"

using namespace plumeloc;

namespace {

// Single sensor, model 1, only x0 free; everything an x0 toy needs.
struct ToyProblem {
  SensorArray array;
  PriorSet priors;
  std::vector<double> truth{-373.5, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25};

  ToyProblem() {
    array.sensors = {{0.0, 0.0, 9.3}};
    array.observed = predict_all(ModelId::GaussianLinear, truth, array);
    priors = default_prior_set();
    priors.model_prior = uniform_model_prior(std::vector<int>{1});
    auto& spec = priors.spec(ModelId::GaussianLinear);
    const auto names = param_names(ModelId::GaussianLinear);
    for (std::size_t i = 1; i < names.size(); ++i) {
      spec.replace(names[i], ScalarPrior::fixed(truth[i]));
    }
  }

  double dist_at(double x0) const {
    auto theta = truth;
    theta[0] = x0;
    const auto pred = predict_all(ModelId::GaussianLinear, theta, array);
    return distance(array.observed, pred);
  }
};

}  // namespace

TEST_CASE("distance: identity, hand value, errors, loop oracle") {
  const std::vector<double> z{1.0, 2.0, 3.0};
  CHECK(distance(z, z) == 0.0);
  CHECK(distance(z, std::vector<double>{0.0, 0.0, 0.0}) == 14.0);
  CHECK_THROWS_AS(distance(z, std::vector<double>{1.0, 2.0}), UsageError);
  CHECK_THROWS_AS(distance(std::vector<double>{}, std::vector<double>{}), UsageError);

  // 48-sensor observed vector against a model-1 prediction at prior means,
  // checked against a separate accumulation loop.
  SensorArray array;
  RngStream rng(99);
  for (int i = 0; i < 48; ++i) {
    array.sensors.push_back({rng.uniform(0.0, 1000.0), rng.uniform(-350.0, 350.0), 9.3});
  }
  const std::vector<double> means{-500.0, 0.0, 3.999, 0.465, 5.0, 1.5, 0.25005};
  const auto pred = predict_all(ModelId::GaussianLinear, means, array);
  std::vector<double> observed(48);
  for (auto& o : observed) o = rng.uniform(0.0, 2e-4);
  double oracle = 0.0;
  for (int s = 0; s < 48; ++s) {
    oracle += (observed[s] - pred[s]) * (observed[s] - pred[s]);
  }
  CHECK(distance(observed, pred) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("model_probabilities: point mass, simple split, exact unit sum") {
  Population pop;
  pop.models[1].resize(10, WeightedSample{0.1, {0.0}, 0.0});
  CHECK(model_probabilities(pop) == std::array<double, 3>{0.0, 1.0, 0.0});

  Population split;
  split.models[0].resize(250, WeightedSample{1.0 / 250, {0.0}, 0.0});
  split.models[1].resize(500, WeightedSample{1.0 / 500, {0.0}, 0.0});
  split.models[2].resize(250, WeightedSample{1.0 / 250, {0.0}, 0.0});
  CHECK(model_probabilities(split) == std::array<double, 3>{0.25, 0.5, 0.25});

  RngStream rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Population p;
    for (int m = 0; m < 3; ++m) {
      p.models[m].resize(static_cast<std::size_t>(rng.uniform01() * 400.0),
                         WeightedSample{0.0, {0.0}, 0.0});
    }
    if (p.total_size() == 0) continue;
    const auto probs = model_probabilities(p);
    CHECK(probs[0] + probs[1] + probs[2] == 1.0);
    for (int m = 0; m < 3; ++m) {
      if (p.models[m].empty()) CHECK(probs[m] == 0.0);
    }
  }
}

TEST_CASE("rejection with infinite tolerance is multinomial over the model prior") {
  ToyProblem toy;
  toy.priors.model_prior = uniform_model_prior(std::vector<int>{1, 2, 3});
  const std::size_t n = 4000;
  const auto result = rejection_sample(toy.array, toy.priors, kInfTolerance, n, 17);
  CHECK(result.stats.proposals == n);
  CHECK(result.stats.acceptance_rate() == 1.0);
  CHECK(result.population.total_size() == n);
  CHECK(result.population.tolerance == kInfTolerance);
  for (int m = 0; m < 3; ++m) {
    const double pm = 1.0 / 3.0;
    const double se = std::sqrt(pm * (1.0 - pm) / static_cast<double>(n));
    const double freq =
        static_cast<double>(result.population.models[m].size()) / static_cast<double>(n);
    CHECK(std::abs(freq - pm) < 4.0 * se);
    // Rejection output is unweighted: uniform 1/L_m within each model.
    for (const auto& s : result.population.models[m]) {
      CHECK(s.weight ==
            doctest::Approx(1.0 / result.population.models[m].size()).epsilon(1e-15));
    }
  }
}

TEST_CASE("zero tolerance against continuous observations aborts on the floor") {
  ToyProblem toy;
  SamplerOptions options;
  options.floor_window = 20000;  // shrink the window so the test is quick
  options.acceptance_floor = 1e-6;
  CHECK_THROWS_AS(rejection_sample(toy.array, toy.priors, 0.0, 10, 3, options),
                  SamplerAbort);
  try {
    rejection_sample(toy.array, toy.priors, 0.0, 10, 3, options);
  } catch (const SamplerAbort& e) {
    CHECK(std::string(e.what()).find("tolerance 0") != std::string::npos);
  }
}

TEST_CASE("accepted samples satisfy distance <= epsilon and record it") {
  ToyProblem toy;
  const double eps = 1e-9;
  const auto result = rejection_sample(toy.array, toy.priors, eps, 500, 21);
  for (const auto& model : result.population.models) {
    for (const auto& s : model) {
      CHECK(s.distance <= eps);
      CHECK(s.distance == toy.dist_at(s.theta[0]));
    }
  }
}

TEST_CASE("one-parameter toy matches the dense-grid acceptance-region oracle") {
  ToyProblem toy;
  const double c_true = toy.array.observed[0];
  const double eps = (0.5 * c_true) * (0.5 * c_true);
  const std::size_t n = 5000;
  const auto result = rejection_sample(toy.array, toy.priors, eps, n, 29);

  // Oracle: the acceptance region {x0 : d(x0) <= eps} on a dense grid, and
  // the prior-restricted (uniform) distribution over it.
  const std::size_t grid_n = 200000;
  std::vector<double> grid_x(grid_n), accepted_mass(grid_n, 0.0);
  double total_mass = 0.0;
  for (std::size_t i = 0; i < grid_n; ++i) {
    grid_x[i] = -1000.0 + 1000.0 * (static_cast<double>(i) + 0.5) / grid_n;
    if (toy.dist_at(grid_x[i]) <= eps) {
      accepted_mass[i] = 1.0;
      total_mass += 1.0;
    }
  }
  REQUIRE(total_mass > 0.0);

  std::vector<double> samples;
  for (const auto& s : result.population.models[0]) samples.push_back(s.theta[0]);
  REQUIRE(samples.size() == n);
  std::sort(samples.begin(), samples.end());

  double ks = 0.0;
  double cum = 0.0;
  std::size_t gi = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    while (gi < grid_n && grid_x[gi] <= samples[i]) cum += accepted_mass[gi++] / total_mass;
    ks = std::max(ks, std::abs(cum - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(cum - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.05);
}

TEST_CASE("acceptance rate is non-increasing in the tolerance") {
  ToyProblem toy;
  const double c_true = toy.array.observed[0];
  const double eps_hi = (0.6 * c_true) * (0.6 * c_true);
  const double eps_lo = (0.3 * c_true) * (0.3 * c_true);
  const std::size_t n = 1500;
  const auto hi = rejection_sample(toy.array, toy.priors, eps_hi, n, 31);
  const auto lo = rejection_sample(toy.array, toy.priors, eps_lo, n, 31);
  const double rate_hi = hi.stats.acceptance_rate();
  const double rate_lo = lo.stats.acceptance_rate();
  const double se =
      std::sqrt(rate_hi * (1.0 - rate_hi) / static_cast<double>(hi.stats.proposals));
  CHECK(rate_lo <= rate_hi + 3.0 * se);
}

TEST_CASE("deterministic given the seed; thread count changes nothing") {
  ToyProblem toy;
  const double eps = (0.5 * toy.array.observed[0]) * (0.5 * toy.array.observed[0]);
  const auto a = rejection_sample(toy.array, toy.priors, eps, 400, 37);
  const auto b = rejection_sample(toy.array, toy.priors, eps, 400, 37);
  CHECK(a.population == b.population);
  CHECK(a.stats.proposals == b.stats.proposals);

  SamplerOptions parallel;
  parallel.threads = 4;
  const auto c = rejection_sample(toy.array, toy.priors, eps, 400, 37, parallel);
  CHECK(a.population == c.population);
  CHECK(a.stats.proposals == c.stats.proposals);

  const auto d = rejection_sample(toy.array, toy.priors, eps, 400, 38);
  CHECK(a.population != d.population);
}

TEST_CASE("input validation") {
  ToyProblem toy;
  SensorArray no_obs;
  no_obs.sensors = toy.array.sensors;
  CHECK_THROWS_AS(rejection_sample(no_obs, toy.priors, 1.0, 10, 1), ValidationError);
  CHECK_THROWS_AS(rejection_sample(toy.array, toy.priors, -1.0, 10, 1), ValidationError);
  CHECK_THROWS_AS(rejection_sample(toy.array, toy.priors, 1.0, 0, 1), ValidationError);
}
