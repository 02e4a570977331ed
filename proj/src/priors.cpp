#include "plumeloc/priors.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"

namespace plumeloc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta_fn(double p, double q) {
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

}  // namespace

ScalarPrior ScalarPrior::uniform(double a, double b) {
  if (!(a < b)) throw ValidationError(fmt::format("uniform prior needs a < b, got [{}, {}]", a, b));
  return {Kind::Uniform, a, b};
}

ScalarPrior ScalarPrior::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ValidationError(
        fmt::format("gamma prior needs shape, scale > 0, got ({}, {})", shape, scale));
  }
  return {Kind::Gamma, shape, scale};
}

ScalarPrior ScalarPrior::beta(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) {
    throw ValidationError(fmt::format("beta prior needs p, q > 0, got ({}, {})", p, q));
  }
  return {Kind::Beta, p, q};
}

ScalarPrior ScalarPrior::fixed(double value) {
  if (!std::isfinite(value)) throw ValidationError("fixed prior needs a finite value");
  return {Kind::Fixed, value, value};
}

ScalarPrior ScalarPrior::from_kind(std::string_view kind, std::span<const double> params) {
  const auto expect = [&](std::size_t n) {
    if (params.size() != n) {
      throw ValidationError(fmt::format("prior kind '{}' expects {} parameters, got {}",
                                        kind, n, params.size()));
    }
  };
  if (kind == "uniform") {
    expect(2);
    return uniform(params[0], params[1]);
  }
  if (kind == "gamma") {
    expect(2);
    return gamma(params[0], params[1]);
  }
  if (kind == "beta") {
    expect(2);
    return beta(params[0], params[1]);
  }
  if (kind == "fixed") {
    expect(1);
    return fixed(params[0]);
  }
  throw ValidationError(fmt::format("unknown prior kind '{}'", kind));
}

double ScalarPrior::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::Uniform: return rng.uniform(a_, b_);
    case Kind::Gamma: return rng.gamma(a_, b_);
    case Kind::Beta: return rng.beta(a_, b_);
    case Kind::Fixed: return a_;
  }
  throw ValidationError("invalid prior kind");
}

double ScalarPrior::log_density(double x) const {
  switch (kind_) {
    case Kind::Uniform:
      if (x < a_ || x > b_) return kNegInf;
      return -std::log(b_ - a_);
    case Kind::Gamma:
      if (!(x > 0.0)) return kNegInf;
      return (a_ - 1.0) * std::log(x) - x / b_ - a_ * std::log(b_) - std::lgamma(a_);
    case Kind::Beta:
      if (!(x > 0.0) || !(x < 1.0)) return kNegInf;
      return (a_ - 1.0) * std::log(x) + (b_ - 1.0) * std::log(1.0 - x) - log_beta_fn(a_, b_);
    case Kind::Fixed:
      return x == a_ ? 0.0 : kNegInf;
  }
  throw ValidationError("invalid prior kind");
}

bool ScalarPrior::support_within(const ParamDomain& domain) const {
  switch (kind_) {
    case Kind::Uniform:
      // Draws are strictly inside (a, b).
      return a_ >= domain.lo && b_ <= domain.hi;
    case Kind::Gamma:
      // Support (0, inf), endpoints never sampled.
      return domain.lo <= 0.0 && domain.hi == std::numeric_limits<double>::infinity();
    case Kind::Beta:
      return domain.lo <= 0.0 && domain.hi >= 1.0;
    case Kind::Fixed:
      return domain.contains(a_);
  }
  return false;
}

std::string ScalarPrior::kind_name() const {
  switch (kind_) {
    case Kind::Uniform: return "uniform";
    case Kind::Gamma: return "gamma";
    case Kind::Beta: return "beta";
    case Kind::Fixed: return "fixed";
  }
  return "?";
}

std::vector<double> ScalarPrior::kind_params() const {
  if (kind_ == Kind::Fixed) return {a_};
  return {a_, b_};
}

std::vector<std::size_t> ModelPriorSpec::free_indices() const {
  std::vector<std::size_t> idx;
  idx.reserve(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (!components[i].second.is_fixed()) idx.push_back(i);
  }
  return idx;
}

void ModelPriorSpec::sample(RngStream& rng, std::span<double> out) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    out[i] = components[i].second.sample(rng);
  }
}

double ModelPriorSpec::log_density(std::span<const double> theta) const {
  if (theta.size() != components.size()) {
    throw ValidationError(fmt::format("parameter vector has {} entries, prior spec has {}",
                                      theta.size(), components.size()));
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    lp += components[i].second.log_density(theta[i]);
    if (lp == kNegInf) return kNegInf;
  }
  return lp;
}

void ModelPriorSpec::replace(std::string_view name, const ScalarPrior& prior) {
  const std::size_t i = param_index(model, name);
  if (!prior.support_within(param_domain(model, i))) {
    throw ValidationError(fmt::format("prior for {} ({}) leaves the parameter domain",
                                      name, prior.kind_name()));
  }
  components[i].second = prior;
}

void ModelPriorSpec::validate() const {
  if (components.size() != param_dim(model)) {
    throw ValidationError(fmt::format("model {} prior spec has {} entries, expected {}",
                                      static_cast<int>(model), components.size(),
                                      param_dim(model)));
  }
  const auto names = param_names(model);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].first != names[i]) {
      throw ValidationError(fmt::format("prior spec entry {} is '{}', expected '{}'", i,
                                        components[i].first, names[i]));
    }
    if (!components[i].second.support_within(param_domain(model, i))) {
      throw ValidationError(fmt::format("prior for {} leaves the parameter domain",
                                        components[i].first));
    }
  }
}

void ModelPrior::validate() const {
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw ValidationError("model prior probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError(fmt::format("model prior sums to {}, expected 1", sum));
  }
}

namespace {

ScalarPrior default_param_prior(std::string_view name) {
  if (name == "x0") return ScalarPrior::uniform(-1000.0, 0.0);
  if (name == "y0") return ScalarPrior::uniform(-500.0, 500.0);
  if (name == "z0") return ScalarPrior::gamma(1.333, 3.0);
  if (name == "sigma0") return ScalarPrior::gamma(15.5, 0.03);
  if (name == "B") return ScalarPrior::gamma(2.0, 2.5);
  if (name == "alpha") return ScalarPrior::gamma(3.0, 0.5);
  if (name == "beta") return ScalarPrior::gamma(1.667, 0.15);
  if (name == "phi") return ScalarPrior::gamma(1.667, 0.15);
  if (name == "rho") return ScalarPrior::gamma(6.0, 1.0);
  if (name == "mu") return ScalarPrior::beta(1.5, 3.0);
  if (name == "gamma") return ScalarPrior::beta(3.0, 3.0);
  if (name == "nu") return ScalarPrior::beta(6.0, 6.0);
  throw ValidationError(fmt::format("no default prior for parameter '{}'", name));
}

}  // namespace

PriorSet default_prior_set() {
  PriorSet set;
  set.model_prior.probabilities = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (int m = 1; m <= kNumModels; ++m) {
    const ModelId id = static_cast<ModelId>(m);
    ModelPriorSpec spec;
    spec.model = id;
    for (const auto name : param_names(id)) {
      spec.components.emplace_back(std::string(name), default_param_prior(name));
    }
    set.specs[model_index(id)] = std::move(spec);
  }
  return set;
}

ModelPrior uniform_model_prior(std::span<const int> enabled_models) {
  if (enabled_models.empty()) throw ValidationError("enabled model set is empty");
  ModelPrior prior;
  prior.probabilities.fill(0.0);
  for (int m : enabled_models) {
    prior.probabilities[model_index(model_from_int(m))] =
        1.0 / static_cast<double>(enabled_models.size());
  }
  return prior;
}

}  // namespace plumeloc
