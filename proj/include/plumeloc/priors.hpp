#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plumeloc/dispersion.hpp"
#include "plumeloc/rng.hpp"

namespace plumeloc {

/// Prior over one scalar parameter.
///
/// Gamma is parameterised by (shape k, scale eta) with mean k*eta. This is
/// NOT the shape/rate convention; mixing the two silently corrupts every
/// downstream result, so the parameterisation is fixed here once.
///
/// Fixed pins a parameter to a point value: it samples as the constant and
/// contributes zero to the log density. Proposal kernels skip fixed
/// components entirely, which is what makes reduced toy problems (a single
/// free parameter inside a full model) work.
class ScalarPrior {
 public:
  enum class Kind { Uniform, Gamma, Beta, Fixed };

  static ScalarPrior uniform(double a, double b);
  static ScalarPrior gamma(double shape, double scale);
  static ScalarPrior beta(double p, double q);
  static ScalarPrior fixed(double value);

  /// Parses ("uniform", {a,b}), ("gamma", {k,eta}), ("beta", {p,q}),
  /// ("fixed", {v}). Throws ValidationError on anything else.
  static ScalarPrior from_kind(std::string_view kind, std::span<const double> params);

  Kind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  bool is_fixed() const { return kind_ == Kind::Fixed; }

  double sample(RngStream& rng) const;

  /// Log density at x; -infinity outside the support. Fixed contributes 0 at
  /// its point value (a point mass carries no density in the free subspace).
  double log_density(double x) const;

  /// True if every samplable value lies inside the domain.
  bool support_within(const ParamDomain& domain) const;

  std::string kind_name() const;
  std::vector<double> kind_params() const;

  friend bool operator==(const ScalarPrior&, const ScalarPrior&) = default;

 private:
  ScalarPrior(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

/// Ordered per-parameter priors for one model; order matches param_names.
struct ModelPriorSpec {
  ModelId model = ModelId::GaussianLinear;
  std::vector<std::pair<std::string, ScalarPrior>> components;

  std::size_t dim() const { return components.size(); }

  /// Indices of the non-fixed components (the sampled subspace).
  std::vector<std::size_t> free_indices() const;

  void sample(RngStream& rng, std::span<double> out) const;
  double log_density(std::span<const double> theta) const;

  /// Replaces the prior of a named parameter; throws ValidationError if the
  /// model has no such parameter or the support leaves the domain.
  void replace(std::string_view name, const ScalarPrior& prior);

  /// Checks entry count and every support against the parameter domains.
  void validate() const;
};

/// Discrete prior over the candidate models.
struct ModelPrior {
  std::array<double, kNumModels> probabilities{};

  void validate() const;  // non-negative, sums to 1
};

struct PriorSet {
  ModelPrior model_prior;
  std::array<ModelPriorSpec, kNumModels> specs;

  const ModelPriorSpec& spec(ModelId m) const { return specs[model_index(m)]; }
  ModelPriorSpec& spec(ModelId m) { return specs[model_index(m)]; }
};

/// Shipped defaults: uniform model prior and the standard parameter priors
/// (uniform source-location priors, gamma scales, beta exponents).
PriorSet default_prior_set();

/// Uniform model prior restricted to an enabled subset (1-based ids).
ModelPrior uniform_model_prior(std::span<const int> enabled_models);

}  // namespace plumeloc
