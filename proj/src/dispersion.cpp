#include "plumeloc/dispersion.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"

namespace plumeloc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 7> kNamesM1 = {
    "x0", "y0", "z0", "sigma0", "B", "alpha", "beta"};
constexpr std::array<std::string_view, 9> kNamesM2 = {
    "x0", "y0", "z0", "sigma0", "B", "alpha", "beta", "rho", "gamma"};
constexpr std::array<std::string_view, 10> kNamesM3 = {
    "x0", "y0", "z0", "sigma0", "B", "alpha", "phi", "rho", "mu", "nu"};

ParamDomain domain_for_name(std::string_view name) {
  if (name == "x0" || name == "y0") return {-kInf, kInf, true, true};
  if (name == "z0") return {0.0, kInf, false, true};
  if (name == "gamma" || name == "nu") return {0.0, 1.0, true, true};
  if (name == "mu") return {0.0, 1.0, false, false};
  // sigma0, B, alpha, beta, phi, rho: strictly positive scales
  return {0.0, kInf, true, true};
}

double saturate(double c) {
  if (std::isnan(c)) return kConcentrationCap;
  return std::fmin(c, kConcentrationCap);
}

// Shared Gaussian-plume evaluation once the spreads are known.
double gaussian_plume(double b, double sy, double sz, double dy, double zs,
                      double z0) {
  const double cross = std::exp(-(dy * dy) / (2.0 * sy * sy));
  const double zm = zs - z0;
  const double zp = zs + z0;
  const double vert = std::exp(-(zm * zm) / (2.0 * sz * sz)) +
                      std::exp(-(zp * zp) / (2.0 * sz * sz));
  const double c = b / (2.0 * kPi * sy * sz) * cross * vert;
  return saturate(c);
}

}  // namespace

ModelId model_from_int(int m) {
  if (m < 1 || m > kNumModels) {
    throw ValidationError(fmt::format("model id must be 1..{}, got {}", kNumModels, m));
  }
  return static_cast<ModelId>(m);
}

void SensorArray::validate() const {
  if (sensors.empty()) throw ValidationError("sensor array is empty");
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    const auto& loc = sensors[s];
    if (!std::isfinite(loc.x) || !std::isfinite(loc.y) || !std::isfinite(loc.z)) {
      throw ValidationError(fmt::format("sensor {}: non-finite coordinate", s + 1));
    }
    if (loc.z < 0.0) {
      throw ValidationError(fmt::format("sensor {}: height {} below ground", s + 1, loc.z));
    }
  }
  if (!observed.empty()) {
    if (observed.size() != sensors.size()) {
      throw ValidationError(fmt::format("observed vector has {} entries for {} sensors",
                                        observed.size(), sensors.size()));
    }
    for (std::size_t s = 0; s < observed.size(); ++s) {
      if (!std::isfinite(observed[s]) || observed[s] < 0.0) {
        throw ValidationError(
            fmt::format("observation {}: concentration {} is not finite and non-negative",
                        s + 1, observed[s]));
      }
    }
  }
}

GaussianLinearParams GaussianLinearParams::from_vector(std::span<const double> t) {
  return {t[0], t[1], t[2], t[3], t[4], t[5], t[6]};
}

GaussianPowerParams GaussianPowerParams::from_vector(std::span<const double> t) {
  return {t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7], t[8]};
}

StretchExpParams StretchExpParams::from_vector(std::span<const double> t) {
  return {t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7], t[8], t[9]};
}

double predict_gaussian_linear(const GaussianLinearParams& p, const SensorLocation& s) {
  const double dx = s.x - p.x0;
  if (!(dx > 0.0)) return 0.0;
  const double sy = p.sigma0 + p.alpha * dx;
  const double sz = p.sigma0 + p.beta * dx;
  return gaussian_plume(p.b, sy, sz, s.y - p.y0, s.z, p.z0);
}

double predict_gaussian_power(const GaussianPowerParams& p, const SensorLocation& s) {
  const double dx = s.x - p.x0;
  if (!(dx > 0.0)) return 0.0;
  const double sy = p.sigma0 + p.alpha * p.rho * std::pow(dx / p.rho, p.gamma);
  const double sz = p.sigma0 + p.beta * dx;
  return gaussian_plume(p.b, sy, sz, s.y - p.y0, s.z, p.z0);
}

double predict_stretch_exp(const StretchExpParams& p, const SensorLocation& s) {
  const double dx = s.x - p.x0;
  if (!(dx > 0.0)) return 0.0;
  const double r = p.r();
  const double tau = p.tau();
  const double sy = p.sigma0 + p.alpha * p.rho * std::sqrt(dx / p.rho);
  const double sz = p.sigma0 + p.phi * p.rho * std::pow(r, 2.0 / r) * std::pow(dx / p.rho, 1.0 / r);

  const double zr = std::pow(s.z, r);
  const double z0r = std::pow(p.z0, r);
  const double szr = std::pow(sz, r);
  // Vertical bracket in log space; a >= b because z0^r >= 0.
  const double a = -(zr - z0r) / szr;
  const double bb = -(zr + z0r) / szr;
  const double log_bracket = a + std::log1p(std::exp(bb - a));

  // Power-law prefactor can overflow near dx -> 0; keep it in log space and
  // saturate, so rejection sees a huge finite distance instead of NaN/inf.
  const double log_pref = std::log(p.b) - std::log(2.0) - 2.0 * std::log(p.rho) +
                          tau * (std::log(p.rho) - std::log(dx));
  const double log_vert = log_pref + log_bracket;
  if (std::isnan(log_vert)) return kConcentrationCap;

  const double dy = s.y - p.y0;
  const double cross_exponent = -(dy * dy) / (2.0 * sy * sy);
  if (log_vert > kLogConcentrationCap) {
    // Crosswind decay may still pull an overflowing prefactor back into range.
    const double log_c = log_vert + cross_exponent;
    if (std::isnan(log_c) || log_c > kLogConcentrationCap) return kConcentrationCap;
    return std::exp(log_c);
  }
  return saturate(std::exp(log_vert) * std::exp(cross_exponent));
}

std::size_t param_dim(ModelId m) {
  switch (m) {
    case ModelId::GaussianLinear: return kNamesM1.size();
    case ModelId::GaussianPower: return kNamesM2.size();
    case ModelId::StretchExp: return kNamesM3.size();
  }
  throw ValidationError("invalid model id");
}

std::span<const std::string_view> param_names(ModelId m) {
  switch (m) {
    case ModelId::GaussianLinear: return kNamesM1;
    case ModelId::GaussianPower: return kNamesM2;
    case ModelId::StretchExp: return kNamesM3;
  }
  throw ValidationError("invalid model id");
}

std::size_t param_index(ModelId m, std::string_view name) {
  const auto names = param_names(m);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ValidationError(fmt::format("model {} has no parameter named '{}'",
                                    static_cast<int>(m), name));
}

ParamDomain param_domain(ModelId m, std::size_t index) {
  return domain_for_name(param_names(m)[index]);
}

void validate_params(ModelId m, std::span<const double> theta) {
  const auto names = param_names(m);
  if (theta.size() != names.size()) {
    throw ValidationError(fmt::format("model {} expects {} parameters, got {}",
                                      static_cast<int>(m), names.size(), theta.size()));
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i]) || !domain_for_name(names[i]).contains(theta[i])) {
      throw ValidationError(fmt::format("parameter {} = {} outside its domain",
                                        names[i], theta[i]));
    }
  }
}

void predict_all_into(ModelId m, std::span<const double> theta,
                      const SensorArray& array, std::span<double> out) {
  if (theta.size() != param_dim(m)) {
    throw ValidationError(fmt::format("model {} expects {} parameters, got {}",
                                      static_cast<int>(m), param_dim(m), theta.size()));
  }
  switch (m) {
    case ModelId::GaussianLinear: {
      const auto p = GaussianLinearParams::from_vector(theta);
      for (std::size_t s = 0; s < array.size(); ++s) {
        out[s] = predict_gaussian_linear(p, array.sensors[s]);
      }
      return;
    }
    case ModelId::GaussianPower: {
      const auto p = GaussianPowerParams::from_vector(theta);
      for (std::size_t s = 0; s < array.size(); ++s) {
        out[s] = predict_gaussian_power(p, array.sensors[s]);
      }
      return;
    }
    case ModelId::StretchExp: {
      const auto p = StretchExpParams::from_vector(theta);
      for (std::size_t s = 0; s < array.size(); ++s) {
        out[s] = predict_stretch_exp(p, array.sensors[s]);
      }
      return;
    }
  }
  throw ValidationError("invalid model id");
}

std::vector<double> predict_all(ModelId m, std::span<const double> theta,
                                const SensorArray& array) {
  std::vector<double> out(array.size());
  predict_all_into(m, theta, array, out);
  return out;
}

}  // namespace plumeloc
