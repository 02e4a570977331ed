#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace plumeloc {

inline constexpr int kNumModels = 3;

/// Candidate mean-concentration models. The wind is aligned with +x; all
/// lengths are millimetres and concentrations are relative (dimensionless).
enum class ModelId : int {
  GaussianLinear = 1,  ///< Gaussian plume, spreads linear in downwind distance
  GaussianPower = 2,   ///< Gaussian plume, crosswind spread a power law
  StretchExp = 3,      ///< stretched-exponential vertical profile
};

/// Throws ValidationError unless m is 1, 2 or 3.
ModelId model_from_int(int m);

inline int model_index(ModelId m) { return static_cast<int>(m) - 1; }

struct SensorLocation {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // height above ground, >= 0
};

/// Known sensor positions plus, optionally, the measured concentrations.
struct SensorArray {
  std::vector<SensorLocation> sensors;
  std::vector<double> observed;  // empty, or exactly one entry per sensor

  std::size_t size() const { return sensors.size(); }
  bool has_observed() const { return !observed.empty(); }

  /// Throws ValidationError on violated invariants (sizes, signs, NaNs).
  void validate() const;
};

struct GaussianLinearParams {
  double x0, y0, z0;  // source location
  double sigma0;      // source size, > 0
  double b;           // release rate over wind speed, > 0
  double alpha;       // crosswind velocity fluctuation ratio, > 0
  double beta;        // vertical velocity fluctuation ratio, > 0

  static GaussianLinearParams from_vector(std::span<const double> theta);
};

struct GaussianPowerParams {
  double x0, y0, z0;
  double sigma0;
  double b;
  double alpha;
  double beta;
  double rho;    // effective roughness, > 0
  double gamma;  // crosswind spread exponent, in (0,1)

  static GaussianPowerParams from_vector(std::span<const double> theta);
};

struct StretchExpParams {
  double x0, y0, z0;
  double sigma0;
  double b;
  double alpha;
  double phi;  // vertical spread coefficient, > 0
  double rho;  // effective roughness, > 0
  double mu;   // wind-profile exponent, in [0,1]
  double nu;   // centreline decay offset, in (0,1)

  double r() const { return 1.0 + 2.0 * mu; }
  double tau() const { return nu + (1.0 + mu) / (1.0 + 2.0 * mu); }

  static StretchExpParams from_vector(std::span<const double> theta);
};

/// Predictions are saturated at exp(kLogConcentrationCap) instead of
/// overflowing: the cap is far above any physical concentration yet small
/// enough that squared-error sums over any realistic sensor count stay
/// finite. NaN never escapes.
inline constexpr double kLogConcentrationCap = 338.0;
inline const double kConcentrationCap = std::exp(kLogConcentrationCap);

double predict_gaussian_linear(const GaussianLinearParams& p, const SensorLocation& s);
double predict_gaussian_power(const GaussianPowerParams& p, const SensorLocation& s);
double predict_stretch_exp(const StretchExpParams& p, const SensorLocation& s);

std::size_t param_dim(ModelId m);

/// Canonical parameter ordering per model; CSV columns and prior specs use
/// these names.
std::span<const std::string_view> param_names(ModelId m);

/// Index of a named parameter in the model's canonical ordering.
/// Throws ValidationError for unknown names.
std::size_t param_index(ModelId m, std::string_view name);

/// Admissible range of one parameter (prior supports must stay inside it).
struct ParamDomain {
  double lo;
  double hi;
  bool lo_open;
  bool hi_open;

  bool contains(double v) const {
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    return true;
  }
};

ParamDomain param_domain(ModelId m, std::size_t index);

/// Throws ValidationError if theta has the wrong dimension or violates the
/// model's parameter domains. Sampler-internal draws skip this: prior
/// supports are confined to the domains by construction.
void validate_params(ModelId m, std::span<const double> theta);

/// Mean concentration at every sensor, in sensor order.
void predict_all_into(ModelId m, std::span<const double> theta,
                      const SensorArray& array, std::span<double> out);
std::vector<double> predict_all(ModelId m, std::span<const double> theta,
                                const SensorArray& array);

}  // namespace plumeloc
