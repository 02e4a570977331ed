#pragma once

#include <cstdint>
#include <vector>

#include "plumeloc/dispersion.hpp"

namespace plumeloc {

/// Synthetic dataset layout: `rows` fences of `per_row` sensors, each fence
/// at one downwind position, sensors spread evenly across the y span, all at
/// the same height. Concentrations come from one generating model at known
/// true parameters, optionally wrapped in multiplicative lognormal noise
/// (real tracer sensors see strongly fluctuating concentration fields).
struct ScenarioSpec {
  ModelId model = ModelId::GaussianPower;
  std::vector<double> truth;  // canonical parameter order for `model`
  std::size_t rows = 4;
  std::size_t per_row = 12;
  std::vector<double> row_x;  // downwind fence positions (mm), one per row
  double y_span = 700.0;      // full crosswind extent (mm)
  double sensor_z = 9.3;      // sensor height (mm)

  enum class Noise { None, LognormalMultiplicative };
  Noise noise = Noise::LognormalMultiplicative;
  double sigma_ln = 0.3;

  void validate() const;

  /// Bench-scale default: a source a few hundred mm upstream of four fences
  /// of twelve sensors, generated by the power-law plume at mid-prior values.
  static ScenarioSpec defaults();
};

struct GeneratedScenario {
  SensorArray array;          // sensors plus noisy observations
  std::vector<double> clean;  // noise-free concentrations at the truth
  bool all_upwind = false;    // every sensor upwind of the source (degenerate)
};

GeneratedScenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace plumeloc
