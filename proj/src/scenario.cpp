#include "plumeloc/scenario.hpp"

#include <cmath>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"
#include "plumeloc/rng.hpp"

namespace plumeloc {

void ScenarioSpec::validate() const {
  validate_params(model, truth);
  if (rows < 1 || per_row < 1) throw ValidationError("scenario needs rows, per_row >= 1");
  if (row_x.size() != rows) {
    throw ValidationError(fmt::format("scenario has {} row positions for {} rows",
                                      row_x.size(), rows));
  }
  if (!(y_span >= 0.0)) throw ValidationError("scenario y_span must be >= 0");
  if (sensor_z < 0.0) throw ValidationError("scenario sensor height must be >= 0");
  if (noise == Noise::LognormalMultiplicative && !(sigma_ln > 0.0)) {
    throw ValidationError("lognormal noise needs sigma_ln > 0");
  }
}

ScenarioSpec ScenarioSpec::defaults() {
  ScenarioSpec spec;
  spec.model = ModelId::GaussianPower;
  spec.truth = {-373.5, 0.0, 4.0, 0.465, 5.0, 1.5, 0.25, 6.0, 0.5};
  spec.rows = 4;
  spec.per_row = 12;
  spec.row_x = {250.0, 500.0, 750.0, 1000.0};
  spec.y_span = 700.0;
  spec.sensor_z = 9.3;
  spec.noise = Noise::LognormalMultiplicative;
  spec.sigma_ln = 0.3;
  return spec;
}

GeneratedScenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();

  GeneratedScenario out;
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.per_row; ++c) {
      SensorLocation loc;
      loc.x = spec.row_x[r];
      loc.y = spec.per_row == 1
                  ? 0.0
                  : -spec.y_span / 2.0 + spec.y_span * static_cast<double>(c) /
                                             static_cast<double>(spec.per_row - 1);
      loc.z = spec.sensor_z;
      out.array.sensors.push_back(loc);
    }
  }

  out.clean = predict_all(spec.model, spec.truth, out.array);

  out.all_upwind = true;
  const double x0 = spec.truth[0];
  for (const auto& s : out.array.sensors) {
    if (s.x > x0) {
      out.all_upwind = false;
      break;
    }
  }

  out.array.observed = out.clean;
  if (spec.noise == ScenarioSpec::Noise::LognormalMultiplicative) {
    RngStream rng(seed, 0, 0);
    for (auto& value : out.array.observed) {
      const double z = rng.normal01();
      value *= std::exp(spec.sigma_ln * z);
    }
  }
  return out;
}

}  // namespace plumeloc
