#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plumeloc/priors.hpp"
#include "plumeloc/scenario.hpp"
#include "plumeloc/smc.hpp"

namespace plumeloc {

struct PriorOverride {
  int model = 0;               // 1-based
  std::string param;           // parameter name within that model
  std::string kind;            // uniform | gamma | beta | fixed
  std::vector<double> params;  // kind-specific parameters
};

/// Fully resolved run configuration. Everything that can change a result is
/// here and lands in the config echo; re-running from the echo reproduces
/// outputs byte for byte (sequential mode).
struct RunConfig {
  std::string mode;     // generate | reject | run | summarise
  std::string dataset;  // input dataset path (reject/run)
  std::string out;      // output directory
  std::optional<std::uint64_t> seed;  // mandatory for stochastic modes; never defaulted
  std::vector<int> models = {1, 2, 3};
  SmcConfig smc;
  std::optional<double> epsilon;  // reject mode tolerance
  std::size_t grid_points = 512;
  std::vector<PriorOverride> prior_overrides;
  std::optional<ScenarioSpec> scenario;  // generate mode

  /// Structural checks plus mode-specific requirements.
  void validate() const;
};

/// Priors for this run: defaults, then overrides, with the model prior
/// uniform over the enabled models.
PriorSet resolve_priors(const RunConfig& config);

RunConfig load_config(const std::filesystem::path& path);

/// Writes the full resolved configuration (including the per-parameter
/// priors actually in effect) as JSON.
void write_config_echo(const std::filesystem::path& path, const RunConfig& config,
                       const PriorSet& resolved);

}  // namespace plumeloc
