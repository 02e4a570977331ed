#pragma once

#include <filesystem>
#include <span>

#include "plumeloc/posterior.hpp"
#include "plumeloc/run_config.hpp"
#include "plumeloc/smc.hpp"

namespace plumeloc {

/// Run-directory layout (all CSVs carry header rows and reload losslessly):
///   trace.csv                   per-iteration tolerance/count/probability rows
///   timings.csv                 per-iteration wall clock; not reproducible,
///                               excluded from the determinism contract
///   population_t<t>_m<m>.csv    weight, distance, parameter columns
///   locations.csv               model-averaged location samples
///   marginal_x.csv marginal_y.csv  KDE density grids
///   summary.csv                 per-axis mean/median/95% interval
///   config_echo                 resolved configuration (JSON)

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);
RunTrace read_trace_csv(const std::filesystem::path& path);

void write_timings_csv(const std::filesystem::path& path, const RunTrace& trace);

void write_population_csv(const std::filesystem::path& path,
                          std::span<const WeightedSample> samples, ModelId model);
std::vector<WeightedSample> read_population_csv(const std::filesystem::path& path,
                                                ModelId model);

/// Writes population_t<t>_m<m>.csv for every model (empty ones included).
void write_population_set(const std::filesystem::path& dir, const Population& pop);
Population read_population_set(const std::filesystem::path& dir, int iteration);

struct PosteriorArtifacts {
  std::vector<FlatLocationSample> locations;
  DensityGrid marginal_x;
  DensityGrid marginal_y;
  PosteriorSummary summary;
};

/// Grid covering an axis: the union of the enabled models' uniform/fixed
/// location-prior supports when available, otherwise the sample range with
/// 10% padding.
GridSpec axis_grid_spec(const PriorSet& priors, std::span<const int> models,
                        std::span<const FlatLocationSample> samples, Axis axis,
                        std::size_t points);

PosteriorArtifacts summarise_population(const Population& pop, const PriorSet& priors,
                                        std::span<const int> models,
                                        std::size_t grid_points);

void write_posterior_artifacts(const std::filesystem::path& dir,
                               const PosteriorArtifacts& artifacts);

/// Reads a completed run directory (trace + final populations + config echo)
/// and writes posterior artifacts into out_dir.
void summarise_run_dir(const std::filesystem::path& run_dir,
                       const std::filesystem::path& out_dir,
                       std::size_t grid_points_override = 0);

}  // namespace plumeloc
