#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "plumeloc/abc.hpp"

namespace plumeloc {

struct LocationSample {
  double weight = 0.0;  // within-model normalised weight
  double x = 0.0;       // source x0 (mm)
  double y = 0.0;       // source y0 (mm)
};

/// Per-model projections of the population onto the source-location plane.
struct LocationSampleSet {
  std::array<std::vector<LocationSample>, kNumModels> models;
};

LocationSampleSet extract_locations(const Population& pop);

struct FlatLocationSample {
  int model = 0;         // 1-based model id
  double weight = 0.0;   // model-averaged weight, sums to 1 over the list
  double x = 0.0;
  double y = 0.0;
};

/// Model-averaged location samples: sample i of model m carries weight
/// (L_m / n) * w_m_i.
std::vector<FlatLocationSample> location_posterior_weights(
    const LocationSampleSet& set, const std::array<std::size_t, kNumModels>& counts,
    std::size_t n);

enum class Axis { X, Y };

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 512;
};

struct DensityGrid {
  Axis axis = Axis::X;
  std::vector<double> points;   // ascending grid positions (mm)
  std::vector<double> density;  // >= 0

  double trapezoid_integral() const;
};

/// Weighted 1-D Gaussian KDE of the chosen axis on the grid. Bandwidth is
/// (4/3)^(1/5) * sigma_hat * n_eff^(-1/5) with sigma_hat the weighted standard
/// deviation and n_eff = 1 / sum(w^2); uneven late-iteration weights make the
/// raw count meaningless. Throws ValidationError when every sample sits at
/// one point (degenerate posterior, no bandwidth).
DensityGrid kde_marginal(std::span<const FlatLocationSample> samples, Axis axis,
                         const GridSpec& grid);

struct AxisSummary {
  double mean = 0.0;
  double median = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

struct PosteriorSummary {
  AxisSummary x;
  AxisSummary y;
};

/// Weighted mean, median and central 95% interval per axis. Quantiles invert
/// the cumulative weights with the lower tie rule: the first sample whose
/// cumulative weight reaches the target.
PosteriorSummary summarise(std::span<const FlatLocationSample> samples);

/// Exposed for reuse and testing: lower weighted quantile of (value, weight)
/// pairs; weights need not be normalised.
double weighted_quantile(std::vector<std::pair<double, double>> values, double q);

}  // namespace plumeloc
