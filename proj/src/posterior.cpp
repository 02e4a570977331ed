#include "plumeloc/posterior.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "plumeloc/errors.hpp"

namespace plumeloc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double axis_value(const FlatLocationSample& s, Axis axis) {
  return axis == Axis::X ? s.x : s.y;
}

}  // namespace

LocationSampleSet extract_locations(const Population& pop) {
  if (pop.total_size() == 0) throw ValidationError("extract_locations: empty population");
  LocationSampleSet set;
  for (int mi = 0; mi < kNumModels; ++mi) {
    set.models[mi].reserve(pop.models[mi].size());
    for (const auto& sample : pop.models[mi]) {
      set.models[mi].push_back(LocationSample{sample.weight, sample.theta[0], sample.theta[1]});
    }
  }
  return set;
}

std::vector<FlatLocationSample> location_posterior_weights(
    const LocationSampleSet& set, const std::array<std::size_t, kNumModels>& counts,
    std::size_t n) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total != n) {
    throw ValidationError(fmt::format("model counts sum to {}, expected {}", total, n));
  }
  std::vector<FlatLocationSample> flat;
  flat.reserve(n);
  for (int mi = 0; mi < kNumModels; ++mi) {
    if (set.models[mi].size() != counts[mi]) {
      throw ValidationError(fmt::format("model {} has {} location samples, count says {}",
                                        mi + 1, set.models[mi].size(), counts[mi]));
    }
    const double model_prob = static_cast<double>(counts[mi]) / static_cast<double>(n);
    for (const auto& s : set.models[mi]) {
      flat.push_back(FlatLocationSample{mi + 1, model_prob * s.weight, s.x, s.y});
    }
  }
  return flat;
}

double DensityGrid::trapezoid_integral() const {
  double integral = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    integral += 0.5 * (density[i - 1] + density[i]) * (points[i] - points[i - 1]);
  }
  return integral;
}

DensityGrid kde_marginal(std::span<const FlatLocationSample> samples, Axis axis,
                         const GridSpec& grid) {
  if (samples.size() < 2) throw ValidationError("kde_marginal: need at least two samples");
  if (grid.points < 2 || !(grid.hi > grid.lo)) {
    throw ValidationError("kde_marginal: invalid grid specification");
  }

  double wsum = 0.0, mean = 0.0;
  for (const auto& s : samples) {
    wsum += s.weight;
    mean += s.weight * axis_value(s, axis);
  }
  if (!(wsum > 0.0)) throw ValidationError("kde_marginal: weights sum to zero");
  mean /= wsum;

  double var = 0.0, sq = 0.0;
  for (const auto& s : samples) {
    const double dv = axis_value(s, axis) - mean;
    var += (s.weight / wsum) * dv * dv;
    sq += (s.weight / wsum) * (s.weight / wsum);
  }
  if (!(var > 0.0)) {
    throw ValidationError("kde_marginal: all samples coincide (degenerate posterior)");
  }
  const double sigma = std::sqrt(var);
  const double n_eff = 1.0 / sq;
  const double h = std::pow(4.0 / 3.0, 0.2) * sigma * std::pow(n_eff, -0.2);

  DensityGrid out;
  out.axis = axis;
  out.points.resize(grid.points);
  out.density.assign(grid.points, 0.0);
  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
  for (std::size_t i = 0; i < grid.points; ++i) {
    out.points[i] = grid.lo + step * static_cast<double>(i);
  }
  const double norm = 1.0 / (std::sqrt(kTwoPi) * h * wsum);
  for (std::size_t i = 0; i < grid.points; ++i) {
    double acc = 0.0;
    for (const auto& s : samples) {
      const double u = (out.points[i] - axis_value(s, axis)) / h;
      acc += s.weight * std::exp(-0.5 * u * u);
    }
    out.density[i] = acc * norm;
  }
  return out;
}

double weighted_quantile(std::vector<std::pair<double, double>> values, double q) {
  if (values.empty()) throw ValidationError("weighted_quantile: no samples");
  std::sort(values.begin(), values.end());
  double wsum = 0.0;
  for (const auto& [v, w] : values) wsum += w;
  if (!(wsum > 0.0)) throw ValidationError("weighted_quantile: weights sum to zero");
  const double target = q * wsum;
  double cum = 0.0;
  for (const auto& [v, w] : values) {
    cum += w;
    if (cum >= target) return v;
  }
  return values.back().first;
}

namespace {

AxisSummary summarise_axis(std::span<const FlatLocationSample> samples, Axis axis) {
  double wsum = 0.0, mean = 0.0;
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(samples.size());
  for (const auto& s : samples) {
    wsum += s.weight;
    mean += s.weight * axis_value(s, axis);
    pairs.emplace_back(axis_value(s, axis), s.weight);
  }
  AxisSummary out;
  out.mean = mean / wsum;
  out.median = weighted_quantile(pairs, 0.5);
  out.lo95 = weighted_quantile(pairs, 0.025);
  out.hi95 = weighted_quantile(std::move(pairs), 0.975);
  return out;
}

}  // namespace

PosteriorSummary summarise(std::span<const FlatLocationSample> samples) {
  if (samples.empty()) throw ValidationError("summarise: no samples");
  return {summarise_axis(samples, Axis::X), summarise_axis(samples, Axis::Y)};
}

}  // namespace plumeloc
