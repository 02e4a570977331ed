#include "plumeloc/run_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "csv.hpp"
#include "plumeloc/errors.hpp"

namespace plumeloc {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTraceHeader =
    "iteration,epsilon_used,epsilon_next,count_m1,count_m2,count_m3,"
    "prob_m1,prob_m2,prob_m3,acceptance_rate,proposals,"
    "zero_prior_rejects,kernel_collapse_rejects";

std::string population_filename(int iteration, int model) {
  return fmt::format("population_t{}_m{}.csv", iteration, model);
}

}  // namespace

void write_trace_csv(const fs::path& path, const RunTrace& trace) {
  auto out = detail::open_output(path);
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << detail::format_double(r.epsilon_used) << ','
        << detail::format_double(r.epsilon_next) << ',' << r.counts[0] << ','
        << r.counts[1] << ',' << r.counts[2] << ','
        << detail::format_double(r.probabilities[0]) << ','
        << detail::format_double(r.probabilities[1]) << ','
        << detail::format_double(r.probabilities[2]) << ','
        << detail::format_double(r.acceptance_rate) << ',' << r.proposals << ','
        << r.zero_prior_rejects << ',' << r.kernel_collapse_rejects << '\n';
  }
}

RunTrace read_trace_csv(const fs::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ValidationError(fmt::format("{}: not a trace file", path.string()));
  }
  RunTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 13) {
      throw ValidationError(fmt::format("{}:{}: expected 13 columns, got {}",
                                        path.string(), line_no, f.size()));
    }
    IterationRecord r;
    r.iteration = static_cast<int>(detail::parse_double(f[0], path, line_no));
    r.epsilon_used = detail::parse_double(f[1], path, line_no);
    r.epsilon_next = detail::parse_double(f[2], path, line_no);
    for (int m = 0; m < kNumModels; ++m) {
      r.counts[m] = static_cast<std::size_t>(detail::parse_double(f[3 + m], path, line_no));
      r.probabilities[m] = detail::parse_double(f[6 + m], path, line_no);
    }
    r.acceptance_rate = detail::parse_double(f[9], path, line_no);
    r.proposals = static_cast<std::uint64_t>(detail::parse_double(f[10], path, line_no));
    r.zero_prior_rejects =
        static_cast<std::uint64_t>(detail::parse_double(f[11], path, line_no));
    r.kernel_collapse_rejects =
        static_cast<std::uint64_t>(detail::parse_double(f[12], path, line_no));
    trace.records.push_back(r);
  }
  if (trace.records.empty()) {
    throw ValidationError(fmt::format("{}: trace has no rows", path.string()));
  }
  return trace;
}

void write_timings_csv(const fs::path& path, const RunTrace& trace) {
  auto out = detail::open_output(path);
  out << "iteration,seconds\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << detail::format_double(r.seconds) << '\n';
  }
}

void write_population_csv(const fs::path& path, std::span<const WeightedSample> samples,
                          ModelId model) {
  auto out = detail::open_output(path);
  out << "weight,distance";
  for (const auto name : param_names(model)) out << ',' << name;
  out << '\n';
  for (const auto& s : samples) {
    out << detail::format_double(s.weight) << ',' << detail::format_double(s.distance);
    for (const double v : s.theta) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

std::vector<WeightedSample> read_population_csv(const fs::path& path, ModelId model) {
  auto in = detail::open_input(path);
  std::string line;
  std::string expected_header = "weight,distance";
  for (const auto name : param_names(model)) {
    expected_header += ',';
    expected_header += name;
  }
  if (!std::getline(in, line) || line != expected_header) {
    throw ValidationError(fmt::format("{}: not a model-{} population file",
                                      path.string(), static_cast<int>(model)));
  }
  std::vector<WeightedSample> samples;
  const std::size_t dim = param_dim(model);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != dim + 2) {
      throw ValidationError(fmt::format("{}:{}: expected {} columns, got {}",
                                        path.string(), line_no, dim + 2, f.size()));
    }
    WeightedSample s;
    s.weight = detail::parse_double(f[0], path, line_no);
    s.distance = detail::parse_double(f[1], path, line_no);
    s.theta.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      s.theta[i] = detail::parse_double(f[2 + i], path, line_no);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_population_set(const fs::path& dir, const Population& pop) {
  for (int m = 1; m <= kNumModels; ++m) {
    write_population_csv(dir / population_filename(pop.iteration, m),
                         pop.models[m - 1], static_cast<ModelId>(m));
  }
}

Population read_population_set(const fs::path& dir, int iteration) {
  Population pop;
  pop.iteration = iteration;
  for (int m = 1; m <= kNumModels; ++m) {
    const fs::path path = dir / population_filename(iteration, m);
    pop.models[m - 1] = read_population_csv(path, static_cast<ModelId>(m));
  }
  return pop;
}

GridSpec axis_grid_spec(const PriorSet& priors, std::span<const int> models,
                        std::span<const FlatLocationSample> samples, Axis axis,
                        std::size_t points) {
  const std::size_t param = axis == Axis::X ? 0 : 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool from_priors = true;
  for (int m : models) {
    const auto& prior = priors.spec(model_from_int(m)).components[param].second;
    if (prior.kind() == ScalarPrior::Kind::Uniform || prior.is_fixed()) {
      lo = std::min(lo, prior.param_a());
      hi = std::max(hi, prior.param_b());
    } else {
      from_priors = false;
      break;
    }
  }
  if (!from_priors || !(hi > lo)) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      const double v = axis == Axis::X ? s.x : s.y;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return GridSpec{lo, hi, points};
}

PosteriorArtifacts summarise_population(const Population& pop, const PriorSet& priors,
                                        std::span<const int> models,
                                        std::size_t grid_points) {
  PosteriorArtifacts artifacts;
  const auto locations = extract_locations(pop);
  artifacts.locations =
      location_posterior_weights(locations, pop.counts(), pop.total_size());
  artifacts.marginal_x = kde_marginal(
      artifacts.locations, Axis::X,
      axis_grid_spec(priors, models, artifacts.locations, Axis::X, grid_points));
  artifacts.marginal_y = kde_marginal(
      artifacts.locations, Axis::Y,
      axis_grid_spec(priors, models, artifacts.locations, Axis::Y, grid_points));
  artifacts.summary = summarise(artifacts.locations);
  return artifacts;
}

void write_posterior_artifacts(const fs::path& dir, const PosteriorArtifacts& artifacts) {
  {
    auto out = detail::open_output(dir / "locations.csv");
    out << "model,weight,x0,y0\n";
    for (const auto& s : artifacts.locations) {
      out << s.model << ',' << detail::format_double(s.weight) << ','
          << detail::format_double(s.x) << ',' << detail::format_double(s.y) << '\n';
    }
  }
  const auto write_grid = [&](const fs::path& path, const DensityGrid& grid) {
    auto out = detail::open_output(path);
    out << "position_mm,density\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      out << detail::format_double(grid.points[i]) << ','
          << detail::format_double(grid.density[i]) << '\n';
    }
  };
  write_grid(dir / "marginal_x.csv", artifacts.marginal_x);
  write_grid(dir / "marginal_y.csv", artifacts.marginal_y);
  {
    auto out = detail::open_output(dir / "summary.csv");
    out << "axis,mean,median,lo95,hi95\n";
    const auto row = [&](std::string_view axis, const AxisSummary& s) {
      out << axis << ',' << detail::format_double(s.mean) << ','
          << detail::format_double(s.median) << ',' << detail::format_double(s.lo95)
          << ',' << detail::format_double(s.hi95) << '\n';
    };
    row("x", artifacts.summary.x);
    row("y", artifacts.summary.y);
  }
}

void summarise_run_dir(const fs::path& run_dir, const fs::path& out_dir,
                       std::size_t grid_points_override) {
  const RunConfig config = load_config(run_dir / "config_echo");
  const PriorSet priors = resolve_priors(config);
  const RunTrace trace = read_trace_csv(run_dir / "trace.csv");
  const int final_iteration = trace.records.back().iteration;
  Population pop = read_population_set(run_dir, final_iteration);
  pop.tolerance = trace.records.back().epsilon_used;

  const std::size_t grid_points =
      grid_points_override > 0 ? grid_points_override : config.grid_points;
  const auto artifacts = summarise_population(pop, priors, config.models, grid_points);
  fs::create_directories(out_dir);
  write_posterior_artifacts(out_dir, artifacts);
}

}  // namespace plumeloc
