// Command-line front end: synthetic scenario generation, the plain rejection
// sampler, the adaptive iterative sampler, and posterior summarisation.
//
// Exit codes: 0 success, 2 usage error, 3 validation error, 4 sampler abort.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "plumeloc/abc.hpp"
#include "plumeloc/dataset.hpp"
#include "plumeloc/errors.hpp"
#include "plumeloc/run_config.hpp"
#include "plumeloc/run_io.hpp"
#include "plumeloc/scenario.hpp"
#include "plumeloc/smc.hpp"

namespace fs = std::filesystem;
using namespace plumeloc;

namespace {

// fmt's shortest round-trip formatting, shared with the CSV writers.
std::string num(double v) { return fmt::format("{}", v); }

struct CommonFlags {
  std::string config_path;
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<int> models;
  std::size_t n = 0;
  double phi_fraction = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  std::size_t max_iterations = 0;
  double acceptance_floor = 0.0;
  std::uint64_t floor_window = 0;
  unsigned threads = 0;
  double epsilon = 0.0;
  std::size_t grid_points = 0;
};

void add_common_options(CLI::App* cmd, CommonFlags& f, bool with_smc, bool with_epsilon) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--dataset", f.dataset, "input dataset CSV");
  cmd->add_option("--out", f.out, "output directory (created if missing)");
  cmd->add_option("--seed", f.seed, "root RNG seed (required; runs are reproducible)");
  cmd->add_option("--models", f.models, "enabled models, subset of 1,2,3")->delimiter(',');
  cmd->add_option("--n", f.n, "population size");
  if (with_smc) {
    cmd->add_option("--phi-fraction", f.phi_fraction, "order-statistic fraction in (0,1)");
    cmd->add_option("--lambda", f.lambda, "proposal scale factor in (0,1)");
    cmd->add_option("--delta", f.delta, "termination threshold on tolerance gaps");
    cmd->add_option("--max-iterations", f.max_iterations, "iteration safety cap");
  }
  if (with_epsilon) {
    cmd->add_option("--epsilon", f.epsilon, "rejection tolerance");
  }
  cmd->add_option("--acceptance-floor", f.acceptance_floor,
                  "abort when the windowed acceptance rate drops below this");
  cmd->add_option("--floor-window", f.floor_window, "acceptance window length (proposals)");
  cmd->add_option("--threads", f.threads, "proposal evaluation threads");
  cmd->add_option("--grid-points", f.grid_points, "marginal density grid resolution");
}

RunConfig merge_config(const CLI::App* cmd, const CommonFlags& f, const std::string& mode) {
  const auto given = [cmd](const std::string& name) {
    const auto* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  RunConfig config;
  if (given("--config")) config = load_config(f.config_path);
  config.mode = mode;
  if (given("--dataset")) config.dataset = f.dataset;
  if (given("--out")) config.out = f.out;
  if (given("--seed")) config.seed = f.seed;
  if (given("--models")) config.models = f.models;
  if (given("--n")) config.smc.population_size = f.n;
  if (given("--phi-fraction")) config.smc.phi_fraction = f.phi_fraction;
  if (given("--lambda")) config.smc.lambda = f.lambda;
  if (given("--delta")) config.smc.delta = f.delta;
  if (given("--max-iterations")) config.smc.max_iterations = f.max_iterations;
  if (given("--acceptance-floor")) config.smc.sampler.acceptance_floor = f.acceptance_floor;
  if (given("--floor-window")) config.smc.sampler.floor_window = f.floor_window;
  if (given("--threads")) config.smc.sampler.threads = f.threads;
  if (given("--epsilon")) config.epsilon = f.epsilon;
  if (given("--grid-points")) config.grid_points = f.grid_points;
  return config;
}

SensorArray load_run_dataset(const RunConfig& config) {
  if (!fs::exists(config.dataset)) {
    throw UsageError(fmt::format("dataset '{}' does not exist", config.dataset));
  }
  return load_dataset(config.dataset);
}

void write_truth_csv(const fs::path& path, const ScenarioSpec& spec) {
  std::ofstream out(path);
  out << "key,value\n";
  out << "model," << static_cast<int>(spec.model) << '\n';
  const auto names = param_names(spec.model);
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << ',' << num(spec.truth[i]) << '\n';
  }
}

int run_generate(const CLI::App* cmd, const CommonFlags& f, const ScenarioSpec& flags_spec,
                 const std::vector<std::string>& given) {
  RunConfig config;
  if (cmd->count("--config") > 0) config = load_config(f.config_path);
  config.mode = "generate";
  if (cmd->count("--out") > 0) config.out = f.out;
  if (cmd->count("--seed") > 0) config.seed = f.seed;

  ScenarioSpec spec = config.scenario.value_or(ScenarioSpec::defaults());
  const auto has = [&](const std::string& name) {
    return std::find(given.begin(), given.end(), name) != given.end();
  };
  if (has("--model")) {
    spec.model = flags_spec.model;
    if (!has("--truth")) {
      throw UsageError("--model requires an explicit --truth vector");
    }
  }
  if (has("--truth")) spec.truth = flags_spec.truth;
  if (has("--rows")) spec.rows = flags_spec.rows;
  if (has("--per-row")) spec.per_row = flags_spec.per_row;
  if (has("--row-x")) spec.row_x = flags_spec.row_x;
  if (has("--y-span")) spec.y_span = flags_spec.y_span;
  if (has("--sensor-z")) spec.sensor_z = flags_spec.sensor_z;
  if (has("--noise")) spec.noise = flags_spec.noise;
  if (has("--sigma-ln")) spec.sigma_ln = flags_spec.sigma_ln;
  config.scenario = spec;
  config.validate();

  const auto result = generate_scenario(spec, *config.seed);
  if (result.all_upwind) {
    std::cerr << "warning: every sensor is upwind of the source; "
                 "the dataset is all zeros\n";
  }
  fs::create_directories(config.out);
  write_dataset(fs::path(config.out) / "dataset.csv", result.array);
  write_truth_csv(fs::path(config.out) / "truth.csv", spec);
  write_config_echo(fs::path(config.out) / "config_echo", config, resolve_priors(config));
  std::cout << fmt::format("wrote {} sensors to {}/dataset.csv\n",
                           result.array.size(), config.out);
  return 0;
}

int run_reject(const CLI::App* cmd, const CommonFlags& f) {
  RunConfig config = merge_config(cmd, f, "reject");
  config.validate();
  const PriorSet priors = resolve_priors(config);
  const SensorArray array = load_run_dataset(config);

  fs::create_directories(config.out);
  write_config_echo(fs::path(config.out) / "config_echo", config, priors);

  const auto t0 = std::chrono::steady_clock::now();
  const RejectionResult result =
      rejection_sample(array, priors, *config.epsilon, config.smc.population_size,
                       *config.seed, config.smc.sampler);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0).count();

  RunTrace trace;
  IterationRecord rec;
  rec.iteration = 0;
  rec.epsilon_used = *config.epsilon;
  rec.epsilon_next = std::numeric_limits<double>::quiet_NaN();
  rec.counts = result.population.counts();
  rec.probabilities = model_probabilities(result.population);
  rec.acceptance_rate = result.stats.acceptance_rate();
  rec.proposals = result.stats.proposals;
  rec.seconds = seconds;
  trace.records.push_back(rec);

  write_trace_csv(fs::path(config.out) / "trace.csv", trace);
  write_timings_csv(fs::path(config.out) / "timings.csv", trace);
  write_population_set(config.out, result.population);
  const auto artifacts = summarise_population(result.population, priors, config.models,
                                              config.grid_points);
  write_posterior_artifacts(config.out, artifacts);
  std::cout << fmt::format("accepted {} of {} proposals (rate {})\n",
                           result.stats.accepted, result.stats.proposals,
                           num(result.stats.acceptance_rate()));
  return 0;
}

int run_adaptive_cmd(const CLI::App* cmd, const CommonFlags& f) {
  RunConfig config = merge_config(cmd, f, "run");
  config.validate();
  const PriorSet priors = resolve_priors(config);
  const SensorArray array = load_run_dataset(config);

  fs::create_directories(config.out);
  write_config_echo(fs::path(config.out) / "config_echo", config, priors);

  // Populations and the trace land on disk after every iteration, so an
  // interrupted run still leaves a usable posterior behind.
  RunTrace trace;
  const auto observer = [&](const Population& pop, const IterationRecord& rec) {
    trace.records.push_back(rec);
    write_population_set(config.out, pop);
    write_trace_csv(fs::path(config.out) / "trace.csv", trace);
    write_timings_csv(fs::path(config.out) / "timings.csv", trace);
    std::cout << fmt::format(
        "iteration {}: tolerance {} -> {}, counts [{}, {}, {}], acceptance {}\n",
        rec.iteration, num(rec.epsilon_used), num(rec.epsilon_next), rec.counts[0],
        rec.counts[1], rec.counts[2], num(rec.acceptance_rate));
  };

  const AdaptiveResult result = run_adaptive(array, priors, config.smc, *config.seed, observer);
  trace.cap_reached = result.trace.cap_reached;
  write_trace_csv(fs::path(config.out) / "trace.csv", trace);
  write_timings_csv(fs::path(config.out) / "timings.csv", trace);
  if (result.trace.cap_reached) {
    std::cerr << "warning: iteration cap reached before the tolerance gap "
                 "fell below delta\n";
  }

  const auto artifacts = summarise_population(result.final_population, priors,
                                              config.models, config.grid_points);
  write_posterior_artifacts(config.out, artifacts);
  const auto& s = artifacts.summary;
  std::cout << fmt::format("x0: mean {} median {} 95% [{}, {}]\n", num(s.x.mean),
                           num(s.x.median), num(s.x.lo95), num(s.x.hi95));
  std::cout << fmt::format("y0: mean {} median {} 95% [{}, {}]\n", num(s.y.mean),
                           num(s.y.median), num(s.y.lo95), num(s.y.hi95));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-free localisation of an aerosol source from a "
               "concentration sensor network, with multiple dispersion models "
               "sampled in parallel"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 2 usage error, 3 validation error, 4 sampler abort.");

  CommonFlags gen_flags, rej_flags, run_flags;

  // generate
  auto* gen = app.add_subcommand("generate", "synthesise a dataset from a known source");
  ScenarioSpec gen_spec = ScenarioSpec::defaults();
  int gen_model = 2;
  std::string gen_noise = "lognormal";
  gen->add_option("--config", gen_flags.config_path, "JSON config file");
  gen->add_option("--out", gen_flags.out, "output directory");
  gen->add_option("--seed", gen_flags.seed, "root RNG seed");
  gen->add_option("--model", gen_model, "generating model (1, 2 or 3)");
  gen->add_option("--truth", gen_spec.truth, "true parameter vector")->delimiter(',');
  gen->add_option("--rows", gen_spec.rows, "sensor fence count");
  gen->add_option("--per-row", gen_spec.per_row, "sensors per fence");
  gen->add_option("--row-x", gen_spec.row_x, "fence x positions (mm)")->delimiter(',');
  gen->add_option("--y-span", gen_spec.y_span, "crosswind extent (mm)");
  gen->add_option("--sensor-z", gen_spec.sensor_z, "sensor height (mm)");
  gen->add_option("--noise", gen_noise, "noise model: none | lognormal");
  gen->add_option("--sigma-ln", gen_spec.sigma_ln, "lognormal noise scale");

  // reject
  auto* rej = app.add_subcommand("reject", "plain rejection sampling at a fixed tolerance");
  add_common_options(rej, rej_flags, /*with_smc=*/false, /*with_epsilon=*/true);

  // run
  auto* run = app.add_subcommand("run", "adaptive iterative sampling");
  add_common_options(run, run_flags, /*with_smc=*/true, /*with_epsilon=*/false);

  // summarise
  auto* sum = app.add_subcommand("summarise", "recompute posterior outputs from a run directory");
  std::string sum_run, sum_out;
  std::size_t sum_grid = 0;
  sum->add_option("--run", sum_run, "completed run directory")->required();
  sum->add_option("--out", sum_out, "output directory (default: the run directory)");
  sum->add_option("--grid-points", sum_grid, "marginal density grid resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      std::vector<std::string> given;
      for (const auto* opt : gen->get_options()) {
        if (opt->count() > 0) given.push_back(opt->get_name());
      }
      gen_spec.model = model_from_int(gen_model);
      gen_spec.noise = gen_noise == "none" ? ScenarioSpec::Noise::None
                                           : ScenarioSpec::Noise::LognormalMultiplicative;
      if (gen_noise != "none" && gen_noise != "lognormal") {
        throw UsageError(fmt::format("unknown noise model '{}'", gen_noise));
      }
      return run_generate(gen, gen_flags, gen_spec, given);
    }
    if (rej->parsed()) return run_reject(rej, rej_flags);
    if (run->parsed()) return run_adaptive_cmd(run, run_flags);
    if (sum->parsed()) {
      summarise_run_dir(sum_run, sum_out.empty() ? sum_run : sum_out, sum_grid);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const SamplerAbort& e) {
    std::cerr << "sampler abort: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
