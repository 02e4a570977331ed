#include "plumeloc/run_config.hpp"

#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "plumeloc/errors.hpp"

namespace plumeloc {

using nlohmann::json;

namespace {

const std::set<std::string> kModes = {"generate", "reject", "run", "summarise"};

// JSON has no literal for infinities; carry non-finite values as strings.
json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return fmt::format("{}", v);
}

double number_from_json(const json& j, const char* field) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ValidationError(fmt::format("field '{}': unrecognised number '{}'", field, s));
  }
  return j.get<double>();
}

ScenarioSpec::Noise noise_from_string(const std::string& s) {
  if (s == "none") return ScenarioSpec::Noise::None;
  if (s == "lognormal") return ScenarioSpec::Noise::LognormalMultiplicative;
  throw ValidationError(fmt::format("unknown noise model '{}'", s));
}

std::string noise_to_string(ScenarioSpec::Noise n) {
  return n == ScenarioSpec::Noise::None ? "none" : "lognormal";
}

json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["model"] = static_cast<int>(spec.model);
  j["truth"] = spec.truth;
  j["rows"] = spec.rows;
  j["per_row"] = spec.per_row;
  j["row_x"] = spec.row_x;
  j["y_span"] = spec.y_span;
  j["sensor_z"] = spec.sensor_z;
  j["noise"] = noise_to_string(spec.noise);
  j["sigma_ln"] = spec.sigma_ln;
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec spec = ScenarioSpec::defaults();
  if (j.contains("model")) spec.model = model_from_int(j.at("model").get<int>());
  if (j.contains("truth")) spec.truth = j.at("truth").get<std::vector<double>>();
  if (j.contains("rows")) spec.rows = j.at("rows").get<std::size_t>();
  if (j.contains("per_row")) spec.per_row = j.at("per_row").get<std::size_t>();
  if (j.contains("row_x")) spec.row_x = j.at("row_x").get<std::vector<double>>();
  if (j.contains("y_span")) spec.y_span = j.at("y_span").get<double>();
  if (j.contains("sensor_z")) spec.sensor_z = j.at("sensor_z").get<double>();
  if (j.contains("noise")) spec.noise = noise_from_string(j.at("noise").get<std::string>());
  if (j.contains("sigma_ln")) spec.sigma_ln = j.at("sigma_ln").get<double>();
  // Default truth belongs to the default model; require an explicit vector
  // when the model changes.
  if (j.contains("model") && !j.contains("truth")) {
    throw ValidationError("scenario with explicit model needs an explicit truth vector");
  }
  return spec;
}

}  // namespace

void RunConfig::validate() const {
  if (!kModes.contains(mode)) {
    throw ValidationError(fmt::format("unknown mode '{}'", mode));
  }
  if (out.empty()) throw ValidationError("output directory is required");
  if (models.empty()) throw ValidationError("enabled model set is empty");
  std::set<int> seen;
  for (int m : models) {
    model_from_int(m);
    if (!seen.insert(m).second) {
      throw ValidationError(fmt::format("model {} listed twice", m));
    }
  }
  if (mode != "summarise" && !seed.has_value()) {
    throw ValidationError("seed is required (results must be reproducible; "
                          "no wall-clock default)");
  }
  if (mode == "reject" && !epsilon.has_value()) {
    throw ValidationError("reject mode requires a tolerance (epsilon)");
  }
  if ((mode == "reject" || mode == "run") && dataset.empty()) {
    throw ValidationError(fmt::format("{} mode requires a dataset", mode));
  }
  if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
  smc.validate();
  if (scenario) scenario->validate();
}

PriorSet resolve_priors(const RunConfig& config) {
  PriorSet priors = default_prior_set();
  priors.model_prior = uniform_model_prior(config.models);
  for (const auto& o : config.prior_overrides) {
    const ModelId id = model_from_int(o.model);
    priors.spec(id).replace(o.param, ScalarPrior::from_kind(o.kind, o.params));
  }
  for (const auto& spec : priors.specs) spec.validate();
  return priors;
}

RunConfig load_config(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }

  RunConfig config;
  try {
    if (j.contains("mode")) config.mode = j.at("mode").get<std::string>();
    if (j.contains("dataset")) config.dataset = j.at("dataset").get<std::string>();
    if (j.contains("out")) config.out = j.at("out").get<std::string>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("models")) config.models = j.at("models").get<std::vector<int>>();
    if (j.contains("n")) config.smc.population_size = j.at("n").get<std::size_t>();
    if (j.contains("phi_fraction")) config.smc.phi_fraction = j.at("phi_fraction").get<double>();
    if (j.contains("lambda")) config.smc.lambda = j.at("lambda").get<double>();
    if (j.contains("delta")) config.smc.delta = number_from_json(j.at("delta"), "delta");
    if (j.contains("max_iterations")) {
      config.smc.max_iterations = j.at("max_iterations").get<std::size_t>();
    }
    if (j.contains("acceptance_floor")) {
      config.smc.sampler.acceptance_floor = j.at("acceptance_floor").get<double>();
    }
    if (j.contains("floor_window")) {
      config.smc.sampler.floor_window = j.at("floor_window").get<std::uint64_t>();
    }
    if (j.contains("threads")) config.smc.sampler.threads = j.at("threads").get<unsigned>();
    if (j.contains("epsilon")) config.epsilon = number_from_json(j.at("epsilon"), "epsilon");
    if (j.contains("grid_points")) config.grid_points = j.at("grid_points").get<std::size_t>();
    if (j.contains("scenario")) config.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("priors")) {
      for (const auto& p : j.at("priors")) {
        PriorOverride o;
        o.model = p.at("model").get<int>();
        o.param = p.at("param").get<std::string>();
        o.kind = p.at("kind").get<std::string>();
        o.params = p.at("params").get<std::vector<double>>();
        config.prior_overrides.push_back(std::move(o));
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("{}: malformed config: {}", path.string(), e.what()));
  }
  return config;
}

void write_config_echo(const std::filesystem::path& path, const RunConfig& config,
                       const PriorSet& resolved) {
  json j;
  j["mode"] = config.mode;
  if (!config.dataset.empty()) j["dataset"] = config.dataset;
  j["out"] = config.out;
  if (config.seed) j["seed"] = *config.seed;
  j["models"] = config.models;
  j["n"] = config.smc.population_size;
  j["phi_fraction"] = config.smc.phi_fraction;
  j["lambda"] = config.smc.lambda;
  j["delta"] = number_to_json(config.smc.delta);
  j["max_iterations"] = config.smc.max_iterations;
  j["acceptance_floor"] = config.smc.sampler.acceptance_floor;
  j["floor_window"] = config.smc.sampler.floor_window;
  j["threads"] = config.smc.sampler.threads;
  if (config.epsilon) j["epsilon"] = number_to_json(*config.epsilon);
  j["grid_points"] = config.grid_points;
  if (config.scenario) j["scenario"] = scenario_to_json(*config.scenario);

  // Echo the full resolved prior table for the enabled models, so the echo
  // alone pins every distribution the run used.
  json priors = json::array();
  for (int m : config.models) {
    const auto& spec = resolved.spec(model_from_int(m));
    for (const auto& [name, prior] : spec.components) {
      json p;
      p["model"] = m;
      p["param"] = name;
      p["kind"] = prior.kind_name();
      p["params"] = prior.kind_params();
      priors.push_back(std::move(p));
    }
  }
  j["priors"] = std::move(priors);

  auto out = detail::open_output(path);
  out << j.dump(2) << '\n';
}

}  // namespace plumeloc
