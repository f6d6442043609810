// SPDX-License-Identifier: Apache-2.0

#include "twoch/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace twoch {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"name", "check"}},
      {"grid", {"n", "length"}},
      {"sim",
       {"model", "dt", "t_end", "sample_every", "snapshot_every", "eps", "blowup_threshold"}},
      {"initial", {"family", "center", "width", "u_amp", "H_amp", "mode", "file"}},
      {"scales", {"h0", "lambda", "a", "g", "p0"}},
      {"run",
       {"seed", "output", "trials", "refinements", "slices", "eps_values", "crossover",
        "samples"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw PreconditionError("config: " + key + " = '" + raw + "' is not a number");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw PreconditionError("config: " + key + " = '" + raw + "' is not an integer");
  }
  return v;
}

std::size_t to_count(const std::string& key, const std::string& raw) {
  const long long v = to_integer(key, raw);
  if (v < 0) throw PreconditionError("config: " + key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw PreconditionError("config: " + key + " = '" + raw + "' is not a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw PreconditionError("config: " + key + " is empty");
  return out;
}

std::vector<double> default_eps_values(const ExperimentSpec& spec) {
  if (spec.scenario == Scenario::LinearLimit) return {0.1, 0.05, 0.025};
  if (spec.scenario == Scenario::SweComparison && spec.check == "eps_truncation") {
    return {0.2, 0.1, 0.05};
  }
  return {};
}

State read_initial_file(const Grid& grid, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw PreconditionError("initial: cannot open file '" + file.string() + "'");
  std::string line;
  std::getline(in, line);
  if (trim(line) != "x,u,H") {
    throw PreconditionError("initial: file '" + file.string() + "' must start with header x,u,H");
  }
  State s{Field(grid), Field(grid), 0.0};
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cx, cu, ch;
    if (!std::getline(ss, cx, ',') || !std::getline(ss, cu, ',') || !std::getline(ss, ch)) {
      throw PreconditionError("initial: malformed row " + std::to_string(i + 2));
    }
    if (i >= grid.size()) throw PreconditionError("initial: more rows than grid nodes");
    const double x = to_double("initial x", cx);
    if (std::fabs(x - grid.node(i)) > 1e-9 * grid.length()) {
      throw PreconditionError("initial: row " + std::to_string(i + 2) +
                              " is not at grid node x = " + std::to_string(grid.node(i)));
    }
    s.u[i] = to_double("initial u", cu);
    s.H[i] = to_double("initial H", ch);
    ++i;
  }
  if (i != grid.size()) {
    throw PreconditionError("initial: file has " + std::to_string(i) + " rows, grid has " +
                            std::to_string(grid.size()) + " nodes");
  }
  return s;
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Conservation: return "conservation";
    case Scenario::Convergence: return "convergence";
    case Scenario::LinearLimit: return "linear_limit";
    case Scenario::VariationalStationarity: return "variational_stationarity";
    case Scenario::SignCrossover: return "sign_crossover";
    case Scenario::ChReduction: return "ch_reduction";
    case Scenario::SweComparison: return "swe_comparison";
    case Scenario::Custom: return "custom";
  }
  return "unknown";
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> all{
      Scenario::Conservation,  Scenario::Convergence, Scenario::LinearLimit,
      Scenario::VariationalStationarity, Scenario::SignCrossover, Scenario::ChReduction,
      Scenario::SweComparison, Scenario::Custom};
  return all;
}

Scenario scenario_from_string(const std::string& name) {
  for (Scenario s : all_scenarios()) {
    if (name == to_string(s)) return s;
  }
  throw PreconditionError("config: unknown scenario '" + name + "'");
}

ExperimentSpec parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw PreconditionError("config: cannot open '" + file.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), file.parent_path().empty() ? "." : file.parent_path());
}

ExperimentSpec parse_config_string(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) {
      throw PreconditionError("config: unknown section [" + section + "]");
    }
    if (body.empty() && !body.data().empty()) {
      throw PreconditionError("config: key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw PreconditionError("config: unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  const auto get = [&tree](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentSpec spec;
  const auto name = get("scenario.name");
  if (!name) throw PreconditionError("config: [scenario] name is required");
  spec.scenario = scenario_from_string(*name);
  if (auto v = get("scenario.check")) spec.check = *v;

  if (auto v = get("grid.n")) spec.n = to_count("grid.n", *v);
  if (auto v = get("grid.length")) spec.length = to_double("grid.length", *v);

  if (auto v = get("sim.model")) {
    if (*v == "all") {
      spec.all_models = true;
    } else {
      spec.sim.model = model_from_string(*v);
    }
  } else if (spec.scenario == Scenario::LinearLimit || spec.scenario == Scenario::SweComparison) {
    spec.sim.model = Model::SWE;
  }
  if (auto v = get("sim.dt")) spec.sim.dt = to_double("sim.dt", *v);
  if (auto v = get("sim.t_end")) spec.sim.t_end = to_double("sim.t_end", *v);
  if (auto v = get("sim.sample_every")) spec.sim.sample_every = to_count("sim.sample_every", *v);
  if (auto v = get("sim.snapshot_every")) {
    spec.sim.snapshot_every = to_count("sim.snapshot_every", *v);
  }
  if (auto v = get("sim.blowup_threshold")) {
    spec.sim.blowup_threshold = to_double("sim.blowup_threshold", *v);
  }

  if (tree.get_child_optional("scales")) {
    PhysicalScales s;
    if (auto v = get("scales.h0")) s.h0 = to_double("scales.h0", *v);
    if (auto v = get("scales.lambda")) s.lambda = to_double("scales.lambda", *v);
    if (auto v = get("scales.a")) s.a = to_double("scales.a", *v);
    if (auto v = get("scales.g")) s.g = to_double("scales.g", *v);
    if (auto v = get("scales.p0")) s.p0 = to_double("scales.p0", *v);
    s.validate();
    spec.scales = s;
    spec.sim.eps = params(s).eps;
  }
  if (auto v = get("sim.eps")) spec.sim.eps = to_double("sim.eps", *v);

  InitialCondition& ic = spec.initial;
  if (auto v = get("initial.family")) ic.family = *v;
  if (auto v = get("initial.center")) ic.center = to_double("initial.center", *v);
  if (auto v = get("initial.width")) ic.width = to_double("initial.width", *v);
  if (auto v = get("initial.u_amp")) ic.u_amp = to_double("initial.u_amp", *v);
  if (auto v = get("initial.H_amp")) ic.H_amp = to_double("initial.H_amp", *v);
  if (auto v = get("initial.mode")) ic.mode = static_cast<int>(to_integer("initial.mode", *v));
  if (auto v = get("initial.file")) {
    const std::filesystem::path p(*v);
    ic.file = (p.is_absolute() ? p : base_dir / p).string();
  }

  if (auto v = get("run.seed")) spec.seed = static_cast<std::uint64_t>(to_count("run.seed", *v));
  if (auto v = get("run.output")) spec.output_dir = *v;
  if (auto v = get("run.trials")) spec.trials = to_count("run.trials", *v);
  if (auto v = get("run.refinements")) spec.refinements = to_count("run.refinements", *v);
  if (auto v = get("run.slices")) spec.slices = to_count("run.slices", *v);
  if (auto v = get("run.crossover")) spec.crossover = to_bool("run.crossover", *v);
  if (auto v = get("run.samples")) spec.samples = to_count("run.samples", *v);
  if (auto v = get("run.eps_values")) {
    spec.eps_values = to_list("run.eps_values", *v);
  } else {
    spec.eps_values = default_eps_values(spec);
  }

  validate(spec);
  return spec;
}

void validate(const ExperimentSpec& spec) {
  if (spec.n % 2 != 0) {
    throw PreconditionError("grid: n must be even (got " + std::to_string(spec.n) + ")");
  }
  if (spec.n < 8) throw PreconditionError("grid: n must be at least 8");
  if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
    throw PreconditionError("grid: length must be positive");
  }
  validate(spec.sim);
  if (spec.all_models && spec.scenario != Scenario::Conservation) {
    throw PreconditionError("sim: model = all is only supported by the conservation scenario");
  }

  const InitialCondition& ic = spec.initial;
  static const std::set<std::string> families{"gaussian", "sine", "rest", "file"};
  if (!families.contains(ic.family)) {
    throw PreconditionError("initial: unknown family '" + ic.family + "'");
  }
  if (ic.family == "gaussian" && !(ic.width > 0.0)) {
    throw PreconditionError("initial: width must be positive");
  }
  if (ic.family == "sine" && ic.mode < 1) throw PreconditionError("initial: mode must be >= 1");
  if (ic.family == "file" && ic.file.empty()) {
    throw PreconditionError("initial: family = file needs a file entry");
  }
  if (ic.family != "file" && ic.family != "rest" && !(std::fabs(ic.H_amp) < 1.0)) {
    throw PreconditionError("initial: |H_amp| must be below 1 so that H stays positive");
  }

  static const std::map<Scenario, std::set<std::string>> checks{
      {Scenario::VariationalStationarity, {"", "subgroup_invariance"}},
      {Scenario::ChReduction, {"", "formulation_equivalence"}},
      {Scenario::SweComparison, {"", "eps_truncation"}},
  };
  const auto it = checks.find(spec.scenario);
  if (!spec.check.empty() && (it == checks.end() || !it->second.contains(spec.check))) {
    throw PreconditionError("scenario: check '" + spec.check + "' is not available for " +
                            to_string(spec.scenario));
  }

  if (spec.trials < 1) throw PreconditionError("run: trials must be >= 1");
  if (spec.refinements < 3) throw PreconditionError("run: refinements must be >= 3");
  if (spec.samples < 1) throw PreconditionError("run: samples must be >= 1");
  for (double e : spec.eps_values) {
    if (!(e > 0.0)) throw PreconditionError("run: eps_values must be positive");
  }
  if ((spec.scenario == Scenario::LinearLimit ||
       (spec.scenario == Scenario::SweComparison && spec.check == "eps_truncation")) &&
      spec.eps_values.size() < 2) {
    throw PreconditionError("run: eps_values needs at least two entries");
  }

  const bool needs_path = (spec.scenario == Scenario::VariationalStationarity &&
                           spec.check.empty()) ||
                          spec.scenario == Scenario::SignCrossover;
  if (needs_path) {
    if (spec.slices < 2) throw PreconditionError("run: slices must be >= 2");
    if (step_count(spec.sim) % spec.slices != 0) {
      throw PreconditionError("run: the number of steps (" + std::to_string(step_count(spec.sim)) +
                              ") must be a multiple of slices (" + std::to_string(spec.slices) +
                              ")");
    }
    if (spec.sim.model != Model::TwoCHPlus && spec.sim.model != Model::TwoCHMinus) {
      throw PreconditionError("sim: stationarity scenarios need model twoch_plus or twoch_minus");
    }
  }
  if (spec.scenario == Scenario::LinearLimit && spec.sim.model != Model::SWE &&
      spec.sim.model != Model::SW1 && spec.sim.model != Model::Linear) {
    throw PreconditionError("sim: linear_limit needs model swe, sw1 or linear");
  }
  if (spec.scenario == Scenario::SweComparison && spec.check.empty() &&
      spec.sim.model != Model::SWE) {
    throw PreconditionError("sim: swe_comparison needs model swe");
  }
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["scenario"] = to_string(spec.scenario);
  j["check"] = spec.check;
  j["grid"] = {{"n", spec.n}, {"length", spec.length}};
  j["sim"] = {{"model", spec.all_models ? "all" : to_string(spec.sim.model)},
              {"dt", spec.sim.dt},
              {"t_end", spec.sim.t_end},
              {"sample_every", spec.sim.sample_every},
              {"snapshot_every", spec.sim.snapshot_every},
              {"eps", spec.sim.eps},
              {"blowup_threshold", spec.sim.blowup_threshold}};
  const InitialCondition& ic = spec.initial;
  j["initial"] = {{"family", ic.family}, {"center", ic.center}, {"width", ic.width},
                  {"u_amp", ic.u_amp},   {"H_amp", ic.H_amp},   {"mode", ic.mode},
                  {"file", ic.file}};
  if (spec.scales) {
    const PhysicalScales& s = *spec.scales;
    const WaveParameters w = params(s);
    j["scales"] = {{"h0", s.h0}, {"lambda", s.lambda}, {"a", s.a},      {"g", s.g},
                   {"p0", s.p0}, {"eps", w.eps},       {"delta", w.delta}};
  }
  j["run"] = {{"seed", spec.seed},
              {"output", spec.output_dir.string()},
              {"trials", spec.trials},
              {"refinements", spec.refinements},
              {"slices", spec.slices},
              {"eps_values", spec.eps_values},
              {"crossover", spec.crossover},
              {"samples", spec.samples}};
  return j;
}

Grid make_grid(const ExperimentSpec& spec) { return Grid(spec.n, spec.length); }

State initial_state(const ExperimentSpec& spec) {
  const Grid grid = make_grid(spec);
  const InitialCondition& ic = spec.initial;
  State s{Field(grid), Field::constant(grid, 1.0), 0.0};
  if (ic.family == "gaussian") {
    const auto bump = [&ic](double x) {
      const double r = (x - ic.center) / ic.width;
      return std::exp(-r * r);
    };
    s.u = Field::from_function(grid, [&](double x) { return ic.u_amp * bump(x); });
    s.H = Field::from_function(grid, [&](double x) { return 1.0 + ic.H_amp * bump(x); });
  } else if (ic.family == "sine") {
    const double k = grid.fundamental() * ic.mode;
    s.u = Field::from_function(grid, [&](double x) { return ic.u_amp * std::sin(k * x); });
    s.H = Field::from_function(grid, [&](double x) { return 1.0 + ic.H_amp * std::cos(k * x); });
  } else if (ic.family == "file") {
    s = read_initial_file(grid, ic.file);
  }
  if (!s.u.all_finite() || !s.H.all_finite()) {
    throw PreconditionError("initial: non-finite initial data");
  }
  return s;
}

State random_smooth_state(const Grid& grid, std::mt19937_64& rng, double u_amp, double H_amp,
                          std::size_t modes) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double omega = grid.fundamental();
  const auto draw = [&] {
    std::vector<double> a(modes), b(modes);
    for (std::size_t k = 0; k < modes; ++k) {
      a[k] = coef(rng) / static_cast<double>(k + 1);
      b[k] = coef(rng) / static_cast<double>(k + 1);
    }
    Field f = Field::from_function(grid, [&](double x) {
      double v = 0.0;
      for (std::size_t k = 0; k < modes; ++k) {
        const double kx = omega * static_cast<double>(k + 1) * x;
        v += a[k] * std::cos(kx) + b[k] * std::sin(kx);
      }
      return v;
    });
    const double peak = f.max_abs();
    return peak > 0.0 ? (1.0 / peak) * f : f;
  };
  Field u = u_amp * draw();
  Field H = H_amp * draw() + 1.0;
  return {std::move(u), std::move(H), 0.0};
}

}  // namespace twoch
