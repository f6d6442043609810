// SPDX-License-Identifier: Apache-2.0
//
// Named experiments: configuration, initial data, scenario drivers and the
// files a run leaves behind.
//
// Config files are INI-style:
//
//   [scenario]  name = conservation | convergence | linear_limit |
//                      variational_stationarity | sign_crossover |
//                      ch_reduction | swe_comparison | custom
//               check = <optional sub-check, see list_scenarios()>
//   [grid]      n, length
//   [sim]       model (or "all"), dt, t_end, sample_every, snapshot_every,
//               eps, blowup_threshold
//   [initial]   family = gaussian | sine | rest | file, center, width,
//               u_amp, H_amp, mode, file
//   [scales]    h0, lambda, a, g, p0 (optional; eps defaults to a / h0)
//   [run]       seed, output, trials, refinements, slices, eps_values,
//               crossover, samples

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "twoch/integrators.hpp"
#include "twoch/scaling.hpp"

namespace twoch {

enum class Scenario {
  Conservation,
  Convergence,
  LinearLimit,
  VariationalStationarity,
  SignCrossover,
  ChReduction,
  SweComparison,
  Custom
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);
const std::vector<Scenario>& all_scenarios();

struct InitialCondition {
  // gaussian: u = u_amp exp(-((x - center) / width)^2), H = 1 + H_amp exp(...)
  // sine:     u = u_amp sin(2 pi mode x / L),          H = 1 + H_amp cos(...)
  // rest:     u = 0, H = 1
  // file:     CSV with header x,u,H sampled at the grid nodes
  std::string family = "gaussian";
  double center = 20.0;
  double width = 1.0;
  double u_amp = 0.3;
  double H_amp = 0.1;
  int mode = 1;
  std::string file;
};

struct ExperimentSpec {
  Scenario scenario = Scenario::Custom;
  std::string check;
  std::size_t n = 256;
  double length = 40.0;
  SimConfig sim;
  // Run every model in turn (conservation only).
  bool all_models = false;
  InitialCondition initial;
  std::optional<PhysicalScales> scales;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "output";

  std::size_t trials = 10;
  std::size_t refinements = 4;
  // Time intervals of a flow path (slices - 1 = M).
  std::size_t slices = 200;
  std::vector<double> eps_values;
  bool crossover = false;
  std::size_t samples = 100;
};

// Parses an INI config. Unknown sections or keys and malformed values throw
// PreconditionError naming the offending entry; the result is validated.
ExperimentSpec parse_config(const std::filesystem::path& file);
ExperimentSpec parse_config_string(const std::string& text,
                                   const std::filesystem::path& base_dir = ".");

// Throws PreconditionError if the spec cannot be run as given.
void validate(const ExperimentSpec& spec);

nlohmann::json to_json(const ExperimentSpec& spec);

Grid make_grid(const ExperimentSpec& spec);
State initial_state(const ExperimentSpec& spec);

struct ScenarioResult {
  bool passed = false;
  std::string reason;
  nlohmann::json metrics = nlohmann::json::object();
  // Run whose diagnostics and snapshots are written out; for scenarios
  // without a time integration it holds only the initial state.
  Trajectory primary;
  // Extra diagnostics tables, written as diagnostics_<name>.csv.
  std::vector<std::pair<std::string, std::vector<DiagnosticsRecord>>> extra_diagnostics;
};

ScenarioResult run_scenario(const ExperimentSpec& spec);

// diagnostics.csv, snapshots.csv, report.json and run_meta.json.
void write_outputs(const ExperimentSpec& spec, const ScenarioResult& result,
                   double wall_seconds, const std::filesystem::path& dir);

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::filesystem::path& file);
void write_snapshots_csv(const std::vector<State>& states, const std::filesystem::path& file);
nlohmann::json report_json(const ExperimentSpec& spec, const ScenarioResult& result);

// Runs the scenario and writes its outputs. Returns 0 on pass and 1 on a
// failed check or blow-up; an invalid spec throws PreconditionError.
int run(const ExperimentSpec& spec);

// Stable, timestamp-free description of each scenario.
std::string list_scenarios();

// Tendency of the single-component Camassa-Holm equation,
// u_t = (1 - d_xx)^{-1} [-3 u u_x + 2 u_x u_xx + u u_xxx], written directly
// without the two-component machinery.
Field camassa_holm_rhs(const Field& u);

// Smooth random state: the lowest `modes` Fourier modes with coefficients
// decaying like 1/k, u scaled to max |u| = u_amp and H = 1 + H_amp * w with
// max |w| = 1.
State random_smooth_state(const Grid& grid, std::mt19937_64& rng, double u_amp, double H_amp,
                          std::size_t modes = 8);

}  // namespace twoch
