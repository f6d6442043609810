// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "twoch/experiment.hpp"
#include "twoch/kernels.hpp"

#ifndef TWOCH_VERSION
#define TWOCH_VERSION "unknown"
#endif

namespace twoch {
namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  return out;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& file) {
  auto out = open_for_write(file);
  out << j.dump(2) << '\n';
}

}  // namespace

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::filesystem::path& file) {
  auto out = open_for_write(file);
  const auto& names = DiagnosticsRecord::column_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (const auto& r : records) {
    const auto v = r.values();
    for (std::size_t c = 0; c < v.size(); ++c) out << (c ? "," : "") << g17(v[c]);
    out << '\n';
  }
}

void write_snapshots_csv(const std::vector<State>& states, const std::filesystem::path& file) {
  auto out = open_for_write(file);
  out << "x,t,u,H\n";
  for (const State& s : states) {
    const std::string t = g17(s.t);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      out << g17(s.u.grid().node(i)) << ',' << t << ',' << g17(s.u[i]) << ',' << g17(s.H[i])
          << '\n';
    }
  }
}

nlohmann::json report_json(const ExperimentSpec& spec, const ScenarioResult& result) {
  return {{"scenario", to_string(spec.scenario)},
          {"check", spec.check},
          {"passed", result.passed},
          {"reason", result.reason},
          {"status", to_string(result.primary.status)},
          {"metrics", result.metrics}};
}

void write_outputs(const ExperimentSpec& spec, const ScenarioResult& result, double wall_seconds,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_diagnostics_csv(result.primary.diagnostics, dir / "diagnostics.csv");
  for (const auto& [name, records] : result.extra_diagnostics) {
    write_diagnostics_csv(records, dir / ("diagnostics_" + name + ".csv"));
  }
  write_snapshots_csv(result.primary.states, dir / "snapshots.csv");
  write_json(report_json(spec, result), dir / "report.json");

  const Grid grid = make_grid(spec);
  nlohmann::json meta;
  meta["spec"] = to_json(spec);
  meta["version"] = TWOCH_VERSION;
  meta["grid"] = {{"n", grid.size()},
                  {"length", grid.length()},
                  {"spacing", grid.spacing()},
                  {"dealias_cutoff", grid.dealias_cutoff()}};
  meta["kernels"] = std::string(kernels::to_string(kernels::active().backend));
  meta["timings"] = {{"wall_seconds", wall_seconds}};
  write_json(meta, dir / "run_meta.json");
}

int run(const ExperimentSpec& spec) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult result;
  try {
    result = run_scenario(spec);
  } catch (const PreconditionError&) {
    throw;
  } catch (const std::exception& e) {
    result.passed = false;
    result.reason = e.what();
    result.primary.status = RunStatus::NonFinite;
    if (result.primary.states.empty()) {
      const State s = initial_state(spec);
      result.primary.states.push_back(s);
      result.primary.diagnostics.push_back(diagnostics(s));
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_outputs(spec, result, wall, spec.output_dir);
  return result.passed ? 0 : 1;
}

std::string list_scenarios() {
  struct Row {
    Scenario s;
    const char* claim;
    const char* defaults;
  };
  static const Row rows[] = {
      {Scenario::Conservation,
       "mass, momentum and energy_plus invariance for 2CH(+), energy_minus for 2CH(-); "
       "rest state fixed point of every model (model = all)",
       "n=256 L=40 dt=1e-3 gaussian(center=20 width=1 u_amp=0.3 H_amp=0.1)"},
      {Scenario::Convergence,
       "fourth-order temporal self-convergence of RK4 (fitted order 4.0 +/- 0.2)",
       "refinements=4 from dt, reference run at half the finest dt"},
      {Scenario::LinearLimit,
       "shallow water tends to the linear right-moving wave as eps -> 0 (error slope 1)",
       "model=swe t_end=5 eps_values=0.1,0.05,0.025"},
      {Scenario::VariationalStationarity,
       "2CH solutions are critical points of the action (Lagrangian for +, metric for -); "
       "check=subgroup_invariance: action invariant under H0-preserving relabeling",
       "t_end=2 slices=200 trials=10 fd eps=1e-5 with Richardson"},
      {Scenario::SignCrossover,
       "mismatched action/sign pairings are not stationary (negative control)",
       "t_end=2 slices=200 trials=10"},
      {Scenario::ChReduction,
       "H = 0 reduces both signs to the Camassa-Holm equation; "
       "check=formulation_equivalence: velocity and momentum forms agree",
       "samples=100"},
      {Scenario::SweComparison,
       "surface vertical velocity satisfies the kinematic condition eps (eta_t + u eta_x); "
       "check=eps_truncation: kinetic energy truncation error is O(eps^3)",
       "model=swe eps=0.1; eps_values=0.2,0.1,0.05"},
      {Scenario::Custom, "user-defined run with diagnostics only", "any model and initial data"},
  };
  std::ostringstream out;
  out << "scenario                  claim checked / defaults\n";
  for (const Row& r : rows) {
    std::string name = to_string(r.s);
    name.resize(26, ' ');
    out << name << r.claim << '\n' << std::string(26, ' ') << "defaults: " << r.defaults << '\n';
  }
  return out.str();
}

}  // namespace twoch
