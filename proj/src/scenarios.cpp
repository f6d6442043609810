// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twoch/experiment.hpp"
#include "twoch/variational.hpp"

namespace twoch {
namespace {

using nlohmann::json;

constexpr double kRestTolerance = 1e-13;

void check(ScenarioResult& r, const std::string& name, bool ok, double value,
           const std::string& requirement) {
  r.metrics["checks"].push_back(
      {{"name", name}, {"passed", ok}, {"value", value}, {"requirement", requirement}});
  if (!ok) {
    r.passed = false;
    if (!r.reason.empty()) r.reason += "; ";
    r.reason += name + " = " + std::to_string(value) + " violates " + requirement;
  }
}

// Returns false (and records why) when a run stopped early.
bool completed(ScenarioResult& r, const Trajectory& t, const std::string& label) {
  if (t.status == RunStatus::Completed) return true;
  r.passed = false;
  if (!r.reason.empty()) r.reason += "; ";
  r.reason += label + " run " + to_string(t.status) + ": " + t.message;
  r.metrics["runs"][label] = {{"status", to_string(t.status)}, {"message", t.message}};
  return false;
}

json drift_json(const DriftReport& d) {
  const auto one = [](const Drift& x) { return json{{"abs", x.max_abs}, {"rel", x.max_rel}}; };
  return {{"mass", one(d.mass)},
          {"momentum", one(d.momentum)},
          {"energy_plus", one(d.energy_plus)},
          {"energy_minus", one(d.energy_minus)},
          {"kinetic_exact", one(d.kinetic_exact)},
          {"kinetic_approx", one(d.kinetic_approx)},
          {"potential", one(d.potential)},
          {"lagrangian", one(d.lagrangian)},
          {"metric", one(d.metric)}};
}

double max_diagnostic_drift(const DriftReport& d) {
  return std::max({d.mass.max_abs, d.momentum.max_abs, d.energy_plus.max_abs,
                   d.energy_minus.max_abs, d.kinetic_exact.max_abs, d.kinetic_approx.max_abs,
                   d.potential.max_abs, d.lagrangian.max_abs, d.metric.max_abs});
}

double max_field_drift(const Trajectory& t) {
  double m = 0.0;
  const State& first = t.states.front();
  for (const State& s : t.states) {
    m = std::max({m, (s.u - first.u).max_abs(), (s.H - first.H).max_abs()});
  }
  return m;
}

// The reduction model is only defined for H identically zero.
State adapted_initial(const State& s, Model model) {
  if (model != Model::CHReduction) return s;
  return {s.u, Field(s.u.grid()), s.t};
}

Trajectory initial_only(const State& s) {
  Trajectory t;
  t.states.push_back(s);
  t.diagnostics.push_back(diagnostics(s));
  return t;
}

Sign sign_of(Model m) { return m == Model::TwoCHMinus ? Sign::Minus : Sign::Plus; }

json stationarity_json(const StationarityReport& r) {
  return {{"solution_variations", r.solution_variations},
          {"perturbed_variations", r.perturbed_variations},
          {"perturbed_pairings", r.perturbed_pairings},
          {"max_abs_solution", r.max_abs_solution},
          {"max_abs_perturbed", r.max_abs_perturbed},
          {"separation_ratio", r.separation_ratio},
          {"max_relative_mismatch", r.max_relative_mismatch},
          {"admissible_eps", r.admissible_eps},
          {"separated", r.separated},
          {"matched", r.matched}};
}

StationarityOptions stationarity_options(const ExperimentSpec& spec) {
  StationarityOptions o;
  o.trials = spec.trials;
  o.seed = spec.seed;
  return o;
}

// Trajectory with one stored state per path slice.
Trajectory path_trajectory(const ExperimentSpec& spec, Model model) {
  SimConfig cfg = spec.sim;
  cfg.model = model;
  cfg.sample_every = step_count(cfg) / spec.slices;
  cfg.snapshot_every = cfg.sample_every;
  return simulate(initial_state(spec), cfg);
}

// ---------------------------------------------------------------------------

ScenarioResult conservation(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const State initial = initial_state(spec);
  const bool rest = spec.initial.family == "rest";
  const std::vector<Model> models =
      spec.all_models ? all_models() : std::vector<Model>{spec.sim.model};

  for (Model model : models) {
    const std::string name = to_string(model);
    SimConfig cfg = spec.sim;
    cfg.model = model;
    Trajectory t = simulate(adapted_initial(initial, model), cfg);
    if (spec.all_models) r.extra_diagnostics.emplace_back(name, t.diagnostics);
    const bool done = completed(r, t, name);
    if (t.diagnostics.size() >= 2) {
      const DriftReport d = drift_report(t);
      r.metrics["drifts"][name] = drift_json(d);
      if (done && rest) {
        check(r, name + ".field_drift", max_field_drift(t) < kRestTolerance, max_field_drift(t),
              "< 1e-13 (absolute)");
        check(r, name + ".diagnostic_drift", max_diagnostic_drift(d) < kRestTolerance,
              max_diagnostic_drift(d), "< 1e-13 (absolute)");
      } else if (done && model == Model::TwoCHPlus) {
        check(r, name + ".mass", d.mass.max_rel < 1e-12, d.mass.max_rel, "< 1e-12 (relative)");
        check(r, name + ".momentum", d.momentum.max_rel < 1e-10, d.momentum.max_rel,
              "< 1e-10 (relative)");
        check(r, name + ".energy_plus", d.energy_plus.max_rel < 1e-8, d.energy_plus.max_rel,
              "< 1e-8 (relative)");
        check(r, name + ".energy_minus", d.energy_minus.max_rel > 1e-4, d.energy_minus.max_rel,
              "> 1e-4 (relative, not conserved)");
      } else if (done && model == Model::TwoCHMinus) {
        check(r, name + ".mass", d.mass.max_rel < 1e-12, d.mass.max_rel, "< 1e-12 (relative)");
        check(r, name + ".momentum", d.momentum.max_rel < 1e-10, d.momentum.max_rel,
              "< 1e-10 (relative)");
        check(r, name + ".energy_minus", d.energy_minus.max_rel < 1e-8, d.energy_minus.max_rel,
              "< 1e-8 (relative)");
        check(r, name + ".energy_plus", d.energy_plus.max_rel > 1e-4, d.energy_plus.max_rel,
              "> 1e-4 (relative, not conserved)");
      } else if (done) {
        check(r, name + ".mass", d.mass.max_rel < 1e-12, d.mass.max_rel, "< 1e-12 (relative)");
      }
    }
    if (model == models.front()) r.primary = std::move(t);
  }
  return r;
}

ScenarioResult convergence(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const State initial = adapted_initial(initial_state(spec), spec.sim.model);
  const ConvergenceResult c = convergence_study(initial, spec.sim, spec.refinements);
  json points = json::array();
  for (const auto& p : c.points) points.push_back({{"dt", p.dt}, {"error", p.error}});
  r.metrics["points"] = points;
  r.metrics["reference_dt"] = c.reference_dt;
  r.metrics["degenerate"] = c.degenerate;
  if (c.order) {
    r.metrics["order"] = *c.order;
    check(r, "order", std::fabs(*c.order - 4.0) <= 0.2, *c.order, "4.0 +/- 0.2");
  } else {
    r.metrics["order"] = "degenerate";
    check(r, "max_error", true, c.points.front().error, "all errors below 1e-14 (degenerate)");
  }
  r.primary = simulate(initial, spec.sim);
  completed(r, r.primary, to_string(spec.sim.model));
  return r;
}

ScenarioResult linear_limit(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const Grid grid = make_grid(spec);
  const InitialCondition& ic = spec.initial;
  const double L = grid.length();
  const auto profile = [&](double x) {
    const double d = x - ic.center;
    const double wrapped = d - L * std::round(d / L);
    const double q = wrapped / ic.width;
    return std::exp(-q * q);
  };

  std::vector<double> eps_list, errors;
  json runs = json::array();
  for (double eps : spec.eps_values) {
    const Field eta = Field::from_function(grid, profile);
    const State initial{eps * eta, eps * eta + 1.0, 0.0};
    SimConfig cfg = spec.sim;
    cfg.eps = eps;
    Trajectory t = simulate(initial, cfg);
    r.extra_diagnostics.emplace_back("eps_" + std::to_string(eps), t.diagnostics);
    if (!completed(r, t, "eps " + std::to_string(eps))) {
      if (r.primary.states.empty()) r.primary = std::move(t);
      continue;
    }
    const State& last = t.states.back();
    const double T = last.t;
    const Field translated =
        Field::from_function(grid, [&](double x) { return profile(x - T); });
    const Field eta_num = (1.0 / eps) * (last.H - 1.0);
    const double err = (eta_num - translated).max_abs();
    eps_list.push_back(eps);
    errors.push_back(err);
    runs.push_back({{"eps", eps}, {"linf_error", err}});
    if (r.primary.states.empty()) r.primary = std::move(t);
  }
  r.metrics["runs"] = runs;
  if (errors.size() == spec.eps_values.size()) {
    const double slope = fit_loglog_slope(eps_list, errors);
    r.metrics["slope"] = slope;
    check(r, "slope", std::fabs(slope - 1.0) <= 0.3, slope, "1.0 +/- 0.3");
    const auto largest = std::max_element(eps_list.begin(), eps_list.end()) - eps_list.begin();
    const auto smallest = std::min_element(eps_list.begin(), eps_list.end()) - eps_list.begin();
    const double ratio = errors[largest] / errors[smallest];
    r.metrics["error_ratio"] = ratio;
    check(r, "error_ratio", ratio >= 3.0, ratio, ">= 3 (largest over smallest eps)");
  }
  return r;
}

// Both mismatched pairings: the Plus action on a Minus trajectory and the
// Minus action on a Plus trajectory. Each must fail the separation.
void crossover_checks(ScenarioResult& r, const ExperimentSpec& spec, const FlowPath* plus_path,
                      const FlowPath* minus_path) {
  const auto build = [&](Model model) -> std::optional<FlowPath> {
    Trajectory t = path_trajectory(spec, model);
    if (!completed(r, t, to_string(model))) return std::nullopt;
    return flow_from_velocity(t);
  };
  std::optional<FlowPath> owned_plus, owned_minus;
  if (plus_path == nullptr) {
    owned_plus = build(Model::TwoCHPlus);
    if (owned_plus) plus_path = &*owned_plus;
  }
  if (minus_path == nullptr) {
    owned_minus = build(Model::TwoCHMinus);
    if (owned_minus) minus_path = &*owned_minus;
  }
  const StationarityOptions opt = stationarity_options(spec);
  if (minus_path != nullptr) {
    const StationarityReport rep = stationarity_test(*minus_path, Sign::Plus, opt);
    r.metrics["crossover"]["plus_action_on_minus_trajectory"] = stationarity_json(rep);
    check(r, "crossover.plus_on_minus.separation_ratio", !rep.separated, rep.separation_ratio,
          "> 1e-2 (must not separate)");
  }
  if (plus_path != nullptr) {
    const StationarityReport rep = stationarity_test(*plus_path, Sign::Minus, opt);
    r.metrics["crossover"]["minus_action_on_plus_trajectory"] = stationarity_json(rep);
    check(r, "crossover.minus_on_plus.separation_ratio", !rep.separated, rep.separation_ratio,
          "> 1e-2 (must not separate)");
  }
}

ScenarioResult subgroup_invariance(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const Grid grid = make_grid(spec);
  std::mt19937_64 rng(spec.seed);
  const Relabeling shift{grid.length() / 3.0, Field(grid)};
  json values = json::array();
  double worst = 0.0;
  const Sign variant = sign_of(spec.sim.model);
  for (std::size_t k = 0; k < spec.trials; ++k) {
    const FlowPath path = random_flow_path(grid, spec.slices + 1, spec.sim.t_end, rng);
    const InvarianceResult res = subgroup_invariance_check(path, shift, variant);
    worst = std::max(worst, std::fabs(res.after - res.before));
    values.push_back({{"before", res.before}, {"after", res.after}});
  }
  r.metrics["actions"] = values;
  r.metrics["variant"] = to_string(variant);
  check(r, "max_action_difference", worst <= 1e-8, worst, "<= 1e-8");
  r.primary = initial_only(initial_state(spec));
  return r;
}

ScenarioResult stationarity(const ExperimentSpec& spec) {
  if (spec.check == "subgroup_invariance") return subgroup_invariance(spec);
  ScenarioResult r;
  r.passed = true;
  const Model model = spec.sim.model;
  Trajectory t = path_trajectory(spec, model);
  if (!completed(r, t, to_string(model))) {
    r.primary = std::move(t);
    return r;
  }
  const FlowPath path = flow_from_velocity(t);
  const StationarityReport rep = stationarity_test(path, sign_of(model), stationarity_options(spec));
  r.metrics["variant"] = to_string(sign_of(model));
  r.metrics["stationarity"] = stationarity_json(rep);
  check(r, "separation_ratio", rep.separated, rep.separation_ratio, "<= 1e-2");
  check(r, "max_relative_mismatch", rep.matched, rep.max_relative_mismatch, "<= 1e-3");
  if (spec.crossover) {
    crossover_checks(r, spec, model == Model::TwoCHPlus ? &path : nullptr,
                     model == Model::TwoCHMinus ? &path : nullptr);
  }
  r.primary = std::move(t);
  return r;
}

ScenarioResult sign_crossover(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  crossover_checks(r, spec, nullptr, nullptr);
  r.primary = path_trajectory(spec, spec.sim.model);
  return r;
}

double relative_error(const Field& a, const Field& b) {
  const double scale = std::max(b.max_abs(), std::numeric_limits<double>::min());
  return (a - b).max_abs() / scale;
}

bool bitwise_equal(const Field& a, const Field& b) {
  return std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

ScenarioResult formulation_equivalence(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const Grid grid = make_grid(spec);
  std::mt19937_64 rng(spec.seed);
  double worst_u = 0.0;
  double worst_H = 0.0;
  for (std::size_t k = 0; k < spec.samples; ++k) {
    const State s = random_smooth_state(grid, rng, spec.initial.u_amp, spec.initial.H_amp);
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const Tendency a = twoch_rhs(s, sign);
      const Tendency b = twoch_rhs_momentum(to_momentum(s), sign);
      worst_u = std::max(worst_u, relative_error(helmholtz_inverse(b.first), a.first));
      worst_H = std::max(worst_H, relative_error(b.second, a.second));
    }
    if (k == 0) r.primary = initial_only(s);
  }
  r.metrics["samples"] = spec.samples;
  check(r, "u_t_relative_difference", worst_u <= 1e-9, worst_u, "<= 1e-9");
  check(r, "H_t_relative_difference", worst_H <= 1e-9, worst_H, "<= 1e-9");
  return r;
}

ScenarioResult ch_reduction(const ExperimentSpec& spec) {
  if (spec.check == "formulation_equivalence") return formulation_equivalence(spec);
  ScenarioResult r;
  r.passed = true;
  const Grid grid = make_grid(spec);
  std::mt19937_64 rng(spec.seed);
  std::size_t unequal = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < spec.samples; ++k) {
    const Field u = random_smooth_state(grid, rng, spec.initial.u_amp, 0.0).u;
    const State s{u, Field(grid), 0.0};
    const Tendency plus = ch_reduction_check(s, Sign::Plus);
    const Tendency minus = ch_reduction_check(s, Sign::Minus);
    if (!bitwise_equal(plus.first, minus.first) || !bitwise_equal(plus.second, minus.second)) {
      ++unequal;
    }
    worst = std::max(worst, relative_error(plus.first, camassa_holm_rhs(u)));
    if (k == 0) r.primary = initial_only(s);
  }
  check(r, "plus_minus_unequal_samples", unequal == 0, static_cast<double>(unequal),
        "== 0 (bitwise equal)");
  check(r, "camassa_holm_relative_difference", worst <= 1e-12, worst, "<= 1e-12");
  return r;
}

ScenarioResult kinematic(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const double eps = spec.sim.eps;
  Trajectory t = simulate(initial_state(spec), spec.sim);
  completed(r, t, "swe");
  double worst = 0.0;
  json per_sample = json::array();
  for (const State& s : t.states) {
    const Field eta = (1.0 / eps) * (s.H - 1.0);
    const Field eta_t = (1.0 / eps) * swe_rhs(s).second;
    const Field target = eps * (eta_t + s.u * diff(eta, 1));
    const Field v = reconstruct_diagnostics(s, eps, s.H).v;
    const double e = (v - target).max_abs();
    worst = std::max(worst, e);
    per_sample.push_back({{"t", s.t}, {"max_abs_difference", e}});
  }
  r.metrics["samples"] = per_sample;
  check(r, "max_abs_difference", worst <= 1e-6, worst, "<= 1e-6 at every sample");
  r.primary = std::move(t);
  return r;
}

ScenarioResult eps_truncation(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  const State base = initial_state(spec);
  const Field shape_u = base.u;
  const Field shape_eta = base.H - 1.0;
  std::vector<double> eps_list, gaps;
  json values = json::array();
  for (double eps : spec.eps_values) {
    const State s{eps * shape_u, eps * shape_eta + 1.0, 0.0};
    const double gap = kinetic_exact(s) - kinetic_approx(s);
    eps_list.push_back(eps);
    gaps.push_back(gap);
    values.push_back({{"eps", eps}, {"kinetic_exact_minus_approx", gap}});
  }
  r.metrics["values"] = values;
  const bool positive = std::all_of(gaps.begin(), gaps.end(), [](double g) { return g > 0.0; });
  if (positive) {
    const double slope = fit_loglog_slope(eps_list, gaps);
    r.metrics["slope"] = slope;
    check(r, "slope", slope >= 2.7, slope, ">= 2.7");
  } else {
    check(r, "gap_positive", false, *std::min_element(gaps.begin(), gaps.end()), "> 0");
  }
  r.primary = initial_only(base);
  return r;
}

ScenarioResult swe_comparison(const ExperimentSpec& spec) {
  return spec.check == "eps_truncation" ? eps_truncation(spec) : kinematic(spec);
}

ScenarioResult custom(const ExperimentSpec& spec) {
  ScenarioResult r;
  r.passed = true;
  r.primary = simulate(adapted_initial(initial_state(spec), spec.sim.model), spec.sim);
  if (completed(r, r.primary, to_string(spec.sim.model)) && r.primary.diagnostics.size() >= 2) {
    r.metrics["drifts"] = drift_json(drift_report(r.primary));
  }
  return r;
}

}  // namespace

Field camassa_holm_rhs(const Field& u) {
  const Field ux = diff(u, 1);
  const Field uxx = diff(u, 2);
  const Field uxxx = diff(u, 3);
  Field bracket(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    bracket[i] = -3.0 * u[i] * ux[i] + 2.0 * ux[i] * uxx[i] + u[i] * uxxx[i];
  }
  return helmholtz_inverse(bracket);
}

ScenarioResult run_scenario(const ExperimentSpec& spec) {
  validate(spec);
  switch (spec.scenario) {
    case Scenario::Conservation: return conservation(spec);
    case Scenario::Convergence: return convergence(spec);
    case Scenario::LinearLimit: return linear_limit(spec);
    case Scenario::VariationalStationarity: return stationarity(spec);
    case Scenario::SignCrossover: return sign_crossover(spec);
    case Scenario::ChReduction: return ch_reduction(spec);
    case Scenario::SweComparison: return swe_comparison(spec);
    case Scenario::Custom: return custom(spec);
  }
  throw PreconditionError("run_scenario: unknown scenario");
}

}  // namespace twoch
