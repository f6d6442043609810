// SPDX-License-Identifier: Apache-2.0

#include "twoch/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twoch {

const char* to_string(Model m) {
  switch (m) {
    case Model::TwoCHPlus: return "twoch_plus";
    case Model::TwoCHMinus: return "twoch_minus";
    case Model::SWE: return "swe";
    case Model::SW1: return "sw1";
    case Model::Linear: return "linear";
    case Model::CHReduction: return "ch_reduction";
  }
  return "unknown";
}

Model model_from_string(const std::string& name) {
  for (Model m : all_models()) {
    if (name == to_string(m)) return m;
  }
  throw PreconditionError("unknown model '" + name +
                          "' (expected twoch_plus, twoch_minus, swe, sw1, linear, ch_reduction)");
}

const std::vector<Model>& all_models() {
  static const std::vector<Model> models{Model::TwoCHPlus, Model::TwoCHMinus, Model::SWE,
                                         Model::SW1,       Model::Linear,     Model::CHReduction};
  return models;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BreakingSuspected: return "breaking_suspected";
    case RunStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

std::size_t step_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
}

void validate(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw PreconditionError("sim: dt must be positive");
  }
  if (!(cfg.t_end > cfg.dt) || !std::isfinite(cfg.t_end)) {
    throw PreconditionError("sim: t_end must be finite and larger than dt");
  }
  if (cfg.sample_every < 1) throw PreconditionError("sim: sample_every must be >= 1");
  if (!(cfg.blowup_threshold > 0.0)) {
    throw PreconditionError("sim: blowup_threshold must be positive");
  }
  if ((cfg.model == Model::SW1 || cfg.model == Model::Linear) && !(cfg.eps > 0.0)) {
    throw PreconditionError("sim: eps must be positive for the sw1 and linear models");
  }
  const double steps = cfg.t_end / cfg.dt;
  if (std::fabs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
    throw PreconditionError("sim: t_end must be an integer multiple of dt");
  }
}

Tendency state_rhs(Model model, const State& s) {
  switch (model) {
    case Model::TwoCHPlus: return twoch_rhs(s, Sign::Plus);
    case Model::TwoCHMinus: return twoch_rhs(s, Sign::Minus);
    case Model::SWE: return swe_rhs(s);
    case Model::CHReduction: return ch_reduction_check(s, Sign::Plus);
    case Model::SW1:
    case Model::Linear: break;
  }
  throw PreconditionError(std::string("state_rhs: model ") + to_string(model) +
                          " evolves (u, eta), not (u, H)");
}

namespace {

template <class S, class Rhs, class ToState>
Trajectory run_loop(S s, const SimConfig& cfg, Rhs&& rhs, ToState&& to_state) {
  const std::size_t steps = step_count(cfg);
  const std::size_t snap_every = cfg.snapshot_every == 0 ? cfg.sample_every : cfg.snapshot_every;
  const double t0 = s.t;

  Trajectory traj;
  const auto record = [&](const S& cur, std::size_t step) {
    const bool sample = step % cfg.sample_every == 0 || step == steps;
    const bool snap = step % snap_every == 0 || step == steps;
    if (!sample && !snap) return;
    State st = to_state(cur);
    if (sample) traj.diagnostics.push_back(diagnostics(st));
    if (snap) traj.states.push_back(std::move(st));
  };
  const auto slope_check = [&](const S& cur) {
    const Field& u = cur.*StateFields<S>::first;
    const double ux = diff(u, 1).max_abs();
    return ux;
  };

  // Invalid initial data is an input error, not a run outcome.
  rhs(s);
  record(s, 0);
  S carry = s;
  (carry.*StateFields<S>::first) *= 0.0;
  (carry.*StateFields<S>::second) *= 0.0;
  for (std::size_t step = 1; step <= steps; ++step) {
    try {
      rk4_step_compensated(s, carry, cfg.dt, rhs);
    } catch (const NonFiniteError& e) {
      traj.status = RunStatus::NonFinite;
      traj.message = e.what();
      return traj;
    } catch (const NonPositiveDepth& e) {
      traj.status = RunStatus::BreakingSuspected;
      traj.message = std::string(e.what()) + " during the step after t = " + std::to_string(s.t);
      return traj;
    }
    s.t = t0 + static_cast<double>(step) * cfg.dt;
    const Field& u = s.*StateFields<S>::first;
    const Field& second = s.*StateFields<S>::second;
    if (!u.all_finite() || !second.all_finite()) {
      traj.status = RunStatus::NonFinite;
      traj.message = "non-finite state at t = " + std::to_string(s.t);
      return traj;
    }
    const double ux = slope_check(s);
    if (!(ux <= cfg.blowup_threshold)) {
      traj.status = RunStatus::BreakingSuspected;
      traj.message = "max |u_x| = " + std::to_string(ux) + " exceeds threshold " +
                     std::to_string(cfg.blowup_threshold) + " at t = " + std::to_string(s.t);
      // Keep the offending sample so the output shows where the run stopped.
      State st = to_state(s);
      traj.diagnostics.push_back(diagnostics(st));
      traj.states.push_back(std::move(st));
      return traj;
    }
    record(s, step);
  }
  return traj;
}

}  // namespace

Trajectory simulate(const State& initial, const SimConfig& cfg) {
  validate(cfg);
  require_same_grid(initial.u, initial.H, "simulate");
  const Model model = cfg.model;
  if (model == Model::SW1 || model == Model::Linear) {
    const double eps = cfg.eps;
    auto rhs = [model, eps](const ElevationState& e) {
      return model == Model::SW1 ? sw1_rhs(e, eps) : linear_rhs(e, eps);
    };
    return run_loop(to_elevation(initial, eps), cfg, rhs,
                    [eps](const ElevationState& e) { return from_elevation(e, eps); });
  }
  auto rhs = [model](const State& st) { return state_rhs(model, st); };
  return run_loop(initial, cfg, rhs, [](const State& st) { return st; });
}

double suggest_dt(const State& s, double courant) {
  const double umax = s.u.max_abs();
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return courant * s.u.grid().spacing() / umax;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("fit_loglog_slope: need >= 2 matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw PreconditionError("fit_loglog_slope: values must be positive");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

State final_state(const State& initial, SimConfig cfg) {
  cfg.sample_every = step_count(cfg);
  cfg.snapshot_every = cfg.sample_every;
  Trajectory t = simulate(initial, cfg);
  if (t.status != RunStatus::Completed) {
    throw std::runtime_error("convergence_study: run with dt = " + std::to_string(cfg.dt) +
                             " did not complete: " + t.message);
  }
  return std::move(t.states.back());
}

double max_norm_distance(const State& a, const State& b) {
  return std::max((a.u - b.u).max_abs(), (a.H - b.H).max_abs());
}

}  // namespace

ConvergenceResult convergence_study(const State& initial, const SimConfig& cfg,
                                    std::size_t refinements) {
  if (refinements < 3) throw PreconditionError("convergence_study: refinements must be >= 3");
  validate(cfg);
  ConvergenceResult result;
  std::vector<State> finals;
  SimConfig c = cfg;
  for (std::size_t r = 0; r < refinements; ++r) {
    c.dt = cfg.dt / std::pow(2.0, static_cast<double>(r));
    finals.push_back(final_state(initial, c));
    result.points.push_back({c.dt, 0.0});
  }
  c.dt *= 0.5;
  result.reference_dt = c.dt;
  const State reference = final_state(initial, c);

  std::vector<double> dts, errs;
  bool all_roundoff = true;
  for (std::size_t r = 0; r < refinements; ++r) {
    result.points[r].error = max_norm_distance(finals[r], reference);
    if (result.points[r].error >= 1e-14) all_roundoff = false;
    dts.push_back(result.points[r].dt);
    errs.push_back(result.points[r].error);
  }
  result.degenerate = all_roundoff;
  if (!all_roundoff) result.order = fit_loglog_slope(dts, errs);
  return result;
}

DriftReport drift_report(const Trajectory& traj) { return drift_report(traj.diagnostics); }

}  // namespace twoch
