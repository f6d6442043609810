// SPDX-License-Identifier: Apache-2.0
//
// Fixed-step classical RK4, the simulation driver and a self-convergence
// harness.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "twoch/functionals.hpp"
#include "twoch/kernels.hpp"
#include "twoch/models.hpp"

namespace twoch {

enum class Model { TwoCHPlus, TwoCHMinus, SWE, SW1, Linear, CHReduction };

const char* to_string(Model m);
// Accepts the names produced by to_string; throws PreconditionError otherwise.
Model model_from_string(const std::string& name);
const std::vector<Model>& all_models();

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  // Steps between diagnostic records.
  std::size_t sample_every = 1;
  // Steps between stored state snapshots; 0 means "same as sample_every".
  std::size_t snapshot_every = 0;
  Model model = Model::TwoCHPlus;
  // Amplitude parameter for the SW1 and Linear models.
  double eps = 0.1;
  // A run stops with BreakingSuspected once max |u_x| exceeds this.
  double blowup_threshold = 1e3;
};

// Throws PreconditionError for dt >= t_end, non-positive values, or a t_end
// that is not an integer number of steps.
void validate(const SimConfig& cfg);
std::size_t step_count(const SimConfig& cfg);

enum class RunStatus { Completed, BreakingSuspected, NonFinite };
const char* to_string(RunStatus s);

struct Trajectory {
  std::vector<State> states;
  std::vector<DiagnosticsRecord> diagnostics;
  RunStatus status = RunStatus::Completed;
  std::string message;
};

// Field accessors used by the generic RK4 step.
template <class S>
struct StateFields;
template <>
struct StateFields<State> {
  static constexpr auto first = &State::u;
  static constexpr auto second = &State::H;
};
template <>
struct StateFields<ElevationState> {
  static constexpr auto first = &ElevationState::u;
  static constexpr auto second = &ElevationState::eta;
};
template <>
struct StateFields<MomentumState> {
  static constexpr auto first = &MomentumState::m;
  static constexpr auto second = &MomentumState::H;
};

// One classical four-stage Runge-Kutta step; rhs is any callable
// Tendency(const S&). Errors raised by rhs propagate.
template <class S, class Rhs>
S rk4_step(const S& s, double dt, Rhs&& rhs) {
  using F = StateFields<S>;
  auto stage = [&s](const Tendency& k, double h) {
    S out = s;
    (out.*F::first).add_scaled(h, k.first);
    (out.*F::second).add_scaled(h, k.second);
    out.t = s.t + h;
    return out;
  };
  const Tendency k1 = rhs(s);
  const Tendency k2 = rhs(stage(k1, 0.5 * dt));
  const Tendency k3 = rhs(stage(k2, 0.5 * dt));
  const Tendency k4 = rhs(stage(k3, dt));
  S out = s;
  kernels::rk4_combine((s.*F::first).values(), k1.first.values(), k2.first.values(),
                       k3.first.values(), k4.first.values(), dt, (out.*F::first).values());
  kernels::rk4_combine((s.*F::second).values(), k1.second.values(), k2.second.values(),
                       k3.second.values(), k4.second.values(), dt, (out.*F::second).values());
  out.t = s.t + dt;
  return out;
}

// The same update applied to s in place with compensated summation. carry
// starts as zero fields and is passed unchanged between steps; it keeps the
// rounding of long runs from accumulating in the state.
template <class S, class Rhs>
void rk4_step_compensated(S& s, S& carry, double dt, Rhs&& rhs) {
  using F = StateFields<S>;
  auto stage = [&s](const Tendency& k, double h) {
    S out = s;
    (out.*F::first).add_scaled(h, k.first);
    (out.*F::second).add_scaled(h, k.second);
    out.t = s.t + h;
    return out;
  };
  const Tendency k1 = rhs(s);
  const Tendency k2 = rhs(stage(k1, 0.5 * dt));
  const Tendency k3 = rhs(stage(k2, 0.5 * dt));
  const Tendency k4 = rhs(stage(k3, dt));
  kernels::rk4_accumulate((s.*F::first).values(), (carry.*F::first).values(), k1.first.values(),
                          k2.first.values(), k3.first.values(), k4.first.values(), dt);
  kernels::rk4_accumulate((s.*F::second).values(), (carry.*F::second).values(),
                          k1.second.values(), k2.second.values(), k3.second.values(),
                          k4.second.values(), dt);
  s.t += dt;
}

// Right-hand side of a State-valued model (all except SW1 and Linear, which
// evolve an ElevationState).
Tendency state_rhs(Model model, const State& s);

// Integrates from `initial` to initial.t + t_end with compensated RK4 steps.
// For SW1 and Linear the
// state's H is read as 1 + eps eta. Blow-up is reported via the status,
// invalid configurations throw.
Trajectory simulate(const State& initial, const SimConfig& cfg);

// Advective CFL estimate dt <= courant * dx / max|u|; +inf for u == 0.
double suggest_dt(const State& s, double courant = 0.5);

struct ConvergencePoint {
  double dt;
  double error;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  // Step of the reference run the errors are measured against.
  double reference_dt = 0.0;
  // Least-squares slope of log(error) against log(dt); empty when every
  // error sits at round-off (degenerate).
  std::optional<double> order;
  bool degenerate = false;
};

// Runs with dt, dt/2, ..., dt/2^(refinements-1), plus a reference run at half
// the finest step, and measures the max-norm error of (u, H) at t_end.
// Requires refinements >= 3; throws if any run fails to complete.
ConvergenceResult convergence_study(const State& initial, const SimConfig& cfg,
                                    std::size_t refinements);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

DriftReport drift_report(const Trajectory& traj);

}  // namespace twoch
