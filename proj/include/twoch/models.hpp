// SPDX-License-Identifier: Apache-2.0
//
// Method-of-lines right-hand sides for the two-component Camassa-Holm system,
// the classical shallow water equations, their elevation form, the linear
// wave system and the single-component reduction.
//
// All nonlinear right-hand sides project their inputs and the products onto
// the 2/3-rule band before differentiating, so the semi-discrete systems are
// Galerkin truncations of the continuous ones.

#pragma once

#include <stdexcept>

#include "twoch/grid.hpp"

namespace twoch {

// Selects the sign in front of H H_x. Plus is the shallow-water variant.
enum class Sign { Plus, Minus };

const char* to_string(Sign s);

// Velocity u and free surface H = 1 + eps * eta at time t.
struct State {
  Field u;
  Field H;
  double t = 0.0;
};

// Velocity u and surface elevation eta (H = 1 + eps * eta).
struct ElevationState {
  Field u;
  Field eta;
  double t = 0.0;
};

// Momentum density m = u - u_xx together with H.
struct MomentumState {
  Field m;
  Field H;
  double t = 0.0;
};

// Time derivatives of the two fields of a state, in declaration order:
// (u_t, H_t) for State, (u_t, eta_t) for ElevationState, (m_t, H_t) for
// MomentumState.
struct Tendency {
  Field first;
  Field second;
};

// Raised when a right-hand side produces NaN or infinity; for hyperbolic runs
// this usually means the wave has steepened past what the grid resolves.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when H is not strictly positive somewhere; a PreconditionError so
// callers that validate inputs catch it as such.
class NonPositiveDepth : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// (1 - d_xx) u_t = -3 u u_x + 2 u_x u_xx + u u_xxx -/+ H H_x,  H_t = -(H u)_x.
// Requires H > 0.
Tendency twoch_rhs(const State& s, Sign sign);

// m_t = -(u m_x + 2 u_x m) -/+ H H_x with u = (1 - d_xx)^{-1} m.
Tendency twoch_rhs_momentum(const MomentumState& s, Sign sign);

MomentumState to_momentum(const State& s);
State from_momentum(const MomentumState& s);

// Classical shallow water: u_t = -u u_x - H_x, H_t = -(H u)_x. Requires H > 0.
Tendency swe_rhs(const State& s);

// Shallow water in elevation form: u_t = -u u_x - eps eta_x,
// eps eta_t = -[(1 + eps eta) u]_x. Requires eps > 0.
Tendency sw1_rhs(const ElevationState& s, double eps);

// Linearised system: u_t = -eps eta_x, eps eta_t = -u_x. Requires eps > 0.
Tendency linear_rhs(const ElevationState& s, double eps);

// The 2CH right-hand side evaluated with H identically zero, where it reduces
// to the Camassa-Holm equation. Requires H == 0 at every node; the H > 0
// requirement of twoch_rhs does not apply.
Tendency ch_reduction_check(const State& s, Sign sign);

ElevationState to_elevation(const State& s, double eps);
State from_elevation(const ElevationState& s, double eps);

// Vertical velocity v = -z u_x and dynamic pressure p = eps eta = H - 1 of
// the leading-order shallow-water flow.
struct VelocityPressure {
  Field v;
  Field p;
};

// At a fixed height z, which must satisfy 0 <= z <= H everywhere.
VelocityPressure reconstruct_diagnostics(const State& s, double eps, double z);
// At a height that varies along x (e.g. z = H for the free surface).
VelocityPressure reconstruct_diagnostics(const State& s, double eps, const Field& z);

}  // namespace twoch
