// SPDX-License-Identifier: Apache-2.0
//
// Scalar functionals on a State: kinetic energy at the free surface (exact
// and truncated), potential energy, their difference (the Eulerian
// Lagrangian) and sum (the metric), and the conserved quantities of the
// two-component system.
//
// Conservation (derivation in docs/conservation.md): along
//   m_t + u m_x + 2 u_x m + s H H_x = 0,  H_t + (H u)_x = 0,  s = +1 or -1,
// d/dt 1/2 int(u^2 + u_x^2) = int u m_t = -int (u^2 m)_x - s int u H H_x
//                           = -s int u H H_x,
// d/dt 1/2 int (H-1)^2 = -int (H-1)(H u)_x = int H_x H u.
// Hence energy_plus = 1/2 int(u^2 + u_x^2 + (H-1)^2) is invariant for s = +1
// and energy_minus = 1/2 int(u^2 + u_x^2 - (H-1)^2) for s = -1.

#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "twoch/models.hpp"

namespace twoch {

// 1/2 int [u^2 + H^2 u_x^2] dx, with H = 1 + eps eta.
double kinetic_exact(const State& s);
double kinetic_exact(const ElevationState& s, double eps);

// 1/2 int (u^2 + u_x^2) dx.
double kinetic_approx(const State& s);

// 1/2 int (H - 1)^2 dx.
double potential(const State& s);

// kinetic_approx - potential.
double lagrangian(const State& s);
// kinetic_approx + potential.
double metric(const State& s);

struct ConservedQuantities {
  double mass;          // int (H - 1) dx
  double momentum;      // int m dx
  double energy_plus;   // 1/2 int (u^2 + u_x^2 + (H-1)^2) dx
  double energy_minus;  // 1/2 int (u^2 + u_x^2 - (H-1)^2) dx
};

ConservedQuantities conserved_quantities(const State& s);

// One row of diagnostics.csv.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy_plus = 0.0;
  double energy_minus = 0.0;
  double kinetic_exact = 0.0;
  double kinetic_approx = 0.0;
  double potential = 0.0;
  double lagrangian = 0.0;
  double metric = 0.0;

  static constexpr std::size_t kColumns = 10;
  static const std::array<std::string_view, kColumns>& column_names();
  std::array<double, kColumns> values() const;
};

DiagnosticsRecord diagnostics(const State& s);

struct Drift {
  double max_abs = 0.0;
  double max_rel = 0.0;
};

// Drift of each quantity relative to the first record. Relative drifts divide
// by max(|initial|, 1e-30).
struct DriftReport {
  Drift mass;
  Drift momentum;
  Drift energy_plus;
  Drift energy_minus;
  Drift kinetic_exact;
  Drift kinetic_approx;
  Drift potential;
  Drift lagrangian;
  Drift metric;
};

// Requires at least two records.
DriftReport drift_report(const std::vector<DiagnosticsRecord>& records);

}  // namespace twoch
