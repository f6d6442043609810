// SPDX-License-Identifier: Apache-2.0

#include "twoch/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "twoch/kernels.hpp"

namespace twoch {

double kinetic_exact(const State& s) {
  require_same_grid(s.u, s.H, "kinetic_exact");
  const Field ux = diff(s.u, 1);
  const Field Hux = s.H * ux;
  const double h = s.u.grid().spacing();
  return 0.5 * h * (kernels::dot(s.u.values(), s.u.values()) +
                    kernels::dot(Hux.values(), Hux.values()));
}

double kinetic_exact(const ElevationState& s, double eps) {
  return kinetic_exact(from_elevation(s, eps));
}

double kinetic_approx(const State& s) {
  const Field ux = diff(s.u, 1);
  const double h = s.u.grid().spacing();
  return 0.5 * h *
         (kernels::dot(s.u.values(), s.u.values()) + kernels::dot(ux.values(), ux.values()));
}

double potential(const State& s) {
  const Field eta = s.H - 1.0;
  return 0.5 * s.H.grid().spacing() * kernels::dot(eta.values(), eta.values());
}

double lagrangian(const State& s) { return kinetic_approx(s) - potential(s); }
double metric(const State& s) { return kinetic_approx(s) + potential(s); }

ConservedQuantities conserved_quantities(const State& s) {
  require_same_grid(s.u, s.H, "conserved_quantities");
  const double ke = kinetic_approx(s);
  const double pe = potential(s);
  return {quadrature(s.H - 1.0), quadrature(helmholtz(s.u)), ke + pe, ke - pe};
}

const std::array<std::string_view, DiagnosticsRecord::kColumns>&
DiagnosticsRecord::column_names() {
  static const std::array<std::string_view, kColumns> names{
      "t",           "mass",          "momentum",       "energy_plus", "energy_minus",
      "kinetic_exact", "kinetic_approx", "potential", "lagrangian",  "metric"};
  return names;
}

std::array<double, DiagnosticsRecord::kColumns> DiagnosticsRecord::values() const {
  return {t, mass, momentum, energy_plus, energy_minus,
          kinetic_exact, kinetic_approx, potential, lagrangian, metric};
}

DiagnosticsRecord diagnostics(const State& s) {
  DiagnosticsRecord r;
  r.t = s.t;
  const double ke = kinetic_approx(s);
  const double pe = potential(s);
  r.mass = quadrature(s.H - 1.0);
  r.momentum = quadrature(helmholtz(s.u));
  r.energy_plus = ke + pe;
  r.energy_minus = ke - pe;
  r.kinetic_exact = kinetic_exact(s);
  r.kinetic_approx = ke;
  r.potential = pe;
  r.lagrangian = ke - pe;
  r.metric = ke + pe;
  return r;
}

namespace {

template <class Get>
Drift drift_of(const std::vector<DiagnosticsRecord>& records, Get get) {
  const double first = get(records.front());
  const double denom = std::max(std::fabs(first), 1e-30);
  Drift d;
  for (const auto& r : records) {
    const double a = std::fabs(get(r) - first);
    d.max_abs = std::max(d.max_abs, a);
  }
  d.max_rel = d.max_abs / denom;
  return d;
}

}  // namespace

DriftReport drift_report(const std::vector<DiagnosticsRecord>& records) {
  if (records.size() < 2) {
    throw PreconditionError("drift_report: need at least two diagnostic records");
  }
  DriftReport d;
  d.mass = drift_of(records, [](const auto& r) { return r.mass; });
  d.momentum = drift_of(records, [](const auto& r) { return r.momentum; });
  d.energy_plus = drift_of(records, [](const auto& r) { return r.energy_plus; });
  d.energy_minus = drift_of(records, [](const auto& r) { return r.energy_minus; });
  d.kinetic_exact = drift_of(records, [](const auto& r) { return r.kinetic_exact; });
  d.kinetic_approx = drift_of(records, [](const auto& r) { return r.kinetic_approx; });
  d.potential = drift_of(records, [](const auto& r) { return r.potential; });
  d.lagrangian = drift_of(records, [](const auto& r) { return r.lagrangian; });
  d.metric = drift_of(records, [](const auto& r) { return r.metric; });
  return d;
}

}  // namespace twoch
