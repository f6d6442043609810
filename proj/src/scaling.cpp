// SPDX-License-Identifier: Apache-2.0

#include "twoch/scaling.hpp"

#include <cmath>

#include "twoch/grid.hpp"

namespace twoch {
namespace {

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void PhysicalScales::validate() const {
  if (!positive(h0) || !positive(lambda) || !positive(a) || !positive(g)) {
    throw PreconditionError("scales: h0, lambda, a and g must be positive and finite");
  }
  if (!std::isfinite(p0)) throw PreconditionError("scales: p0 must be finite");
}

WaveParameters params(const PhysicalScales& s) {
  s.validate();
  return {s.a / s.h0, s.h0 / s.lambda};
}

WaveVariables phys_to_nondim(const WaveVariables& phys, const PhysicalScales& s) {
  s.validate();
  const double c = std::sqrt(s.g * s.h0);
  WaveVariables nd;
  nd.x = phys.x / s.lambda;
  nd.z = phys.z / s.h0;
  nd.eta = phys.eta / s.a;
  nd.t = phys.t * c / s.lambda;
  nd.u = phys.u / c;
  nd.v = phys.v * s.lambda / (s.h0 * c);
  nd.p = (phys.p - s.p0 - s.g * s.h0 * (1.0 - nd.z)) / (s.g * s.h0);
  return nd;
}

WaveVariables nondim_to_phys(const WaveVariables& nd, const PhysicalScales& s) {
  s.validate();
  const double c = std::sqrt(s.g * s.h0);
  WaveVariables phys;
  phys.x = s.lambda * nd.x;
  phys.z = s.h0 * nd.z;
  phys.eta = s.a * nd.eta;
  phys.t = s.lambda / c * nd.t;
  phys.u = c * nd.u;
  phys.v = s.h0 * c / s.lambda * nd.v;
  phys.p = s.p0 + s.g * s.h0 * (1.0 - nd.z) + s.g * s.h0 * nd.p;
  return phys;
}

double surface_from_elevation(double eta, double eps) { return 1.0 + eps * eta; }
double elevation_from_surface(double H, double eps) { return (H - 1.0) / eps; }

}  // namespace twoch
