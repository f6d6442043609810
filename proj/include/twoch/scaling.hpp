// SPDX-License-Identifier: Apache-2.0
//
// Conversion between physical water-wave variables and the non-dimensional
// variables used by the models. Density is fixed to 1. Pressure is split as
// p_phys = p0 + g h0 (1 - z) + g h0 p, so the model pressure p is always the
// dynamic deviation from hydrostatic.

#pragma once

namespace twoch {

struct PhysicalScales {
  double h0 = 1.0;      // undisturbed depth [m]
  double lambda = 1.0;  // horizontal (wavelength) scale [m]
  double a = 0.1;       // amplitude scale [m]
  double g = 9.81;      // gravity [m/s^2]
  double p0 = 0.0;      // atmospheric pressure

  // Throws PreconditionError unless h0, lambda, a and g are positive and finite.
  void validate() const;
};

struct WaveParameters {
  double eps;    // a / h0
  double delta;  // h0 / lambda
};

WaveParameters params(const PhysicalScales& s);

// One sample of the water-wave variables at (x, z, t).
struct WaveVariables {
  double x = 0.0;
  double z = 0.0;
  double eta = 0.0;
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
};

WaveVariables phys_to_nondim(const WaveVariables& phys, const PhysicalScales& s);
WaveVariables nondim_to_phys(const WaveVariables& nondim, const PhysicalScales& s);

// H = 1 + eps eta and its inverse.
double surface_from_elevation(double eta, double eps);
double elevation_from_surface(double H, double eps);

}  // namespace twoch
