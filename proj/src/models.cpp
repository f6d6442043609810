// SPDX-License-Identifier: Apache-2.0

#include "twoch/models.hpp"

#include <cmath>
#include <string>

namespace twoch {
namespace {

using cplx = std::complex<double>;
using Spectrum = std::vector<cplx>;

// A field projected onto the dealiased band, with derivatives up to a given
// order, all obtained from one forward transform.
struct Banded {
  Field f;
  std::vector<Field> d;  // d[0] = f_x, d[1] = f_xx, ...

  Banded(const Field& in, int max_order) : f(in.grid()) {
    const Grid& grid = in.grid();
    Spectrum spec = spectrum(in);
    dealias_in_place(grid, spec);
    f = from_spectrum(grid, spec);
    const double omega = grid.fundamental();
    Spectrum work(spec.size());
    for (int order = 1; order <= max_order; ++order) {
      for (std::size_t j = 0; j < spec.size(); ++j) {
        const double k = omega * static_cast<double>(j);
        cplx factor = 1.0;
        for (int p = 0; p < order; ++p) factor *= cplx(0.0, k);
        work[j] = spec[j] * factor;
      }
      d.push_back(from_spectrum(grid, work));
    }
  }
};

// -(g)_x after projecting g onto the band.
Field minus_dx_banded(const Field& g) {
  const Grid& grid = g.grid();
  Spectrum spec = spectrum(g);
  dealias_in_place(grid, spec);
  const double omega = grid.fundamental();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    spec[j] *= cplx(0.0, -omega * static_cast<double>(j));
  }
  return from_spectrum(grid, spec);
}

Field project(const Field& g) { return dealias(g); }

Field helmholtz_inverse_banded(const Field& g) {
  const Grid& grid = g.grid();
  Spectrum spec = spectrum(g);
  dealias_in_place(grid, spec);
  const double omega = grid.fundamental();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double k = omega * static_cast<double>(j);
    spec[j] /= 1.0 + k * k;
  }
  return from_spectrum(grid, spec);
}

void require_positive_surface(const Field& H, const char* what) {
  if (!(H.min() > 0.0)) {
    throw NonPositiveDepth(std::string(what) + ": H must be positive at every node");
  }
}

void require_eps(double eps, const char* what) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw PreconditionError(std::string(what) + ": eps must be positive");
  }
}

Tendency checked(Tendency k, const char* what) {
  if (!k.first.all_finite() || !k.second.all_finite()) {
    throw NonFiniteError(std::string(what) + ": non-finite tendency (breaking suspected)");
  }
  return k;
}

double sign_factor(Sign sign) { return sign == Sign::Plus ? -1.0 : 1.0; }

Tendency twoch_core(const State& s, Sign sign) {
  require_same_grid(s.u, s.H, "twoch_rhs");
  const Banded u(s.u, 3);
  const Banded H(s.H, 1);
  const Field& ux = u.d[0];
  const Field& uxx = u.d[1];
  const Field& uxxx = u.d[2];

  Field bracket = -3.0 * (u.f * ux);
  bracket.add_scaled(2.0, ux * uxx);
  bracket += u.f * uxxx;
  bracket.add_scaled(sign_factor(sign), H.f * H.d[0]);

  return {helmholtz_inverse_banded(bracket), minus_dx_banded(H.f * u.f)};
}

}  // namespace

const char* to_string(Sign s) { return s == Sign::Plus ? "plus" : "minus"; }

Tendency twoch_rhs(const State& s, Sign sign) {
  require_positive_surface(s.H, "twoch_rhs");
  return checked(twoch_core(s, sign), "twoch_rhs");
}

Tendency twoch_rhs_momentum(const MomentumState& s, Sign sign) {
  require_same_grid(s.m, s.H, "twoch_rhs_momentum");
  require_positive_surface(s.H, "twoch_rhs_momentum");
  const Banded m(s.m, 1);
  const Banded u(helmholtz_inverse(m.f), 1);
  const Banded H(s.H, 1);

  Field rhs = -(u.f * m.d[0]);
  rhs.add_scaled(-2.0, u.d[0] * m.f);
  rhs.add_scaled(sign_factor(sign), H.f * H.d[0]);
  return checked({project(rhs), minus_dx_banded(H.f * u.f)}, "twoch_rhs_momentum");
}

MomentumState to_momentum(const State& s) { return {helmholtz(s.u), s.H, s.t}; }

State from_momentum(const MomentumState& s) { return {helmholtz_inverse(s.m), s.H, s.t}; }

Tendency swe_rhs(const State& s) {
  require_same_grid(s.u, s.H, "swe_rhs");
  require_positive_surface(s.H, "swe_rhs");
  const Banded u(s.u, 1);
  const Banded H(s.H, 1);
  Field du = project(u.f * u.d[0]);
  du += H.d[0];
  du *= -1.0;
  return checked({std::move(du), minus_dx_banded(H.f * u.f)}, "swe_rhs");
}

Tendency sw1_rhs(const ElevationState& s, double eps) {
  require_eps(eps, "sw1_rhs");
  require_same_grid(s.u, s.eta, "sw1_rhs");
  const Banded u(s.u, 1);
  const Banded eta(s.eta, 1);
  Field du = project(u.f * u.d[0]);
  du.add_scaled(eps, eta.d[0]);
  du *= -1.0;
  Field depth = eps * eta.f + 1.0;
  Field deta = minus_dx_banded(depth * u.f);
  deta *= 1.0 / eps;
  return checked({std::move(du), std::move(deta)}, "sw1_rhs");
}

Tendency linear_rhs(const ElevationState& s, double eps) {
  require_eps(eps, "linear_rhs");
  require_same_grid(s.u, s.eta, "linear_rhs");
  Field du = -eps * diff(s.eta, 1);
  Field deta = (-1.0 / eps) * diff(s.u, 1);
  return checked({std::move(du), std::move(deta)}, "linear_rhs");
}

Tendency ch_reduction_check(const State& s, Sign sign) {
  for (double h : s.H.values()) {
    if (h != 0.0) throw PreconditionError("ch_reduction_check: H must be identically zero");
  }
  return checked(twoch_core(s, sign), "ch_reduction_check");
}

ElevationState to_elevation(const State& s, double eps) {
  require_eps(eps, "to_elevation");
  return {s.u, (1.0 / eps) * (s.H - 1.0), s.t};
}

State from_elevation(const ElevationState& s, double eps) {
  require_eps(eps, "from_elevation");
  return {s.u, eps * s.eta + 1.0, s.t};
}

VelocityPressure reconstruct_diagnostics(const State& s, double eps, double z) {
  return reconstruct_diagnostics(s, eps, Field::constant(s.u.grid(), z));
}

VelocityPressure reconstruct_diagnostics(const State& s, double eps, const Field& z) {
  require_eps(eps, "reconstruct_diagnostics");
  require_same_grid(s.u, s.H, "reconstruct_diagnostics");
  require_same_grid(s.u, z, "reconstruct_diagnostics");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0.0)) throw PreconditionError("reconstruct_diagnostics: z must be >= 0");
    if (z[i] > s.H[i]) {
      throw PreconditionError("reconstruct_diagnostics: z lies above the free surface at x = " +
                              std::to_string(s.u.grid().node(i)));
    }
  }
  return {-(z * diff(s.u, 1)), s.H - 1.0};
}

}  // namespace twoch
