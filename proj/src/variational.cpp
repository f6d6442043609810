// SPDX-License-Identifier: Apache-2.0

#include "twoch/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twoch/kernels.hpp"

namespace twoch {
namespace {

constexpr std::size_t kMaxNewtonIterations = 60;

double potential_sign(Sign variant) { return variant == Sign::Plus ? 1.0 : -1.0; }

std::vector<double> trapezoid_weights(std::size_t slices, double h) {
  std::vector<double> w(slices, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

// Reconstruction of one slice given the interpolant of H0, shared by the
// action and the residual pairing.
EulerianSlice reconstruct(const FlowPath& path, std::size_t j, const TrigInterpolant& h0) {
  const Grid& grid = path.labels();
  const Field& d = path.displacement[j];
  const Field velocity = time_derivative(path.displacement, path.time_step(), j);

  EulerianSlice out{invert_circle_map(d, 0.0, grid.nodes()), Field(grid), Field(grid),
                    Field(grid)};
  const TrigInterpolant slope = TrigInterpolant(d).derivative();
  const TrigInterpolant vel(velocity);
  const TrigInterpolant vel_x = vel.derivative();

  const std::size_t n = grid.size();
  std::vector<double> gx(n), h0v(n), vx(n);
  slope.evaluate(out.inverse, gx);
  h0.evaluate(out.inverse, h0v);
  vel.evaluate(out.inverse, out.u.values());
  vel_x.evaluate(out.inverse, vx);
  for (std::size_t i = 0; i < n; ++i) {
    const double jac = 1.0 + gx[i];
    if (!(jac > 0.0)) {
      throw NotADiffeomorphism("slice " + std::to_string(j) + ": gamma_X <= 0 at x = " +
                               std::to_string(grid.node(i)));
    }
    out.u_x[i] = vx[i] / jac;
    out.H[i] = h0v[i] / jac;
  }
  return out;
}

double slice_lagrangian(const EulerianSlice& s, Sign variant) {
  const Field eta = s.H - 1.0;
  const double sum = kernels::dot(s.u.values(), s.u.values()) +
                     kernels::dot(s.u_x.values(), s.u_x.values()) -
                     potential_sign(variant) * kernels::dot(eta.values(), eta.values());
  return 0.5 * s.u.grid().spacing() * sum;
}

void require_uniform_times(std::span<const double> times, const char* what) {
  if (times.size() < 3) {
    throw PreconditionError(std::string(what) + ": need at least three time slices");
  }
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw PreconditionError(std::string(what) + ": times must increase");
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double hj = times[j] - times[j - 1];
    if (std::fabs(hj - h) > 1e-9 * std::max(1.0, std::fabs(h))) {
      throw PreconditionError(std::string(what) + ": times must be uniformly spaced");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const FlowPath& path) {
  require_uniform_times(path.times, "flow path");
  if (path.displacement.size() != path.times.size()) {
    throw PreconditionError("flow path: one displacement slice per time required");
  }
  if (!(path.H0.min() > 0.0)) throw PreconditionError("flow path: H0 must be positive");
  const Grid& grid = path.labels();
  const double L = grid.length();
  for (std::size_t j = 0; j < path.slices(); ++j) {
    const Field& d = path.displacement[j];
    require_same_grid(d, path.H0, "flow path");
    if (!d.all_finite()) throw PreconditionError("flow path: non-finite displacement");
    const Field slope = diff(d, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(1.0 + slope[i] > 0.0)) {
        throw NotADiffeomorphism("flow path: gamma_X <= 0 at slice " + std::to_string(j) +
                                 ", X = " + std::to_string(grid.node(i)));
      }
      const double next = i + 1 < grid.size() ? grid.node(i + 1) + d[i + 1] : L + grid.node(0) + d[0];
      if (!(next > grid.node(i) + d[i])) {
        throw NotADiffeomorphism("flow path: node images out of order at slice " +
                                 std::to_string(j));
      }
    }
  }
}

void validate(const TestPath& test, const FlowPath& path) {
  if (test.values.size() != path.slices()) {
    throw PreconditionError("test path: one slice per path time required");
  }
  for (const Field& f : test.values) require_same_grid(f, path.H0, "test path");
  const auto is_zero = [](const Field& f) {
    return std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; });
  };
  if (!is_zero(test.values.front()) || !is_zero(test.values.back())) {
    throw PreconditionError("test path: endpoints must be zero");
  }
}

Field time_derivative(std::span<const Field> slices, double h, std::size_t j) {
  const std::size_t m = slices.size();
  if (m < 3) throw PreconditionError("time_derivative: need at least three slices");
  Field out(slices[0].grid());
  const double inv = 1.0 / (2.0 * h);
  if (j == 0) {
    out.add_scaled(-3.0 * inv, slices[0]);
    out.add_scaled(4.0 * inv, slices[1]);
    out.add_scaled(-inv, slices[2]);
  } else if (j == m - 1) {
    out.add_scaled(3.0 * inv, slices[m - 1]);
    out.add_scaled(-4.0 * inv, slices[m - 2]);
    out.add_scaled(inv, slices[m - 3]);
  } else {
    out.add_scaled(inv, slices[j + 1]);
    out.add_scaled(-inv, slices[j - 1]);
  }
  return out;
}

std::vector<double> invert_circle_map(const Field& d, double shift,
                                      std::span<const double> targets) {
  const Grid& grid = d.grid();
  const std::size_t n = grid.size();
  const double L = grid.length();

  std::vector<double> knots(n), labels(grid.nodes().begin(), grid.nodes().end());
  for (std::size_t i = 0; i < n; ++i) knots[i] = labels[i] + shift + d[i];
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knots[i] > knots[i - 1])) {
      throw NotADiffeomorphism("invert_circle_map: node images are not increasing");
    }
  }
  if (!(knots.back() < knots.front() + L)) {
    throw NotADiffeomorphism("invert_circle_map: map does not wind exactly once");
  }

  // Monotone cubic inverse of the node data gives the starting point and the
  // bracketing node interval gives the safeguard.
  const MonotoneCubic guess(knots, labels, L, L);
  const std::size_t m = targets.size();
  std::vector<double> X(m), lo(m), hi(m);
  for (std::size_t p = 0; p < m; ++p) {
    const double x = targets[p];
    const double wraps = std::floor((x - knots.front()) / L);
    const double xr = x - wraps * L;
    auto it = std::upper_bound(knots.begin(), knots.end(), xr);
    std::size_t k = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
    lo[p] = labels[k] + wraps * L;
    hi[p] = (k + 1 < n ? labels[k + 1] : labels[0] + L) + wraps * L;
    X[p] = std::clamp(guess(x), lo[p], hi[p]);
  }

  const TrigInterpolant disp(d);
  const TrigInterpolant slope = disp.derivative();
  std::vector<double> dv(m), sv(m);
  const double tol = 1e-12 * std::max(1.0, L);
  const auto newton_pass = [&](bool bracketed) {
    disp.evaluate(X, dv);
    slope.evaluate(X, sv);
    double max_step = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      const double g = X[p] + shift + dv[p] - targets[p];
      const double gp = 1.0 + sv[p];
      if (!(gp > 0.0)) {
        throw NotADiffeomorphism("invert_circle_map: gamma_X <= 0 during inversion");
      }
      double next = X[p] - g / gp;
      if (bracketed) {
        if (g > 0.0) hi[p] = X[p];
        if (g < 0.0) lo[p] = X[p];
        if (!(next > lo[p] && next < hi[p])) next = 0.5 * (lo[p] + hi[p]);
      }
      max_step = std::max(max_step, std::fabs(next - X[p]));
      X[p] = next;
    }
    return max_step;
  };

  std::size_t it = 0;
  for (; it < kMaxNewtonIterations; ++it) {
    if (newton_pass(true) <= tol) break;
  }
  if (it == kMaxNewtonIterations) {
    throw NotADiffeomorphism("invert_circle_map: Newton iteration did not converge");
  }
  // A last unguarded step takes the converged iterate to round-off.
  newton_pass(false);
  return X;
}

EulerianSlice eulerian_slice(const FlowPath& path, std::size_t j) {
  if (j >= path.slices()) throw PreconditionError("eulerian_slice: time index out of range");
  return reconstruct(path, j, TrigInterpolant(path.H0));
}

State eulerian_from_flow(const FlowPath& path, std::size_t j) {
  EulerianSlice s = eulerian_slice(path, j);
  return {std::move(s.u), std::move(s.H), path.times[j]};
}

// ---------------------------------------------------------------------------

FlowPath flow_from_velocity(const Trajectory& traj) { return flow_from_velocity(traj.states); }

FlowPath flow_from_velocity(std::span<const State> states) {
  const std::size_t count = states.size();
  std::vector<double> times(count);
  for (std::size_t j = 0; j < count; ++j) times[j] = states[j].t;
  require_uniform_times(times, "flow_from_velocity");

  const Grid& grid = states[0].u.grid();
  const std::size_t n = grid.size();
  std::vector<TrigInterpolant> at_slice;
  at_slice.reserve(count);
  for (const State& s : states) {
    require_same_grid(s.u, states[0].u, "flow_from_velocity");
    at_slice.emplace_back(s.u);
  }

  // Velocity at the midpoint of [t_j, t_j+1] from a four-point Lagrange
  // stencil (three points when only three states exist).
  const auto midpoint_velocity = [&](std::size_t j) {
    const std::size_t width = std::min<std::size_t>(4, count);
    std::size_t first = j >= 1 ? j - 1 : 0;
    first = std::min(first, count - width);
    const double tm = 0.5 * (times[j] + times[j + 1]);
    Field u(grid);
    for (std::size_t a = first; a < first + width; ++a) {
      double w = 1.0;
      for (std::size_t b = first; b < first + width; ++b) {
        if (b != a) w *= (tm - times[b]) / (times[a] - times[b]);
      }
      u.add_scaled(w, states[a].u);
    }
    return TrigInterpolant(u);
  };

  FlowPath path{times, {}, states[0].H};
  path.displacement.reserve(count);
  path.displacement.emplace_back(grid);

  std::vector<double> pos(grid.nodes().begin(), grid.nodes().end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t j = 0; j + 1 < count; ++j) {
    const double h = times[j + 1] - times[j];
    const TrigInterpolant mid = midpoint_velocity(j);
    at_slice[j].evaluate(pos, k1);
    kernels::axpy(0.5 * h, k1, pos, tmp);
    mid.evaluate(tmp, k2);
    kernels::axpy(0.5 * h, k2, pos, tmp);
    mid.evaluate(tmp, k3);
    kernels::axpy(h, k3, pos, tmp);
    at_slice[j + 1].evaluate(tmp, k4);
    kernels::rk4_combine(pos, k1, k2, k3, k4, h, pos);

    Field d(grid);
    for (std::size_t i = 0; i < n; ++i) d[i] = pos[i] - grid.node(i);
    path.displacement.push_back(std::move(d));
  }
  validate(path);
  return path;
}

// ---------------------------------------------------------------------------

double discrete_action(const FlowPath& path, Sign variant) {
  validate(path);
  const TrigInterpolant h0(path.H0);
  const auto w = trapezoid_weights(path.slices(), path.time_step());
  double action = 0.0;
  for (std::size_t j = 0; j < path.slices(); ++j) {
    action += w[j] * slice_lagrangian(reconstruct(path, j, h0), variant);
  }
  return action;
}

double kinetic_action(const FlowPath& path) {
  validate(path);
  const auto w = trapezoid_weights(path.slices(), path.time_step());
  double total = 0.0;
  for (std::size_t j = 0; j < path.slices(); ++j) {
    total += w[j] * kinetic_approx(eulerian_from_flow(path, j));
  }
  return total;
}

FlowPath perturbed(const FlowPath& path, const TestPath& test, double eps) {
  FlowPath out = path;
  for (std::size_t j = 0; j < out.slices(); ++j) out.displacement[j].add_scaled(eps, test.values[j]);
  return out;
}

double admissible_epsilon(const FlowPath& path, const TestPath& test) {
  validate(test, path);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < path.slices(); ++j) {
    const Field gx = diff(path.displacement[j], 1) + 1.0;
    const Field px = diff(test.values[j], 1);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double a = std::fabs(px[i]);
      if (a > 0.0) best = std::min(best, gx[i] / a);
    }
  }
  return best;
}

double first_variation(const FlowPath& path, const TestPath& test, Sign variant,
                       const VariationOptions& opt) {
  validate(test, path);
  if (!(opt.eps > 0.0)) throw PreconditionError("first_variation: eps must be positive");
  const double largest = (opt.richardson ? 2.0 : 1.0) * opt.eps;
  if (!(largest < admissible_epsilon(path, test))) {
    throw NotADiffeomorphism("first_variation: eps = " + std::to_string(largest) +
                             " breaks monotonicity of the perturbed path; reduce eps");
  }
  const auto central = [&](double e) {
    const double plus = discrete_action(perturbed(path, test, e), variant);
    const double minus = discrete_action(perturbed(path, test, -e), variant);
    return (plus - minus) / (2.0 * e);
  };
  const double d1 = central(opt.eps);
  if (!opt.richardson) return d1;
  const double d2 = central(2.0 * opt.eps);
  return (4.0 * d1 - d2) / 3.0;
}

Field el_residual(const State& s, const Field& u_t, Sign variant) {
  require_same_grid(s.u, s.H, "el_residual");
  require_same_grid(s.u, u_t, "el_residual");
  const auto du = derivatives(s.u, 3);
  const Field& ux = du[0];
  const Field& uxx = du[1];
  const Field& uxxx = du[2];
  Field r = helmholtz(u_t);
  r.add_scaled(3.0, s.u * ux);
  r.add_scaled(-2.0, ux * uxx);
  r -= s.u * uxxx;
  r.add_scaled(potential_sign(variant), s.H * diff(s.H, 1));
  return r;
}

double residual_pairing(const FlowPath& path, const TestPath& test, Sign variant) {
  validate(path);
  validate(test, path);
  const TrigInterpolant h0(path.H0);
  std::vector<EulerianSlice> slices;
  slices.reserve(path.slices());
  std::vector<Field> velocity;
  velocity.reserve(path.slices());
  for (std::size_t j = 0; j < path.slices(); ++j) {
    slices.push_back(reconstruct(path, j, h0));
    velocity.push_back(slices.back().u);
  }
  const double h = path.time_step();
  const auto w = trapezoid_weights(path.slices(), h);
  const double dx = path.labels().spacing();
  double total = 0.0;
  for (std::size_t j = 1; j + 1 < path.slices(); ++j) {
    const Field u_t = time_derivative(velocity, h, j);
    const Field r = el_residual({slices[j].u, slices[j].H, path.times[j]}, u_t, variant);
    const std::vector<double> eta = TrigInterpolant(test.values[j]).evaluate(slices[j].inverse);
    total += w[j] * dx * kernels::dot(eta, r.values());
  }
  return -total;
}

// ---------------------------------------------------------------------------

TestPath random_test_path(const FlowPath& path, std::mt19937_64& rng, std::size_t modes) {
  if (modes < 1) throw PreconditionError("random_test_path: need at least one mode");
  const Grid& grid = path.labels();
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> a(modes), b(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    a[k] = coef(rng);
    b[k] = k == 0 ? 0.0 : coef(rng);
  }
  const double omega = grid.fundamental();
  const Field shape = Field::from_function(grid, [&](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
      const double kx = omega * static_cast<double>(k) * x;
      v += a[k] * std::cos(kx) + b[k] * std::sin(kx);
    }
    return v;
  });
  const double scale = 1.0 / shape.max_abs();
  const double t0 = path.times.front();
  const double T = path.times.back() - t0;
  TestPath test;
  test.values.reserve(path.slices());
  for (std::size_t j = 0; j < path.slices(); ++j) {
    const double s = (path.times[j] - t0) / T;
    const double bump = 16.0 * s * s * (1.0 - s) * (1.0 - s);
    if (j == 0 || j + 1 == path.slices()) {
      test.values.emplace_back(grid);
    } else {
      test.values.push_back((bump * scale) * shape);
    }
  }
  return test;
}

FlowPath random_flow_path(const Grid& labels, std::size_t slices, double duration,
                          std::mt19937_64& rng, double max_slope, const Field* H0) {
  if (slices < 3) throw PreconditionError("random_flow_path: need at least three slices");
  if (!(duration > 0.0)) throw PreconditionError("random_flow_path: duration must be positive");
  constexpr std::size_t kModes = 3;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  // Per mode: linear and quadratic time coefficients for cos and sin.
  double c[kModes + 1][4];
  for (auto& row : c) {
    for (double& v : row) v = coef(rng);
  }
  const double omega = labels.fundamental();
  const auto displacement = [&](double x, double s, bool slope) {
    double v = slope ? 0.0 : (c[0][0] * s + c[0][1] * s * s);
    for (std::size_t k = 1; k <= kModes; ++k) {
      const double kw = omega * static_cast<double>(k);
      const double ca = c[k][0] * s + c[k][1] * s * s;
      const double sa = c[k][2] * s + c[k][3] * s * s;
      if (slope) {
        v += kw * (-ca * std::sin(kw * x) + sa * std::cos(kw * x));
      } else {
        v += ca * std::cos(kw * x) + sa * std::sin(kw * x);
      }
    }
    return v;
  };
  double steepest = 0.0;
  for (std::size_t j = 0; j < slices; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(slices - 1);
    for (double x : labels.nodes()) steepest = std::max(steepest, std::fabs(displacement(x, s, true)));
  }
  const double scale = steepest > 0.0 ? max_slope / steepest : 1.0;

  FlowPath path{{}, {}, H0 != nullptr ? *H0 : Field::constant(labels, 1.0)};
  for (std::size_t j = 0; j < slices; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(slices - 1);
    path.times.push_back(duration * s);
    path.displacement.push_back(
        Field::from_function(labels, [&](double x) { return scale * displacement(x, s, false); }));
  }
  validate(path);
  return path;
}

FlowPath bump_perturbation(const FlowPath& path, double amplitude, int mode) {
  const Grid& grid = path.labels();
  const double k = grid.fundamental() * mode;
  const Field shape = Field::from_function(grid, [k](double x) { return std::sin(k * x); });
  FlowPath out = path;
  const double t0 = path.times.front();
  const double T = path.times.back() - t0;
  for (std::size_t j = 0; j < out.slices(); ++j) {
    const double s = (path.times[j] - t0) / T;
    out.displacement[j].add_scaled(amplitude * 4.0 * s * (1.0 - s), shape);
  }
  validate(out);
  return out;
}

StationarityReport stationarity_test(const Trajectory& traj, Sign variant,
                                     const StationarityOptions& opt) {
  return stationarity_test(flow_from_velocity(traj), variant, opt);
}

StationarityReport stationarity_test(const FlowPath& solution, Sign variant,
                                     const StationarityOptions& opt) {
  if (opt.trials < 1) throw PreconditionError("stationarity_test: trials must be >= 1");
  const FlowPath other =
      bump_perturbation(solution, opt.perturbation_amplitude, opt.perturbation_mode);
  std::mt19937_64 rng(opt.seed);
  StationarityReport rep;
  rep.admissible_eps = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const TestPath phi = random_test_path(solution, rng, opt.test_modes);
    rep.admissible_eps = std::min(
        {rep.admissible_eps, admissible_epsilon(solution, phi), admissible_epsilon(other, phi)});
    const double on_solution = first_variation(solution, phi, variant, opt.variation);
    const double on_other = first_variation(other, phi, variant, opt.variation);
    const double pairing = residual_pairing(other, phi, variant);
    rep.solution_variations.push_back(on_solution);
    rep.perturbed_variations.push_back(on_other);
    rep.perturbed_pairings.push_back(pairing);
    rep.max_abs_solution = std::max(rep.max_abs_solution, std::fabs(on_solution));
    rep.max_abs_perturbed = std::max(rep.max_abs_perturbed, std::fabs(on_other));
    const double rel = std::fabs(on_other - pairing) / std::max(std::fabs(pairing), 1e-300);
    rep.max_relative_mismatch = std::max(rep.max_relative_mismatch, rel);
  }
  rep.separation_ratio = rep.max_abs_perturbed > 0.0
                             ? rep.max_abs_solution / rep.max_abs_perturbed
                             : std::numeric_limits<double>::infinity();
  rep.separated = rep.separation_ratio <= opt.separation;
  rep.matched = rep.max_relative_mismatch <= opt.mismatch;
  return rep;
}

// ---------------------------------------------------------------------------

double relabeling_defect(const Relabeling& psi, const Field& H0) {
  require_same_grid(psi.displacement, H0, "relabeling_defect");
  const Grid& grid = H0.grid();
  const std::vector<double> inv = invert_circle_map(psi.displacement, psi.shift, grid.nodes());
  const std::vector<double> h0 = TrigInterpolant(H0).evaluate(inv);
  const std::vector<double> sx = TrigInterpolant(psi.displacement).derivative().evaluate(inv);
  double defect = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    defect = std::max(defect, std::fabs(h0[i] / (1.0 + sx[i]) - H0[i]));
  }
  return defect;
}

FlowPath compose(const FlowPath& path, const Relabeling& psi) {
  const Grid& grid = path.labels();
  require_same_grid(psi.displacement, path.H0, "compose");
  const bool identity = psi.shift == 0.0 && psi.displacement.max_abs() == 0.0;
  if (identity) return path;
  std::vector<double> images(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    images[i] = grid.node(i) + psi.shift + psi.displacement[i];
  }
  FlowPath out = path;
  for (std::size_t j = 0; j < path.slices(); ++j) {
    const std::vector<double> moved = TrigInterpolant(path.displacement[j]).evaluate(images);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.displacement[j][i] = psi.shift + psi.displacement[i] + moved[i];
    }
  }
  return out;
}

InvarianceResult subgroup_invariance_check(const FlowPath& path, const Relabeling& psi,
                                           Sign variant) {
  const double defect = relabeling_defect(psi, path.H0);
  if (!(defect <= 1e-10)) {
    throw PreconditionError("subgroup_invariance_check: relabeling does not preserve H0 (defect " +
                            std::to_string(defect) + ")");
  }
  return {discrete_action(path, variant), discrete_action(compose(path, psi), variant)};
}

}  // namespace twoch
