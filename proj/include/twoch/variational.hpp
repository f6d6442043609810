// SPDX-License-Identifier: Apache-2.0
//
// Discrete paths of circle diffeomorphisms and the action functional on them.
//
// A path stores gamma(X, t_j) = X + d_j(X) on a uniform label grid, with the
// displacement d_j periodic in X, and a time-independent reference density
// H0(X). The Eulerian fields at t_j are recovered by inverting gamma(., t_j)
// at the Eulerian nodes x_i:
//
//   u   = gamma_t o gamma^{-1}
//   u_x = (gamma_tX o gamma^{-1}) / (gamma_X o gamma^{-1})
//   H   = (H0 o gamma^{-1}) / (gamma_X o gamma^{-1})
//
// gamma_t is taken by centred second-order differences between slices
// (one-sided second-order at the two end slices). The action is the time
// trapezoid of
//
//   1/2 int [u^2 + u_x^2 - s (H - 1)^2] dx,   s = +1 (Plus), s = -1 (Minus)
//
// so the Plus variant is kinetic minus potential energy and the Minus variant
// is their sum. Its first variation along a test path phi with phi = 0 at
// both ends equals -int int (phi o gamma^{-1}) R dx dt, with R the residual
// computed by el_residual for the same variant.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "twoch/integrators.hpp"
#include "twoch/models.hpp"

namespace twoch {

// A path sample (or a perturbed path) is not orientation preserving.
class NotADiffeomorphism : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowPath {
  // Uniformly spaced, at least three slices.
  std::vector<double> times;
  // d(X, t_j) on the label grid; gamma = X + d.
  std::vector<Field> displacement;
  // Reference density on the label grid, H0 > 0.
  Field H0;

  const Grid& labels() const noexcept { return H0.grid(); }
  std::size_t slices() const noexcept { return times.size(); }
  double time_step() const { return times[1] - times[0]; }
};

// Variation phi(X, t_j), periodic in X, zero on the first and last slice.
struct TestPath {
  std::vector<Field> values;
};

// Throws PreconditionError for structural problems and NotADiffeomorphism if
// some slice has gamma_X <= 0 or out-of-order node images.
void validate(const FlowPath& path);
void validate(const TestPath& test, const FlowPath& path);

// Centred (interior) or one-sided (ends) second-order time derivative of a
// sequence of equally spaced slices.
Field time_derivative(std::span<const Field> slices, double h, std::size_t j);

// Solves X + shift + d(X) = x for each target x by safeguarded Newton
// iteration, assuming the map is increasing. d lives on the label grid.
std::vector<double> invert_circle_map(const Field& d, double shift,
                                      std::span<const double> targets);

// Everything reconstructed on the Eulerian grid for one slice.
struct EulerianSlice {
  std::vector<double> inverse;  // gamma^{-1}(x_i)
  Field u;
  Field u_x;
  Field H;
};

EulerianSlice eulerian_slice(const FlowPath& path, std::size_t j);
State eulerian_from_flow(const FlowPath& path, std::size_t j);

// Integrates d gamma/dt = u(gamma, t) through the stored states of a
// trajectory with RK4. Stage velocities at mid-interval times come from
// four-point Lagrange interpolation in time; off-grid positions use spectral
// interpolation. H0 is the initial H. States must be equally spaced in time.
FlowPath flow_from_velocity(const Trajectory& traj);
FlowPath flow_from_velocity(std::span<const State> states);

double discrete_action(const FlowPath& path, Sign variant);

// Time integral (trapezoid) of kinetic_approx along the path.
double kinetic_action(const FlowPath& path);

// gamma + eps * phi.
FlowPath perturbed(const FlowPath& path, const TestPath& test, double eps);

// Largest eps such that gamma + eps phi and gamma - eps phi stay orientation
// preserving at the label nodes (spectral slopes).
double admissible_epsilon(const FlowPath& path, const TestPath& test);

struct VariationOptions {
  double eps = 1e-5;
  // Combine step sizes eps and 2 eps to cancel the O(eps^2) term.
  bool richardson = false;
};

// Central difference [a(gamma + eps phi) - a(gamma - eps phi)] / (2 eps).
double first_variation(const FlowPath& path, const TestPath& test, Sign variant,
                       const VariationOptions& opt = {});

// R = u_t - u_txx + 3 u u_x - 2 u_x u_xx - u u_xxx + s H H_x, with s = +1 for
// Plus and -1 for Minus.
Field el_residual(const State& s, const Field& u_t, Sign variant);

// -int int (phi o gamma^{-1}) R dx dt with u_t from time differences of the
// reconstructed Eulerian velocity, time trapezoid and spatial rectangle rule.
double residual_pairing(const FlowPath& path, const TestPath& test, Sign variant);

// Random smooth test path: the lowest `modes` Fourier modes in X (mean
// included) times the bump 16 s^2 (1 - s)^2, s = (t - t_0) / T, normalised to
// max |phi| = 1.
TestPath random_test_path(const FlowPath& path, std::mt19937_64& rng, std::size_t modes = 5);

// Random smooth path with displacement quadratic in t over the lowest three
// modes, max |d_X| <= max_slope, starting at the identity.
FlowPath random_flow_path(const Grid& labels, std::size_t slices, double duration,
                          std::mt19937_64& rng, double max_slope = 0.3,
                          const Field* H0 = nullptr);

// Adds amplitude * 4 s (1 - s) sin(2 pi mode X / L) to the displacement; for a
// solution path the result is no longer a critical point.
FlowPath bump_perturbation(const FlowPath& path, double amplitude, int mode);

struct StationarityOptions {
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::size_t test_modes = 5;
  VariationOptions variation{1e-5, true};
  double perturbation_amplitude = 0.25;
  int perturbation_mode = 2;
  // max |delta a| on the solution <= separation * max |delta a| on the
  // perturbed path.
  double separation = 1e-2;
  // |delta a - pairing| / |pairing| on the perturbed path.
  double mismatch = 1e-3;
};

struct StationarityReport {
  std::vector<double> solution_variations;
  std::vector<double> perturbed_variations;
  std::vector<double> perturbed_pairings;
  double max_abs_solution = 0.0;
  double max_abs_perturbed = 0.0;
  double separation_ratio = 0.0;
  double max_relative_mismatch = 0.0;
  // Smallest admissible_epsilon over all test paths and both paths.
  double admissible_eps = 0.0;
  bool separated = false;
  bool matched = false;
  bool passed() const { return separated && matched; }
};

StationarityReport stationarity_test(const Trajectory& traj, Sign variant,
                                     const StationarityOptions& opt = {});
StationarityReport stationarity_test(const FlowPath& solution, Sign variant,
                                     const StationarityOptions& opt = {});

// Time-independent relabeling psi(X) = X + shift + s(X), s periodic.
struct Relabeling {
  double shift = 0.0;
  Field displacement;
};

// Max over label nodes of |(H0 o psi^{-1}) J_{psi^{-1}} - H0|.
double relabeling_defect(const Relabeling& psi, const Field& H0);

// gamma(., t) o psi for every slice; H0 is kept.
FlowPath compose(const FlowPath& path, const Relabeling& psi);

struct InvarianceResult {
  double before;
  double after;
};

// Action of the path and of the path composed with psi. Throws
// PreconditionError if psi does not preserve H0 to 1e-10.
InvarianceResult subgroup_invariance_check(const FlowPath& path, const Relabeling& psi,
                                           Sign variant);

}  // namespace twoch
