// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <string>

#include "twoch/experiment.hpp"
#include "twoch/functionals.hpp"

namespace twoch {
namespace {

using boost::math::quadrature::gauss_kronrod;

TEST(Functionals, SineStateClosedForms) {
  const Grid g(64, 40.0);
  const double L = 40.0, k = 2.0 * g.fundamental(), A = 0.3, B = 0.2;
  const State s{Field::from_function(g, [=](double x) { return A * std::sin(k * x); }),
                Field::from_function(g, [=](double x) { return 1.0 + B * std::cos(k * x); }), 0.0};
  const double ke = A * A * L * (1 + k * k) / 4;
  const double pe = B * B * L / 4;
  const double ke_exact = A * A * L / 4 + 0.5 * A * A * k * k * (L / 2 + 3 * B * B * L / 8);
  EXPECT_NEAR(kinetic_approx(s), ke, 1e-14);
  EXPECT_NEAR(potential(s), pe, 1e-14);
  EXPECT_NEAR(kinetic_exact(s), ke_exact, 1e-14);
  const ConservedQuantities q = conserved_quantities(s);
  EXPECT_NEAR(q.mass, 0.0, 1e-14);
  EXPECT_NEAR(q.momentum, 0.0, 1e-14);
  EXPECT_NEAR(q.energy_plus, ke + pe, 1e-14);
  EXPECT_NEAR(q.energy_minus, ke - pe, 1e-14);
}

// Adaptive quadrature of the analytic integrands.
TEST(Functionals, GaussianMatchesAdaptiveQuadrature) {
  const Grid g(256, 40.0);
  const auto u = [](double x) { return 0.3 * std::exp(-(x - 20) * (x - 20)); };
  const auto ux = [u](double x) { return -2.0 * (x - 20) * u(x); };
  const auto eta = [](double x) { return 0.1 * std::exp(-(x - 21) * (x - 21) / 2.0); };
  const State s{Field::from_function(g, u), Field::from_function(g, [eta](double x) { return 1.0 + eta(x); }),
                0.0};
  const auto integrate = [](auto f) { return gauss_kronrod<double, 61>::integrate(f, 0.0, 40.0, 25, 1e-15); };
  const double ke = integrate([&](double x) { return 0.5 * (u(x) * u(x) + ux(x) * ux(x)); });
  const double kx = integrate([&](double x) {
    const double H = 1 + eta(x);
    return 0.5 * (u(x) * u(x) + H * H * ux(x) * ux(x));
  });
  const double pe = integrate([&](double x) { return 0.5 * eta(x) * eta(x); });
  const double mass = integrate(eta);
  EXPECT_NEAR(kinetic_approx(s), ke, 1e-13);
  EXPECT_NEAR(kinetic_exact(s), kx, 1e-13);
  EXPECT_NEAR(potential(s), pe, 1e-13);
  EXPECT_NEAR(conserved_quantities(s).mass, mass, 1e-13);
  EXPECT_NEAR(conserved_quantities(s).momentum, integrate(u), 1e-13);
}

TEST(Functionals, LagrangianAndMetricIdentities) {
  const Grid g(128, 40.0);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const State s = random_smooth_state(g, rng, 0.5, 0.3);
    EXPECT_NEAR(lagrangian(s) + metric(s), 2.0 * kinetic_approx(s), 1e-12);
    EXPECT_NEAR(metric(s) - lagrangian(s), 2.0 * potential(s), 1e-12);
    const DiagnosticsRecord r = diagnostics(s);
    EXPECT_EQ(r.lagrangian, r.kinetic_approx - r.potential);
    EXPECT_EQ(r.metric, r.kinetic_approx + r.potential);
    EXPECT_EQ(r.energy_plus, r.metric);
  }
}

// Rate of change of the energies along a tendency, from the chain rule:
// dE/dt = int [u u_t + u_x (u_t)_x +/- (H - 1) H_t] dx.
double energy_rate(const State& s, const Tendency& k, double pe_sign) {
  const Field ux = diff(s.u, 1);
  const Field utx = diff(k.first, 1);
  return quadrature(s.u * k.first + ux * utx + pe_sign * ((s.H - 1.0) * k.second));
}

// Integration by parts gives dE+/dt = 0 under Plus, dE-/dt = 0 under Minus,
// and dE+/dt = 2 int u H H_x under Minus.
TEST(Functionals, EnergyRatesFollowDerivation) {
  const Grid g(256, 40.0);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const State s = random_smooth_state(g, rng, 0.5, 0.3);
    const Tendency p = twoch_rhs(s, Sign::Plus), m = twoch_rhs(s, Sign::Minus);
    const double scale = quadrature(s.u * s.u) + quadrature((s.H - 1.0) * (s.H - 1.0));
    EXPECT_LT(std::fabs(energy_rate(s, p, +1.0)), 1e-13 * scale);
    EXPECT_LT(std::fabs(energy_rate(s, m, -1.0)), 1e-13 * scale);
    const double predicted = 2.0 * quadrature(s.u * s.H * diff(s.H, 1));
    EXPECT_GT(std::fabs(predicted), 1e-4);
    EXPECT_NEAR(energy_rate(s, m, +1.0), predicted, 1e-10);
    EXPECT_NEAR(energy_rate(s, p, -1.0), -predicted, 1e-10);
  }
}

TEST(Functionals, DriftReport) {
  std::vector<DiagnosticsRecord> r(3);
  r[0].mass = 2.0;
  r[1].mass = 2.5;
  r[2].mass = 1.0;
  r[0].momentum = 0.0;
  r[2].momentum = 1e-20;
  const DriftReport d = drift_report(r);
  EXPECT_DOUBLE_EQ(d.mass.max_abs, 1.0);
  EXPECT_DOUBLE_EQ(d.mass.max_rel, 0.5);
  EXPECT_DOUBLE_EQ(d.momentum.max_abs, 1e-20);
  EXPECT_DOUBLE_EQ(d.momentum.max_rel, 1e10);
  EXPECT_THROW(drift_report(std::vector<DiagnosticsRecord>(1)), PreconditionError);
}

TEST(Functionals, ColumnNamesMatchCsvHeader) {
  std::string header;
  for (auto n : DiagnosticsRecord::column_names()) header += (header.empty() ? "" : ",") + std::string(n);
  EXPECT_EQ(header,
            "t,mass,momentum,energy_plus,energy_minus,kinetic_exact,kinetic_approx,potential,"
            "lagrangian,metric");
  DiagnosticsRecord rec;
  rec.t = 1;
  rec.metric = 10;
  EXPECT_EQ(rec.values().front(), 1.0);
  EXPECT_EQ(rec.values().back(), 10.0);
}

}  // namespace
}  // namespace twoch
