// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/variation_oracle.hpp"
#include "twoch/variational.hpp"

namespace twoch {
namespace {

constexpr double kPi = std::numbers::pi;

// gamma_j(X) = X + f(X, t_j) on [0, T] with the given number of slices.
template <class F>
FlowPath analytic_path(const Grid& labels, std::size_t slices, double T, const Field& H0, F f) {
  FlowPath p{{}, {}, H0};
  for (std::size_t j = 0; j < slices; ++j) {
    const double t = T * static_cast<double>(j) / static_cast<double>(slices - 1);
    p.times.push_back(t);
    p.displacement.push_back(Field::from_function(labels, [&](double X) { return f(X, t); }));
  }
  return p;
}

TestPath zero_test(const FlowPath& p) {
  TestPath t;
  for (std::size_t j = 0; j < p.slices(); ++j) t.values.push_back(Field::constant(p.labels(), 0.0));
  return t;
}

TestPath scaled(const TestPath& t, double a) {
  TestPath out = t;
  for (Field& f : out.values) f *= a;
  return out;
}

// Root of X + d(X) = x by plain bisection on a bracket.
template <class F>
double bisect(F map, double x, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (map(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Variational, TimeDerivativeIsExactForQuadratics) {
  const Grid g(16, 1.0);
  std::vector<Field> f;
  const double h = 0.1;
  for (int j = 0; j < 5; ++j) {
    const double t = h * j;
    f.push_back(Field::from_function(g, [t](double x) { return 2.0 + x * t + 3.0 * t * t; }));
  }
  for (std::size_t j = 0; j < 5; ++j) {
    const double t = h * static_cast<double>(j);
    const Field d = time_derivative(f, h, j);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(d[i], g.node(i) + 6.0 * t, 1e-13);
  }
}

TEST(Variational, InverseMatchesBisection) {
  const Grid g(64, 10.0);
  const double k = 2.0 * kPi / 10.0;
  const Field d = Field::from_function(g, [k](double X) {
    return 0.5 * std::sin(k * X) + 0.1 * std::cos(3 * k * X);
  });
  const auto map = [k](double X) { return X + 0.3 + 0.5 * std::sin(k * X) + 0.1 * std::cos(3 * k * X); };
  const std::vector<double> targets(g.nodes().begin(), g.nodes().end());
  const std::vector<double> inv = invert_circle_map(d, 0.3, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double want = bisect(map, targets[i], targets[i] - 2.0, targets[i] + 2.0);
    EXPECT_NEAR(inv[i], want, 1e-11);
  }
}

TEST(Variational, IdentityPathIsRest) {
  const Grid g(32, 40.0);
  const FlowPath p = analytic_path(g, 5, 1.0, Field::constant(g, 1.0), [](double, double) { return 0.0; });
  EXPECT_NO_THROW(validate(p));
  const State s = eulerian_from_flow(p, 2);
  EXPECT_EQ(s.u.max_abs(), 0.0);
  EXPECT_LT((s.H - 1.0).max_abs(), 1e-15);
  EXPECT_EQ(discrete_action(p, Sign::Plus), 0.0);
  EXPECT_EQ(discrete_action(p, Sign::Minus), 0.0);
}

// Rigid translation at speed c: u = c, H = H0(x - c t), and the action is
// T (c^2 L / 2 -/+ a^2 L / 4) for H0 = 1 + a cos(w X).
TEST(Variational, TranslationPathClosedForm) {
  const Grid g(64, 40.0);
  const double w = g.fundamental(), a = 0.1, c = 0.7, T = 2.0, L = 40.0;
  const Field H0 = Field::from_function(g, [=](double X) { return 1.0 + a * std::cos(w * X); });
  const FlowPath p = analytic_path(g, 11, T, H0, [c](double, double t) { return c * t; });
  const State s = eulerian_from_flow(p, 4);
  const double t = p.times[4];
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(s.u[i], c, 1e-13);
    EXPECT_NEAR(s.H[i], 1.0 + a * std::cos(w * (g.node(i) - c * t)), 1e-13);
  }
  EXPECT_NEAR(discrete_action(p, Sign::Plus), T * (c * c * L / 2 - a * a * L / 4), 1e-12);
  EXPECT_NEAR(discrete_action(p, Sign::Minus), T * (c * c * L / 2 + a * a * L / 4), 1e-12);
}

// gamma = X + b t sin(k X), H0 = 1: u = b sin(k X*), H = 1 / (1 + b t k cos(k X*))
// with X* the preimage of x.
TEST(Variational, StretchingPathReconstruction) {
  const Grid g(128, 40.0);
  const double k = 2.0 * kPi / 40.0, b = 0.1;
  const FlowPath p = analytic_path(g, 21, 2.0, Field::constant(g, 1.0),
                                   [=](double X, double t) { return b * t * std::sin(k * X); });
  for (std::size_t j : {0u, 7u, 20u}) {
    const double t = p.times[j];
    const State s = eulerian_from_flow(p, j);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node(i);
      const double X = bisect([=](double y) { return y + b * t * std::sin(k * y); }, x, x - 1, x + 1);
      EXPECT_NEAR(s.u[i], b * std::sin(k * X), 1e-10);
      EXPECT_NEAR(s.H[i], 1.0 / (1.0 + b * t * k * std::cos(k * X)), 1e-10);
    }
  }
}

TEST(Variational, ActionSplitsIntoKineticAndPotential) {
  const Grid g(64, 40.0);
  std::mt19937_64 rng(2);
  const Field H0 = Field::from_function(g, [&](double X) { return 1.0 + 0.2 * std::sin(2 * kPi * X / 40); });
  const FlowPath p = random_flow_path(g, 21, 2.0, rng, 0.3, &H0);
  EXPECT_NEAR(discrete_action(p, Sign::Plus) + discrete_action(p, Sign::Minus), 2.0 * kinetic_action(p),
              1e-9);
  EXPECT_GT(discrete_action(p, Sign::Minus) - discrete_action(p, Sign::Plus), 1e-3);
}

TEST(Variational, FirstVariationElementaryProperties) {
  const Grid g(64, 40.0);
  std::mt19937_64 rng(4);
  const FlowPath p = random_flow_path(g, 21, 2.0, rng);
  EXPECT_EQ(first_variation(p, zero_test(p), Sign::Plus), 0.0);
  const TestPath phi = random_test_path(p, rng);
  for (Sign v : {Sign::Plus, Sign::Minus}) {
    const double a = first_variation(p, phi, v);
    EXPECT_NEAR(first_variation(p, scaled(phi, -1.0), v), -a, 1e-10 * std::fabs(a));
    EXPECT_NEAR(first_variation(p, scaled(phi, 2.0), v), 2.0 * a, 1e-6 * std::fabs(a));
  }
}

TEST(Variational, RandomTestPathShape) {
  const Grid g(64, 40.0);
  std::mt19937_64 rng(5);
  const FlowPath p = random_flow_path(g, 11, 1.0, rng);
  const TestPath phi = random_test_path(p, rng);
  ASSERT_EQ(phi.values.size(), 11u);
  EXPECT_EQ(phi.values.front().max_abs(), 0.0);
  EXPECT_EQ(phi.values.back().max_abs(), 0.0);
  double m = 0.0;
  for (const Field& f : phi.values) m = std::max(m, f.max_abs());
  EXPECT_NEAR(m, 1.0, 1e-12);
  EXPECT_NO_THROW(validate(phi, p));
}

// Eulerian finite-difference variation against the label-coordinate formula.
TEST(Variational, FirstVariationMatchesLabelFormula) {
  const Grid g(64, 40.0);
  std::mt19937_64 rng(7);
  const Field H0 = Field::from_function(g, [](double X) { return 1.0 + 0.3 * std::cos(2 * kPi * X / 40); });
  for (int trial = 0; trial < 3; ++trial) {
    const FlowPath p = random_flow_path(g, 21, 2.0, rng, 0.3, &H0);
    const TestPath phi = random_test_path(p, rng);
    for (Sign v : {Sign::Plus, Sign::Minus}) {
      const double fd = first_variation(p, phi, v, {1e-5, true});
      const double exact = oracle::label_first_variation(p, phi, v);
      EXPECT_NEAR(fd, exact, 1e-4 * std::fabs(exact)) << to_string(v);
    }
  }
}

TEST(Variational, ResidualVanishesOnTendency) {
  const Grid g(256, 40.0);
  const double w = g.fundamental();
  const State s{Field::from_function(g, [w](double x) { return 0.3 * std::sin(w * x) + 0.1 * std::cos(3 * w * x); }),
                Field::from_function(g, [w](double x) { return 1.0 + 0.2 * std::cos(2 * w * x); }), 0.0};
  for (Sign v : {Sign::Plus, Sign::Minus}) {
    EXPECT_LT(el_residual(s, twoch_rhs(s, v).first, v).max_abs(), 1e-9);
  }
  EXPECT_GT(el_residual(s, twoch_rhs(s, Sign::Plus).first, Sign::Minus).max_abs(), 1e-3);
  EXPECT_GT(el_residual(s, swe_rhs(s).first, Sign::Plus).max_abs(), 1e-2);
  const State rest{Field::constant(g, 0.0), Field::constant(g, 1.0), 0.0};
  EXPECT_EQ(el_residual(rest, Field::constant(g, 0.0), Sign::Minus).max_abs(), 0.0);
}

TEST(Variational, RestTrajectoryIsStationary) {
  const Grid g(64, 40.0);
  const State rest{Field::constant(g, 0.0), Field::constant(g, 1.0), 0.0};
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.sample_every = 5;
  const Trajectory t = simulate(rest, cfg);
  const FlowPath p = flow_from_velocity(t);
  ASSERT_EQ(p.slices(), 21u);
  std::mt19937_64 rng(1);
  for (Sign v : {Sign::Plus, Sign::Minus}) {
    const TestPath phi = random_test_path(p, rng);
    // Round-off in the action divided by 2 eps.
    EXPECT_LT(std::fabs(first_variation(p, phi, v)), 1e-9);
    EXPECT_LT(std::fabs(residual_pairing(p, phi, v)), 1e-12);
  }
}

TEST(Variational, FlowMapReproducesTrajectory) {
  const Grid g(256, 40.0);
  const State s0{Field::from_function(g, [](double x) { return 0.3 * std::exp(-(x - 20) * (x - 20)); }),
                 Field::from_function(g, [](double x) { return 1.0 + 0.1 * std::exp(-(x - 20) * (x - 20)); }),
                 0.0};
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.sample_every = 5;
  const Trajectory t = simulate(s0, cfg);
  const FlowPath p = flow_from_velocity(t);
  ASSERT_EQ(p.slices(), t.states.size());
  EXPECT_LT((p.H0 - s0.H).max_abs(), 1e-15);
  for (std::size_t j = 0; j < p.slices(); j += 20) {
    const State r = eulerian_from_flow(p, j);
    EXPECT_LT((r.H - t.states[j].H).max_abs(), 1e-5) << j;
    EXPECT_NEAR(quadrature(r.H - 1.0), quadrature(t.states[j].H - 1.0), 1e-10);
    if (j > 0 && j + 1 < p.slices()) {
      EXPECT_LT((r.u - t.states[j].u).max_abs(), 1e-5) << j;
    }
  }
}

TEST(Variational, DiffeomorphismChecks) {
  const Grid g(64, 40.0);
  const double k = 2.0 * kPi / 40.0;
  // gamma_X = 1 + b t k cos(k X) reaches zero at t = 1 / (b k).
  const FlowPath folded = analytic_path(g, 5, 2.0, Field::constant(g, 1.0), [k](double X, double t) {
    return (1.0 / k) * t * std::sin(k * X);
  });
  EXPECT_THROW(validate(folded), NotADiffeomorphism);
  FlowPath dry = analytic_path(g, 5, 1.0, Field::constant(g, 0.0), [](double, double) { return 0.0; });
  EXPECT_THROW(validate(dry), PreconditionError);
  FlowPath two{{0.0, 1.0}, {Field::constant(g, 0.0), Field::constant(g, 0.0)}, Field::constant(g, 1.0)};
  EXPECT_THROW(validate(two), PreconditionError);

  std::mt19937_64 rng(3);
  const FlowPath p = random_flow_path(g, 11, 1.0, rng);
  const TestPath phi = random_test_path(p, rng);
  const double amax = admissible_epsilon(p, phi);
  EXPECT_GT(amax, 0.0);
  EXPECT_THROW(first_variation(p, phi, Sign::Plus, {1.01 * amax, false}), NotADiffeomorphism);
  EXPECT_THROW(first_variation(p, phi, Sign::Plus, {0.6 * amax, true}), NotADiffeomorphism);
  TestPath bad = phi;
  bad.values.front() = Field::constant(g, 1e-3);
  EXPECT_THROW(validate(bad, p), PreconditionError);
}

TEST(Variational, RelabelingInvariance) {
  const Grid g(64, 40.0);
  std::mt19937_64 rng(11);
  const FlowPath p = random_flow_path(g, 21, 2.0, rng);
  const Relabeling identity{0.0, Field::constant(g, 0.0)};
  const FlowPath same = compose(p, identity);
  for (std::size_t j = 0; j < p.slices(); ++j) {
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(same.displacement[j][i], p.displacement[j][i]);
  }
  const Relabeling shift{40.0 / 3.0, Field::constant(g, 0.0)};
  EXPECT_LT(relabeling_defect(shift, p.H0), 1e-12);
  for (Sign v : {Sign::Plus, Sign::Minus}) {
    const InvarianceResult r = subgroup_invariance_check(p, shift, v);
    EXPECT_NEAR(r.before, r.after, 1e-8);
  }
  const Relabeling stretch{0.0, Field::from_function(g, [](double X) { return 0.5 * std::sin(2 * kPi * X / 40); })};
  EXPECT_GT(relabeling_defect(stretch, p.H0), 1e-3);
  EXPECT_THROW(subgroup_invariance_check(p, stretch, Sign::Plus), PreconditionError);
}

// The 2CH(-) Gaussian flow on [0, 1], before the depth focuses and the
// 256-node grid stops resolving it.
TEST(Variational, MinusStationarityOnResolvedWindow) {
  const Grid g(256, 40.0);
  const State s0{Field::from_function(g, [](double x) { return 0.3 * std::exp(-(x - 20) * (x - 20)); }),
                 Field::from_function(g, [](double x) { return 1.0 + 0.1 * std::exp(-(x - 20) * (x - 20)); }),
                 0.0};
  SimConfig cfg;
  cfg.model = Model::TwoCHMinus;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.sample_every = 5;
  const Trajectory t = simulate(s0, cfg);
  ASSERT_EQ(t.status, RunStatus::Completed);
  StationarityOptions opt;
  opt.trials = 4;
  const StationarityReport r = stationarity_test(t, Sign::Minus, opt);
  EXPECT_TRUE(r.separated) << r.separation_ratio;
  EXPECT_TRUE(r.matched) << r.max_relative_mismatch;
  EXPECT_GT(r.admissible_eps, opt.variation.eps);
}

}  // namespace
}  // namespace twoch
