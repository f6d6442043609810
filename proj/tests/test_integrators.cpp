// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "twoch/integrators.hpp"

namespace twoch {
namespace {

double gauss(double x) { return std::exp(-(x - 20) * (x - 20)); }

State gaussian(const Grid& g, double ua, double ha) {
  return {Field::from_function(g, [ua](double x) { return ua * gauss(x); }),
          Field::from_function(g, [ha](double x) { return 1.0 + ha * gauss(x); }), 0.0};
}

SimConfig config(Model m, double dt, double t_end) {
  SimConfig c;
  c.model = m;
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

TEST(Integrators, ModelNamesRoundTrip) {
  for (Model m : all_models()) EXPECT_EQ(model_from_string(to_string(m)), m);
  EXPECT_EQ(all_models().size(), 6u);
  EXPECT_THROW(model_from_string("kdv"), PreconditionError);
}

TEST(Integrators, RestStateIsUnchanged) {
  const Grid g(64, 40.0);
  const State rest{Field::constant(g, 0.0), Field::constant(g, 1.0), 0.0};
  for (Model m : {Model::TwoCHPlus, Model::TwoCHMinus, Model::SWE, Model::SW1, Model::Linear}) {
    const Trajectory t = simulate(rest, config(m, 1e-2, 1.0));
    ASSERT_EQ(t.status, RunStatus::Completed) << to_string(m);
    EXPECT_EQ(t.states.back().u.max_abs(), 0.0);
    EXPECT_EQ((t.states.back().H - 1.0).max_abs(), 0.0);
    EXPECT_DOUBLE_EQ(t.states.back().t, 1.0);
  }
}

// For u = a sin(k x), H = 1 + c cos(k x) the linear system is w' = -i k w
// with w = a + i c, and N RK4 steps multiply w by R(-i k dt)^N with
// R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24.
TEST(Integrators, LinearModeMatchesRk4Amplification) {
  const Grid g(64, 40.0);
  const double k = 3.0 * g.fundamental(), eps = 0.1, a0 = 0.02, c0 = -0.01;
  const State s0{Field::from_function(g, [=](double x) { return a0 * std::sin(k * x); }),
                 Field::from_function(g, [=](double x) { return 1.0 + c0 * std::cos(k * x); }),
                 0.0};
  SimConfig cfg = config(Model::Linear, 0.05, 2.0);
  cfg.eps = eps;
  const Trajectory t = simulate(s0, cfg);
  ASSERT_EQ(t.status, RunStatus::Completed);
  const std::complex<double> z(0.0, -k * cfg.dt);
  const std::complex<double> R = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
  const std::complex<double> w = std::pow(R, 40) * std::complex<double>(a0, c0);
  const std::complex<double> exact = std::exp(std::complex<double>(0.0, -k * 2.0)) *
                                     std::complex<double>(a0, c0);
  const State& s = t.states.back();
  double e_disc = 0.0, e_exact = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    e_disc = std::max({e_disc, std::fabs(s.u[i] - w.real() * std::sin(k * x)),
                       std::fabs(s.H[i] - 1.0 - w.imag() * std::cos(k * x))});
    e_exact = std::max({e_exact, std::fabs(s.u[i] - exact.real() * std::sin(k * x)),
                        std::fabs(s.H[i] - 1.0 - exact.imag() * std::cos(k * x))});
  }
  EXPECT_LT(e_disc, 1e-15);
  EXPECT_LT(e_exact, 1e-7);
  EXPECT_GT(e_exact, 1e-12);
}

TEST(Integrators, BitwiseDeterministic) {
  const Grid g(128, 40.0);
  const State s0 = gaussian(g, 0.3, 0.1);
  const SimConfig cfg = config(Model::TwoCHMinus, 1e-2, 1.0);
  const Trajectory a = simulate(s0, cfg), b = simulate(s0, cfg);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t j = 0; j < a.states.size(); ++j) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      ASSERT_EQ(a.states[j].u[i], b.states[j].u[i]);
      ASSERT_EQ(a.states[j].H[i], b.states[j].H[i]);
    }
  }
}

// (u, H, t) -> (-u, H, -t) maps solutions to solutions.
TEST(Integrators, TimeReversal) {
  const Grid g(128, 40.0);
  const State s0 = gaussian(g, 0.3, 0.1);
  for (Model m : {Model::TwoCHPlus, Model::TwoCHMinus, Model::SWE}) {
    const SimConfig cfg = config(m, 1e-3, 1.0);
    const Trajectory fwd = simulate(s0, cfg);
    ASSERT_EQ(fwd.status, RunStatus::Completed);
    State back = fwd.states.back();
    back.u *= -1.0;
    const Trajectory rev = simulate(back, cfg);
    ASSERT_EQ(rev.status, RunStatus::Completed);
    EXPECT_LT((rev.states.back().u + s0.u).max_abs(), 1e-10) << to_string(m);
    EXPECT_LT((rev.states.back().H - s0.H).max_abs(), 1e-10) << to_string(m);
  }
}

TEST(Integrators, SamplingStrides) {
  const Grid g(64, 40.0);
  SimConfig cfg = config(Model::TwoCHPlus, 1e-2, 1.0);
  cfg.sample_every = 10;
  cfg.snapshot_every = 25;
  const Trajectory t = simulate(gaussian(g, 0.3, 0.1), cfg);
  EXPECT_EQ(t.diagnostics.size(), 11u);
  EXPECT_EQ(t.states.size(), 5u);
  EXPECT_DOUBLE_EQ(t.diagnostics[3].t, 0.3);
  EXPECT_DOUBLE_EQ(t.states[2].t, 0.5);
  EXPECT_EQ(step_count(cfg), 100u);
}

TEST(Integrators, SteepeningShallowWaterIsFlagged) {
  // Simple wave u = 2 (sqrt(H) - 1): the right-going characteristics cross at
  // t ~ 1.6 and the resolved slope then grows to the grid scale.
  const Grid g(1024, 40.0);
  State s0 = gaussian(g, 0.0, 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) s0.u[i] = 2.0 * (std::sqrt(s0.H[i]) - 1.0);
  SimConfig cfg = config(Model::SWE, 1e-3, 5.0);
  cfg.blowup_threshold = 5.0;
  const Trajectory t = simulate(s0, cfg);
  EXPECT_EQ(t.status, RunStatus::BreakingSuspected);
  EXPECT_NE(t.message.find("exceeds threshold"), std::string::npos);
  EXPECT_LT(t.states.back().t, 5.0);
  EXPECT_GT(t.states.back().t, 1.0);
  EXPECT_GT(diff(t.states.back().u, 1).max_abs(), 5.0);
}

TEST(Integrators, CollapsingMinusRunIsFlagged) {
  const Grid g(256, 40.0);
  const Trajectory t = simulate(gaussian(g, 0.3, 0.1), config(Model::TwoCHMinus, 1e-3, 3.0));
  EXPECT_EQ(t.status, RunStatus::BreakingSuspected);
  EXPECT_NE(t.message.find("H must be positive"), std::string::npos);
  EXPECT_GT(t.states.back().t, 2.0);
}

TEST(Integrators, InvalidConfigurationsThrow) {
  const Grid g(64, 40.0);
  const State s = gaussian(g, 0.3, 0.1);
  EXPECT_THROW(simulate(s, config(Model::TwoCHPlus, 0.0, 1.0)), PreconditionError);
  EXPECT_THROW(simulate(s, config(Model::TwoCHPlus, 2.0, 1.0)), PreconditionError);
  EXPECT_THROW(simulate(s, config(Model::TwoCHPlus, 0.3, 1.0)), PreconditionError);
  SimConfig c = config(Model::SW1, 0.1, 1.0);
  c.eps = 0.0;
  EXPECT_THROW(simulate(s, c), PreconditionError);
  c = config(Model::TwoCHPlus, 0.1, 1.0);
  c.sample_every = 0;
  EXPECT_THROW(simulate(s, c), PreconditionError);
  State dry = s;
  dry.H[0] = -0.1;
  EXPECT_THROW(simulate(dry, config(Model::TwoCHPlus, 0.1, 1.0)), PreconditionError);
}

TEST(Integrators, ConvergenceOfLinearModel) {
  const Grid g(64, 40.0);
  const double k = 2.0 * g.fundamental();
  const State s0{Field::from_function(g, [k](double x) { return 0.1 * std::sin(k * x); }),
                 Field::from_function(g, [k](double x) { return 1.0 + 0.05 * std::cos(k * x); }),
                 0.0};
  SimConfig cfg = config(Model::Linear, 0.1, 4.0);
  const ConvergenceResult r = convergence_study(s0, cfg, 4);
  ASSERT_TRUE(r.order.has_value());
  EXPECT_GT(*r.order, 3.8);
  EXPECT_LT(*r.order, 4.2);
  EXPECT_DOUBLE_EQ(r.reference_dt, 0.1 / 16);
  EXPECT_EQ(r.points.size(), 4u);
  EXPECT_THROW(convergence_study(s0, cfg, 2), PreconditionError);
}

TEST(Integrators, ConvergenceOfRestStateIsDegenerate) {
  const Grid g(64, 40.0);
  const State rest{Field::constant(g, 0.0), Field::constant(g, 1.0), 0.0};
  const ConvergenceResult r = convergence_study(rest, config(Model::TwoCHPlus, 0.1, 1.0), 3);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.order.has_value());
}

TEST(Integrators, SuggestDt) {
  const Grid g(64, 40.0);
  State s = gaussian(g, 0.5, 0.1);
  EXPECT_NEAR(suggest_dt(s), 0.5 * g.spacing() / s.u.max_abs(), 1e-15);
  EXPECT_NEAR(suggest_dt(s, 0.25), 0.25 * g.spacing() / s.u.max_abs(), 1e-15);
  s.u = Field::constant(g, 0.0);
  EXPECT_EQ(suggest_dt(s), std::numeric_limits<double>::infinity());
}

TEST(Integrators, LogLogSlope) {
  EXPECT_NEAR(fit_loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}), 2.0, 1e-14);
  EXPECT_NEAR(fit_loglog_slope({0.1, 0.01}, {1e-4, 1e-8}), 4.0, 1e-12);
  EXPECT_THROW(fit_loglog_slope({1, 2}, {1}), PreconditionError);
  EXPECT_THROW(fit_loglog_slope({1, 2}, {1, 0}), PreconditionError);
}

}  // namespace
}  // namespace twoch
