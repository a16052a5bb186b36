#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "qdr/crosscheck.hpp"
#include "qdr/error.hpp"
#include "qdr/io.hpp"
#include "qdr/oracle.hpp"
#include "qdr/response.hpp"
#include "qdr/steady.hpp"
#include "support.hpp"

namespace qdr {
namespace {

constexpr cplx kI{0.0, 1.0};

Trajectory pure_tone(double delta, cplx dc, cplx up, cplx down, double h, std::size_t n) {
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    const double time = 3.0 + static_cast<double>(i) * h;
    MeanFieldState y;
    y.a = dc + up * std::exp(-kI * delta * time) + down * std::exp(kI * delta * time);
    y.sigma = 0.5 * y.a;
    y.w = -0.5;
    t.push_back(time, y);
  }
  return t;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::BadValue;
}

TEST(Oracle, UndrivenGroundStateIsConstant) {
  Params p;
  p.g0 = 1.0;
  p.eta = 0.1;
  const auto traj = integrate_mean_field(p, MeanFieldState{}, 50.0, max_step(p));
  EXPECT_EQ(traj.final_state.w, -1.0);
  EXPECT_EQ(std::abs(traj.final_state.a), 0.0);
  EXPECT_EQ(std::abs(traj.final_state.sigma), 0.0);
  // The phonon relaxes towards its displaced rest position, which the
  // ground state already sits at only when eta = 0.
  p.eta = 0.0;
  const auto flat = integrate_mean_field(p, MeanFieldState{}, 50.0, max_step(p));
  for (std::size_t i = 0; i < flat.size(); ++i) EXPECT_EQ(flat.q[i], 0.0);
}

TEST(Oracle, InversionRelaxesAtPopulationRate) {
  Params p;
  MeanFieldState y;
  y.w = -0.5;
  const auto traj = integrate_mean_field(p, y, 5.0, 1e-3, {.stride = 100});
  for (std::size_t i = 0; i < traj.size(); ++i)
    EXPECT_NEAR(traj.w[i], -1.0 + 0.5 * std::exp(-2.0 * traj.t[i]), 1e-10);
}

TEST(Oracle, RejectsOversizedStep) {
  Params p;
  p.omega_k0 = 100.0;
  EXPECT_EQ(code_of([&] { integrate_mean_field(p, {}, 1.0, 2.0 * max_step(p)); }), ErrorCode::InvalidStep);
  EXPECT_EQ(code_of([&] { integrate_mean_field(p, {}, 1.0, 0.0); }), ErrorCode::InvalidStep);
  EXPECT_NO_THROW(integrate_mean_field(p, {}, 1.0, max_step(p)));
}

TEST(Oracle, BoundViolationAborts) {
  Params p;
  MeanFieldState y;
  y.w = 1.5;
  EXPECT_EQ(code_of([&] { integrate_mean_field(p, y, 1.0, max_step(p)); }), ErrorCode::BoundViolation);
}

TEST(Oracle, CommensurateStepDividesBeatPeriod) {
  Params p;
  p.omega_k0 = 37.0;
  p.delta0 = -7.3;
  const double h = commensurate_step(p);
  EXPECT_LE(h, max_step(p));
  const double per = 2.0 * std::numbers::pi / 7.3 / h;
  EXPECT_NEAR(per, std::round(per), 1e-9);
}

TEST(Oracle, DemodulatesPureTone) {
  const double delta = 2.5;
  const double period = 2.0 * std::numbers::pi / delta;
  const double h = period / 400.0;
  const auto t = pure_tone(delta, 0.0, 0.3, 0.0, h, 2 * 20 * 400);
  const Demodulated d = demodulate_sidebands(t, delta, 20);
  EXPECT_LT(std::abs(d.a_plus - 0.3), 1e-10);
  EXPECT_LT(std::abs(d.a_minus), 1e-10);
  EXPECT_LT(std::abs(d.a0), 1e-10);
  EXPECT_NEAR(d.explained_energy, 1.0, 1e-12);
}

TEST(Oracle, DemodulatesThreeTones) {
  const double delta = -4.0;
  const double h = 2.0 * std::numbers::pi / 4.0 / 250.0;
  const auto t = pure_tone(delta, {0.1, -0.2}, {0.0, 0.05}, {-0.02, 0.01}, h, 2 * 25 * 250);
  const Demodulated d = demodulate_sidebands(t, delta, 25);
  EXPECT_LT(std::abs(d.a0 - cplx(0.1, -0.2)), 1e-10);
  EXPECT_LT(std::abs(d.a_plus - cplx(0.0, 0.05)), 1e-10);
  EXPECT_LT(std::abs(d.a_minus - cplx(-0.02, 0.01)), 1e-10);
  EXPECT_LT(std::abs(d.sigma_plus - cplx(0.0, 0.025)), 1e-10);
}

TEST(Oracle, DemodulationPreconditions) {
  const double delta = 2.5;
  const double h = 2.0 * std::numbers::pi / delta / 400.0;
  const auto t = pure_tone(delta, 0.0, 0.3, 0.0, h, 2 * 20 * 400);
  EXPECT_EQ(code_of([&] { demodulate_sidebands(t, 0.0, 20); }), ErrorCode::ZeroDelta);
  EXPECT_EQ(code_of([&] { demodulate_sidebands(t, delta, 19); }), ErrorCode::BadValue);
  EXPECT_EQ(code_of([&] { demodulate_sidebands(t, delta * 1.001, 20); }), ErrorCode::IncommensurateWindow);
  const auto short_t = pure_tone(delta, 0.0, 0.3, 0.0, h, 20 * 400);
  EXPECT_EQ(code_of([&] { demodulate_sidebands(short_t, delta, 20); }), ErrorCode::NotSettled);
  Trajectory drifting = t;
  for (std::size_t i = 0; i < drifting.size(); ++i) drifting.a[i] += 1e-3 * drifting.t[i];
  EXPECT_EQ(code_of([&] { demodulate_sidebands(drifting, delta, 20); }), ErrorCode::NotSettled);
}

TEST(Oracle, FixedPointMatchesSteadyBranchForMonostablePresets) {
  for (double eta : {0.0, 0.02}) {
    Params p = testing::fig4_params(eta);
    const auto bs = solve_steady_branches(p);
    ASSERT_EQ(bs.size(), 1U);
    const auto traj = integrate_mean_field(p, MeanFieldState{}, 600.0, max_step(p), {.stride = 0});
    const MeanFieldState& y = traj.final_state;
    EXPECT_NEAR(y.w, bs[0].w0, 1e-6);
    EXPECT_LT(std::abs(y.a - bs[0].a0), 1e-6);
    EXPECT_LT(std::abs(y.sigma - bs[0].sigma0), 1e-6);
    EXPECT_NEAR(y.q, bs[0].q0, 1e-6);
  }
}

TEST(Oracle, FixedPointMatchesSteadyBranchWithDetunedCavity) {
  Params p;
  p.ep0 = 5.0;
  p.eta = 0.015;
  p.g0 = 1.5;
  p.delta_c0 = -10.0;
  p.delta_p0 = -10.0;
  const auto bs = solve_steady_branches(p);
  ASSERT_EQ(bs.size(), 1U);
  const auto traj = integrate_mean_field(p, MeanFieldState{}, 600.0, max_step(p), {.stride = 0});
  EXPECT_NEAR(traj.final_state.w, bs[0].w0, 1e-6);
  EXPECT_LT(std::abs(traj.final_state.a - bs[0].a0), 1e-6);
  EXPECT_NEAR(traj.final_state.q, bs[0].q0, 1e-6);
}

TEST(Oracle, SidebandMatchesLinearSolve) {
  Params p = testing::fig4_params(0.02);
  p.delta0 = 2.5;
  const OracleComparison c = compare_with_oracle(p);
  EXPECT_LT(c.relative_deviation, 1e-3);
  EXPECT_NEAR(c.linearity_ratio, 2.0, 2e-3);
  EXPECT_GT(c.explained_energy, 0.999);
  EXPECT_LT(c.dc_deviation, 1e-4);
}

TEST(Oracle, HalvingStepBarelyMovesSideband) {
  Params p = testing::fig4_params(0.02);
  p.delta0 = -3.0;
  const double es = signal_amplitude(p);
  const auto coarse = run_oracle_sidebands(p, es);
  const auto fine = run_oracle_sidebands(p, es, {.step_refinement = 2});
  EXPECT_LT(std::abs(fine.demod.a_plus - coarse.demod.a_plus) / std::abs(fine.demod.a_plus), 1e-6);
}

TEST(Oracle, ComparisonRefusesBistablePoints) {
  Params p = testing::fig2b_params();
  p.ep0 = 8.0;
  p.delta0 = 1.0;
  EXPECT_EQ(code_of([&] { compare_with_oracle(p); }), ErrorCode::BadConfig);
}

TEST(Oracle, PerturbationOfGroundStateDecays) {
  Params p;
  p.g0 = 1.0;
  const auto r = perturbation_test(p, MeanFieldState{});
  EXPECT_EQ(r.outcome, PerturbationOutcome::Decayed);
  EXPECT_LT(r.final_distance, 0.1 * r.initial_distance);
}

TEST(Oracle, PerturbationOfMiddleBranchDeparts) {
  Params p = testing::fig2b_params();
  p.ep0 = 8.0;
  const auto bs = solve_steady_branches(p);
  ASSERT_EQ(bs.size(), 3U);
  const auto r = perturbation_test(p, state_from_branch(bs[1]));
  EXPECT_EQ(r.outcome, PerturbationOutcome::Departed);
}

TEST(Oracle, TrajectoryCsvColumns) {
  Params p;
  MeanFieldState y;
  y.w = -0.5;
  const auto traj = integrate_mean_field(p, y, 0.1, 0.01);
  std::ostringstream s;
  write_trajectory_csv(s, traj);
  std::istringstream in(s.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,w,re_sigma,im_sigma,re_a,im_a,q,qdot");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, traj.size());
}

}  // namespace
}  // namespace qdr
