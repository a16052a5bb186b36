#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "qdr/crosscheck.hpp"
#include "qdr/error.hpp"
#include "qdr/oracle.hpp"
#include "qdr/steady.hpp"
#include "qdr/sweep.hpp"
#include "support.hpp"

namespace qdr {
namespace {

constexpr cplx kI{0.0, 1.0};

// Steady coherence and field for a fixed inversion, obtained by solving the
// two steady field equations directly.
std::pair<cplx, cplx> direct_fields(const Params& p, double w) {
  const double q = -2.0 * p.eta * p.omega_k0 * w;
  Eigen::Matrix2cd m;
  m << -(1.0 + kI * (p.delta_p0 + q)), 2.0 * kI * p.g0 * w, -kI * p.g0, -(kI * p.delta_c0 + p.kappa_c0);
  const Eigen::Vector2cd rhs(0.0, -p.ep0);
  const Eigen::Vector2cd x = m.partialPivLu().solve(rhs);
  return {x(0), x(1)};
}

double direct_cleared_balance(const Params& p, double w) {
  const auto [s, a] = direct_fields(p, w);
  const double balance = -p.gamma1_ratio * (w + 1.0) + 2.0 * p.g0 * (a * std::conj(s)).imag();
  const cplx den = (kI * p.delta_c0 + p.kappa_c0) * (p.delta_p0 - kI - 2.0 * p.omega_k0 * p.eta * w) +
                   2.0 * kI * p.g0 * p.g0 * w;
  return balance * std::norm(den);
}

double magnitude_scale(const InversionPolynomial& c, double w) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += std::abs(c.coeffs[static_cast<std::size_t>(k)]) * std::pow(std::abs(w), k);
  return s;
}

TEST(Steady, CubicMatchesDirectClearedBalance) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> node(-1.2, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    const Params p = testing::random_params(rng);
    const InversionPolynomial c = build_inversion_polynomial(p);
    for (int i = 0; i < 10; ++i) {
      const double w = node(rng);
      EXPECT_LE(std::abs(c(w) - direct_cleared_balance(p, w)), 1e-12 * magnitude_scale(c, w))
          << "trial " << trial << " w=" << w;
    }
  }
}

TEST(Steady, BranchesAreFixedPointsOfTheDynamics) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Params p = testing::random_params(rng);
    for (const SteadyBranch& b : solve_steady_branches(p)) {
      const MeanFieldState d = mean_field_rhs(p, 0.0, 0.0, state_from_branch(b));
      const double scale = 1.0 + p.ep0 + std::abs(b.a0) + p.omega_k0 * p.omega_k0 * std::abs(b.q0);
      EXPECT_LT(std::abs(d.w), 1e-9 * scale);
      EXPECT_LT(std::abs(d.sigma), 1e-9 * scale);
      EXPECT_LT(std::abs(d.a), 1e-9 * scale);
      EXPECT_LT(std::abs(d.qdot), 1e-9 * scale);
    }
  }
}

TEST(Steady, CavityFieldAgreesWithDirectSteadyLimit) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Params p = testing::random_params(rng);
    for (const SteadyBranch& b : solve_steady_branches(p)) {
      const auto [s, a] = direct_fields(p, b.w0);
      EXPECT_LT(std::abs(b.a0 - a), 1e-9 * (1.0 + std::abs(a)));
      EXPECT_LT(std::abs(b.sigma0 - s), 1e-9 * (1.0 + std::abs(s)));
    }
  }
}

TEST(Steady, RootsAreRealSortedAndResidualBounded) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const Params p = testing::random_params(rng);
    const auto branches = solve_steady_branches(p);
    ASSERT_TRUE(branches.size() == 1 || branches.size() == 3) << branches.size();
    for (std::size_t i = 0; i < branches.size(); ++i) {
      EXPECT_LT(branches[i].residual, 1e-10);
      if (i > 0) EXPECT_LT(branches[i - 1].w0, branches[i].w0);
    }
  }
}

TEST(Steady, RootsMatchIndependentBracketing) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Params p = testing::random_params(rng);
    const auto branches = solve_steady_branches(p);
    // Bracket sign changes of the direct balance over the physical interval.
    std::vector<double> found;
    const int n = 4000;
    double x0 = -1.0;
    double f0 = direct_cleared_balance(p, x0);
    for (int i = 1; i <= n; ++i) {
      const double x1 = -1.0 + static_cast<double>(i) / n;
      const double f1 = direct_cleared_balance(p, x1);
      if (f0 == 0.0) found.push_back(x0);
      else if (f0 * f1 < 0.0) {
        double lo = x0, hi = x1, flo = f0;
        for (int k = 0; k < 200; ++k) {
          const double mid = 0.5 * (lo + hi);
          const double fm = direct_cleared_balance(p, mid);
          if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        found.push_back(0.5 * (lo + hi));
      }
      x0 = x1;
      f0 = f1;
    }
    std::vector<double> physical;
    for (const auto& b : branches)
      if (b.physical) physical.push_back(b.w0);
    ASSERT_EQ(found.size(), physical.size()) << "trial " << trial;
    for (std::size_t i = 0; i < found.size(); ++i) EXPECT_NEAR(found[i], physical[i], 1e-9);
  }
}

TEST(Steady, UndrivenGroundState) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Params p = testing::random_params(rng);
    p.ep0 = 0.0;
    const auto branches = solve_steady_branches(p);
    ASSERT_EQ(branches.size(), 1U);
    EXPECT_NEAR(branches[0].w0, -1.0, 1e-12);
    EXPECT_EQ(std::abs(branches[0].a0), 0.0);
    EXPECT_EQ(std::abs(branches[0].sigma0), 0.0);
    EXPECT_NEAR(branches[0].q0, 2.0 * p.eta * p.omega_k0, 1e-12 * (1.0 + p.eta * p.omega_k0));
    EXPECT_EQ(branches[0].stability, Stability::Stable);
    const InversionPolynomial m = build_inversion_polynomial(p).monic();
    double scale = 0.0;
    for (double c : m.coeffs) scale = std::max(scale, std::abs(c));
    EXPECT_NEAR(m(-1.0), 0.0, 1e-12 * scale);
  }
}

TEST(Steady, PhononDisplacementSatisfiesSteadyOscillator) {
  Params p = testing::fig2b_params();
  p.ep0 = 8.0;
  for (const auto& b : solve_steady_branches(p))
    EXPECT_NEAR(p.omega_k0 * p.omega_k0 * b.q0, -2.0 * p.eta * std::pow(p.omega_k0, 3) * b.w0, 1e-9);
}

TEST(Steady, BistableWindowHasOneUnstableMiddleRoot) {
  Params p = testing::fig2b_params();
  for (double ep : {4.0, 6.0, 8.0, 10.0, 12.0, 14.0}) {
    p.ep0 = ep;
    const auto b = solve_steady_branches(p);
    ASSERT_EQ(b.size(), 3U) << ep;
    EXPECT_EQ(b[0].stability, Stability::Stable);
    EXPECT_EQ(b[1].stability, Stability::Unstable);
    EXPECT_EQ(b[2].stability, Stability::Stable);
  }
}

TEST(Steady, RootCountRisesAndFallsAcrossWindow) {
  Params p = testing::fig2b_params();
  std::vector<std::size_t> counts;
  for (double ep : linspace(0.0, 20.0, 201)) {
    p.ep0 = ep;
    const auto n = solve_steady_branches(p).size();
    if (counts.empty() || counts.back() != n) counts.push_back(n);
  }
  EXPECT_EQ(counts, (std::vector<std::size_t>{1, 3, 1}));
}

TEST(Steady, DetuningWindowGrowsWithPump) {
  Params p;
  p.eta = 0.2;
  p.g0 = 0.1;
  p.omega_k0 = 100.0;
  p.delta_c0 = 10.0;
  p.kappa_c0 = 1.35;
  const auto grid = linspace(-60.0, 20.0, 801);
  p.ep0 = 81.0;
  const auto w81 = find_bistable_window(p, ContinuationAxis::DeltaP0, grid);
  p.ep0 = 36.0;
  const auto w36 = find_bistable_window(p, ContinuationAxis::DeltaP0, grid);
  p.ep0 = 12.0;
  const auto w12 = find_bistable_window(p, ContinuationAxis::DeltaP0, grid);
  ASSERT_TRUE(w81.has_value());
  ASSERT_TRUE(w36.has_value());
  EXPECT_FALSE(w12.has_value());
  EXPECT_GT(w81->hi - w81->lo, w36->hi - w36->lo);
}

TEST(Steady, AnalyticJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Params p = testing::random_params(rng);
    for (const SteadyBranch& b : solve_steady_branches(p)) {
      const auto jac = mean_field_jacobian(p, b);
      const MeanFieldState y = state_from_branch(b);
      const auto pack = [](const MeanFieldState& s) {
        return Eigen::Matrix<double, 7, 1>(s.w, s.sigma.real(), s.sigma.imag(), s.a.real(), s.a.imag(), s.q, s.qdot);
      };
      const auto unpack = [](const Eigen::Matrix<double, 7, 1>& v) {
        return MeanFieldState{v(0), {v(1), v(2)}, {v(3), v(4)}, v(5), v(6)};
      };
      const Eigen::Matrix<double, 7, 1> y0 = pack(y);
      for (int j = 0; j < 7; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(y0(j)));
        Eigen::Matrix<double, 7, 1> yp = y0, ym = y0;
        yp(j) += h;
        ym(j) -= h;
        const Eigen::Matrix<double, 7, 1> col =
            (pack(mean_field_rhs(p, 0.0, 0.0, unpack(yp))) - pack(mean_field_rhs(p, 0.0, 0.0, unpack(ym)))) / (2.0 * h);
        for (int i = 0; i < 7; ++i)
          EXPECT_NEAR(jac(i, j), col(i), 1e-5 * (1.0 + std::abs(col(i)))) << "entry " << i << "," << j;
      }
    }
  }
}

TEST(Steady, HysteresisTracesDifferOnlyBetweenTurningPoints) {
  Params p = testing::fig2b_params();
  const auto grid = linspace(0.0, 20.0, 401);
  const HysteresisResult h = hysteresis_sweep(p, ContinuationAxis::Ep0, grid);
  ASSERT_EQ(h.up_turns.size(), 1U);
  ASSERT_EQ(h.down_turns.size(), 1U);
  const double p1 = h.up_turns[0].x_to;
  const double p2 = h.down_turns[0].x_to;
  EXPECT_GT(p1, p2);
  ASSERT_EQ(h.up.size(), grid.size());
  ASSERT_EQ(h.down.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SpectrumRecord& u = h.up[i];
    const SpectrumRecord& d = h.down[grid.size() - 1 - i];
    ASSERT_EQ(u.x, d.x);
    const bool inside = u.x > p2 && u.x < p1;
    if (inside) EXPECT_NE(u.w0, d.w0) << u.x;
    else EXPECT_EQ(u.w0, d.w0) << u.x;
  }
}

TEST(Steady, HysteresisTracesCoincideWithoutBistability) {
  Params p = testing::fig2b_params();
  p.g0 = 0.05;
  const auto grid = linspace(0.0, 40.0, 201);
  const HysteresisResult h = hysteresis_sweep(p, ContinuationAxis::Ep0, grid);
  EXPECT_TRUE(h.up_turns.empty());
  EXPECT_TRUE(h.down_turns.empty());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(h.up[i].w0, h.down[grid.size() - 1 - i].w0);
}

TEST(Steady, HysteresisNeedsTwoAscendingPoints) {
  const Params p = testing::fig2b_params();
  const std::vector<double> one{1.0};
  const std::vector<double> desc{2.0, 1.0};
  for (const auto* g : {&one, &desc}) {
    try {
      hysteresis_sweep(p, ContinuationAxis::Ep0, *g);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidGrid);
    }
  }
}

TEST(Steady, StabilityLabelsMatchPerturbationIntegration) {
  Params p = testing::fig2b_params();
  p.omega_k0 = 10.0;
  for (double ep : {5.0, 9.0, 13.0}) {
    p.ep0 = ep;
    for (const SteadyBranch& b : solve_steady_branches(p)) {
      const PerturbationReport r = perturbation_test(p, state_from_branch(b));
      if (b.stable()) EXPECT_EQ(r.outcome, PerturbationOutcome::Decayed) << ep << " " << b.w0;
      else EXPECT_EQ(r.outcome, PerturbationOutcome::Departed) << ep << " " << b.w0;
    }
  }
}

}  // namespace
}  // namespace qdr
