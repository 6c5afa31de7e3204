#include <gtest/gtest.h>

#include <random>

#include "mobius/dynamics.hpp"
#include "mobius/equilibria.hpp"
#include "mobius/errors.hpp"
#include "mobius/integrator.hpp"
#include "mobius/reduced.hpp"
#include "oracles.hpp"

using namespace mobius;

namespace {

ReducedState random_state(std::mt19937_64& rng, const ReducedParams& p) {
  std::uniform_real_distribution<double> ux(-kPi, kPi), uy(-3.0, 3.0);
  for (;;) {
    ReducedState st{ux(rng), uy(rng)};
    try {
      reduced_system(st, p);
      if (std::hypot(st.dx, st.y1 - p.c / (p.gamma1 + p.gamma2)) > 0.2 &&
          std::hypot(std::abs(st.dx) - kPi, st.y1 - p.c / (p.gamma1 - p.gamma2)) > 0.2)
        return st;
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST(ReducedParams, Validation) {
  EXPECT_THROW((ReducedParams{1.0, 2.0, 0.0}.validate()), ValidationError);
  EXPECT_THROW((ReducedParams{1.0, -1.0, 0.0}.validate()), ValidationError);
  EXPECT_NO_THROW((ReducedParams{1.0, 1.0, 0.0}.validate()));
}

TEST(ReducedHamiltonian, EqualsFullHamiltonian) {
  std::mt19937_64 rng(51);
  ReducedParams p{2.0, 1.0, 0.7};
  for (int i = 0; i < 200; ++i) {
    auto st = random_state(rng, p);
    EXPECT_NEAR(reduced_hamiltonian(st, p), oracle::hamiltonian(reduced_system(st, p)), 1e-12);
  }
}

TEST(ReducedHamiltonian, EvenInDxAndSymmetricAtZeroMomentum) {
  std::mt19937_64 rng(52);
  ReducedParams p{3.0, 1.0, 1.2};
  ReducedParams p0{3.0, 1.0, 0.0};
  for (int i = 0; i < 200; ++i) {
    auto st = random_state(rng, p);
    EXPECT_NEAR(reduced_hamiltonian(st, p), reduced_hamiltonian({-st.dx, st.y1}, p), 1e-13);
    EXPECT_NEAR(reduced_hamiltonian({st.dx + kTwoPi, st.y1}, p), reduced_hamiltonian(st, p),
                1e-12);
    auto s0 = random_state(rng, p0);
    EXPECT_NEAR(reduced_hamiltonian(s0, p0), reduced_hamiltonian({-s0.dx, -s0.y1}, p0), 1e-13);
  }
}

TEST(ReducedHamiltonian, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(53);
  ReducedParams p{2.0, 1.0, 1.0};
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    auto st = random_state(rng, p);
    auto g = reduced_gradient(st, p);
    const double fx = (reduced_hamiltonian({st.dx + h, st.y1}, p) -
                       reduced_hamiltonian({st.dx - h, st.y1}, p)) / (2 * h);
    const double fy = (reduced_hamiltonian({st.dx, st.y1 + h}, p) -
                       reduced_hamiltonian({st.dx, st.y1 - h}, p)) / (2 * h);
    EXPECT_NEAR(g[0], fx, 1e-6);
    EXPECT_NEAR(g[1], fy, 1e-6);
  }
}

TEST(ReducedHamiltonian, SingularPoints) {
  ReducedParams p{2.0, 1.0, 1.0};
  EXPECT_THROW(reduced_hamiltonian({0.0, 1.0 / 3.0}, p), SingularityError);
  EXPECT_THROW(reduced_hamiltonian({kPi, 1.0}, p), SingularityError);
  EXPECT_GT(reduced_hamiltonian({0.0, 1.0 / 3.0 + 1e-6}, p), reduced_hamiltonian({0.0, 0.0}, p));
  EXPECT_LT(reduced_hamiltonian({kPi, 1.0 + 1e-6}, p), reduced_hamiltonian({kPi, 0.0}, p));
}

TEST(ReducedHamiltonian, GrowsLinearlyWithTheAsymptoticSlope) {
  for (auto p : {ReducedParams{2.0, 1.0, 1.0}, ReducedParams{3.0, 1.0, -0.5},
                 ReducedParams{1.5, 1.0, 2.0}}) {
    const double slope = asymptotic_slope(p);
    EXPECT_NEAR(slope, p.gamma1 * (p.gamma1 - p.gamma2) / (4.0 * kPi), 1e-15);
    for (double sign : {1.0, -1.0}) {
      const double y = 60.0 * sign;
      const double d = reduced_hamiltonian({0.4, y + sign}, p) - reduced_hamiltonian({0.4, y}, p);
      EXPECT_NEAR(d, slope, 1e-9);
    }
  }
}

TEST(ReducedHamiltonian, EqualStrengthPlateau) {
  for (double c : {0.0, 0.6, -1.5})
    for (double dx : {0.3, 1.7, 2.9}) {
      ReducedParams p{1.3, 1.3, c};
      EXPECT_NEAR(reduced_hamiltonian({dx, 40.0}, p), equal_strength_limit(dx, 1.3, c), 1e-12);
      EXPECT_NEAR(reduced_hamiltonian({dx, -40.0}, p), equal_strength_limit(dx, 1.3, c), 1e-12);
      // Mirror symmetry about y1 = C / (2 gamma).
      const double mid = c / 2.6;
      EXPECT_NEAR(reduced_hamiltonian({dx, mid + 0.8}, p),
                  reduced_hamiltonian({dx, mid - 0.8}, p), 1e-13);
    }
}

TEST(ReducedHamiltonian, EqualStrengthZeroMomentumPiLineIsSingular) {
  ReducedParams p{1.0, 1.0, 0.0};
  EXPECT_THROW(reduced_hamiltonian({kPi, 0.7}, p), SingularityError);
  EXPECT_LT(reduced_hamiltonian({kPi - 1e-4, 0.7}, p), reduced_hamiltonian({kPi - 0.1, 0.7}, p));
  auto rep = critical_points(p);
  EXPECT_TRUE(rep.pi_line_singular);
}

TEST(ReducedVelocity, MatchesFullSystem) {
  std::mt19937_64 rng(54);
  ReducedParams p{2.5, 1.0, -0.4};
  for (int i = 0; i < 200; ++i) {
    auto st = random_state(rng, p);
    auto s = reduced_system(st, p);
    auto w = oracle::velocity(s);
    // Vortices may have been flipped into the chart; undo that for comparison.
    auto lifted = reduced_lift(st, p);
    double xdot[2], ydot[2];
    for (int k = 0; k < 2; ++k) {
      const double sgn = s[k].strength == (k == 0 ? p.gamma1 : p.gamma2) ? 1.0 : -1.0;
      xdot[k] = w[k].real();
      ydot[k] = sgn * w[k].imag();
    }
    auto v = reduced_velocity(st, p);
    EXPECT_NEAR(v.x1dot, xdot[0], 1e-12);
    EXPECT_NEAR(v.x2dot, xdot[1], 1e-12);
    EXPECT_NEAR(v.ddx, xdot[0] - xdot[1], 1e-12);
    EXPECT_NEAR(v.dy1, ydot[0], 1e-12);
    EXPECT_NEAR(p.gamma1 * ydot[0] + p.gamma2 * ydot[1], 0.0, 1e-12);
    EXPECT_EQ(lifted[1], 0.0);
  }
}

TEST(ReducedVelocity, VerticalMotionStopsOnCriticalLines) {
  ReducedParams p{2.0, 1.0, 1.0};
  for (double y : {-2.0, 0.0, 0.9, 3.0}) {
    EXPECT_EQ(reduced_velocity({0.0, y}, p).dy1, 0.0);
    // sin(pi) is not exactly zero in floating point.
    EXPECT_NEAR(reduced_velocity({kPi, y}, p).dy1, 0.0, 1e-14);
  }
}

TEST(ReducedVelocity, FarFieldSpeeds) {
  ReducedParams p{3.0, 1.0, 1.0};
  auto v = reduced_velocity({0.7, 15.0}, p);
  EXPECT_NEAR(v.x1dot, -(2 * p.gamma2 - p.gamma1) / (4 * kPi), 1e-5);
  EXPECT_NEAR(v.x2dot, -p.gamma2 / (4 * kPi), 1e-5);
}

TEST(ReducedGradient, SignLaw) {
  for (auto p : {ReducedParams{2.0, 1.0, 1.0}, ReducedParams{3.0, 1.0, 4.0},
                 ReducedParams{1.0, 1.0, 0.5}}) {
    for (int j = 0; j < 80; ++j)
      for (int i = 0; i < 80; ++i) {
        ReducedState st{-kPi + kTwoPi * (i + 0.5) / 80, -4.0 + 8.0 * (j + 0.5) / 80};
        auto g = reduced_gradient(st, p);
        EXPECT_LE(g[0] * std::sin(st.dx), 0.0);
      }
  }
}

TEST(CriticalPoints, TwoSaddlesOnTheZeroLine) {
  auto rep = critical_points({2.0, 1.0, 1.0});
  ASSERT_EQ(rep.on_zero.size(), 2u);
  for (const auto& c : rep.on_zero) {
    EXPECT_EQ(c.kind, CriticalKind::saddle);
    auto g = reduced_gradient(c.state, rep.params);
    EXPECT_NEAR(g[1], 0.0, 1e-12);
  }
  EXPECT_NEAR(rep.on_zero[0].state.y1, -0.892448438109, 1e-9);
  EXPECT_NEAR(rep.on_zero[1].state.y1, 1.621511601547, 1e-9);
  ASSERT_EQ(rep.singular.size(), 2u);
  EXPECT_EQ(rep.singular[0].sign, 1);
  EXPECT_EQ(rep.singular[1].sign, -1);
}

TEST(CriticalPoints, SaddleMinimumPairOnThePiLine) {
  auto rep = critical_points({2.0, 1.0, 4.0});
  EXPECT_EQ(rep.count(CriticalKind::minimum), 1u);
  ASSERT_EQ(rep.on_pi.size(), 2u);
  EXPECT_EQ(rep.on_pi[0].kind, CriticalKind::minimum);
  EXPECT_EQ(rep.on_pi[1].kind, CriticalKind::saddle);
  // The minimum sits below the saddle.
  EXPECT_LT(rep.on_pi[0].state.y1, rep.on_pi[1].state.y1);
}

TEST(CriticalPoints, FixedEquilibriumAppearsAtItsMomentum) {
  auto pair = fixed_equilibrium_two(2.0, 1.0)[0];
  auto rep = critical_points({2.0, 1.0, pair.momentum});
  double best = INFINITY;
  for (const auto& c : rep.on_zero) best = std::min(best, std::abs(c.state.y1 - pair.y1));
  EXPECT_LT(best, 1e-8);
}

TEST(ClassifyOrbit, ZeroMomentumTypeOneHasNoNetDrift) {
  auto rep = classify_orbit({0.3, 0.0}, {2.0, 1.0, 0.0});
  EXPECT_EQ(rep.type, OrbitType::I);
  EXPECT_NEAR(rep.period, 1.2028, 1e-3);
  EXPECT_LE(std::abs(rep.winding1), 1e-6);
  EXPECT_LE(rep.energy_drift, 1e-8);
  EXPECT_NEAR(rep.dx_advance, 0.0, 1e-9);
}

TEST(ClassifyOrbit, TypeTwoAroundThePiLine) {
  auto rep = classify_orbit({2.5, 0.0}, {2.0, 1.0, 0.0});
  EXPECT_EQ(rep.type, OrbitType::II);
  EXPECT_NEAR(rep.dx_advance, 0.0, 1e-9);
}

TEST(ClassifyOrbit, TypeThreeCoRotationDependsOnStrengthRatio) {
  auto co = classify_orbit({0.0, 4.0}, {1.5, 1.0, 1.0});
  EXPECT_EQ(co.type, OrbitType::III);
  EXPECT_TRUE(co.co_rotating);
  EXPECT_NEAR(std::abs(co.winding1 - co.winding2), kTwoPi, 1e-6);
  auto counter = classify_orbit({0.0, 4.0}, {3.0, 1.0, 1.0});
  EXPECT_EQ(counter.type, OrbitType::III);
  EXPECT_FALSE(counter.co_rotating);
  EXPECT_NEAR(std::abs(counter.winding1 - counter.winding2), kTwoPi, 1e-6);
}

TEST(ClassifyOrbit, PeriodShrinksLikeSquaredDistanceNearTheSingularPoint) {
  ReducedParams p{2.0, 1.0, 1.0};
  const double ys = 1.0 / 3.0;
  std::vector<double> ratio;
  double prev = INFINITY;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    auto rep = classify_orbit({0.0, ys + eps}, p);
    EXPECT_EQ(rep.type, OrbitType::I);
    EXPECT_LT(rep.period, prev);
    prev = rep.period;
    ratio.push_back(rep.period / (eps * eps));
  }
  for (std::size_t i = 1; i < ratio.size(); ++i) EXPECT_NEAR(ratio[i] / ratio[i - 1], 1.0, 0.05);
}

TEST(ClassifyOrbit, CriticalStartIsRejected) {
  auto rep = critical_points({2.0, 1.0, 1.0});
  EXPECT_THROW(classify_orbit(rep.on_zero[0].state, rep.params), DomainError);
}

TEST(ClassifyOrbit, MatchesFullIntegration) {
  ReducedParams p{2.0, 1.0, 0.5};
  ReducedState st{0.6, 0.2};
  auto rep = classify_orbit(st, p);
  auto rows = reduced_orbit_samples(st, p, rep.period, rep.period / 50);
  IntegratorConfig cfg;
  cfg.rel_tol = cfg.abs_tol = 1e-12;
  cfg.t_end = rep.period;
  cfg.sample_dt = rep.period / 50;
  auto tr = integrate(reduced_system(st, p), cfg);
  // Undo any flip canonicalization applied to the starting representatives.
  const double s1 = tr.strengths[0] / p.gamma1;
  const double s2 = tr.strengths[1] / p.gamma2;
  const double shift = (s1 < 0 ? kPi : 0.0) - (s2 < 0 ? kPi : 0.0);
  for (const auto& row : rows) {
    auto u = tr.state_at(row[0]);
    EXPECT_NEAR(wrap_signed(u[0] - u[1] + shift - row[1]), 0.0, 1e-6);
    EXPECT_NEAR(s1 * u[2], row[2], 1e-6);
  }
}

TEST(PhasePortrait, MasksSingularCells) {
  PortraitGrid g;
  g.nx = 41;
  g.ny = 41;
  g.y_min = -1.0;
  g.y_max = 5.0 / 3.0;
  g.mask_radius = 0.05;
  auto portrait = phase_portrait({2.0, 1.0, 1.0}, g, 2);
  ASSERT_EQ(portrait.h.size(), 41u * 41u);
  std::size_t masked = 0;
  for (double v : portrait.h) masked += std::isnan(v);
  EXPECT_GE(masked, 1u);
  EXPECT_EQ(portrait.critical.on_zero.size(), 2u);
}

TEST(Sweeps, WindingSignChangeAcrossStrengthRatios) {
  std::vector<ReducedParams> ps;
  for (double g1 : {1.2, 1.5, 1.8, 2.5, 3.0}) ps.push_back({g1, 1.0, 1.0});
  auto samples = sweep_windings(ps, {0.0, 4.0}, 2);
  for (const auto& s : samples) ASSERT_TRUE(s.report.has_value()) << s.error;
  EXPECT_FALSE(winding_sign_changes(samples).empty());
  auto reps = sweep_critical(ps, 2);
  ASSERT_EQ(reps.size(), ps.size());
  for (const auto& r : reps) EXPECT_GE(r.count(CriticalKind::saddle), 2u);
}
