#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "zdaudit/chain.hpp"
#include "zdaudit/diff_optimizer.hpp"

using namespace zdaudit;

namespace {

const PayoffVectors kDet = deterministic_payoffs(default_params());
const PayoffVectors kProb = zdtest::probabilistic_defaults();
const PayoffVectors kRelaxed = zdtest::relaxed_payoffs();

bool playable(const Vec4& p) {
  for (double x : p) {
    if (x < 0.0 || x > 1.0) return false;
  }
  return true;
}

}  // namespace

TEST(GammaBounds, ProbabilisticDefaultsNegativePhi) {
  const auto b = gamma_bounds(kProb, -1.0);
  const Vec4 want{0.4, 16.8, 0.2, 13.4};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(b.lower_terms[i], want[i], 1e-12);
  EXPECT_NEAR(b.gamma_min, 16.8, 1e-12);
  EXPECT_NEAR(b.gamma_max, 1.2, 1e-12);
  EXPECT_FALSE(b.feasible);
  EXPECT_EQ(b.binding_lower, 1);
  EXPECT_EQ(b.binding_upper, 2);
}

TEST(GammaBounds, DeterministicDefaultsPositivePhi) {
  const auto b = gamma_bounds(kDet, 1.0);
  EXPECT_EQ(b.lower_terms, (Vec4{-1, 17, 2, 12}));
  EXPECT_EQ(b.upper_terms, (Vec4{0, 18, 3, 13}));
  EXPECT_EQ(b.gamma_min, 17);
  EXPECT_EQ(b.gamma_max, 0);
  EXPECT_FALSE(b.feasible);
}

TEST(GammaBounds, RelaxedInstanceIsFeasible) {
  const auto b = gamma_bounds(kRelaxed, -0.5);
  EXPECT_NEAR(b.gamma_min, 1.5, 1e-12);
  EXPECT_NEAR(b.gamma_max, 2.0, 1e-12);
  EXPECT_TRUE(b.feasible);
}

TEST(GammaBounds, ZeroPhiRejected) {
  try {
    gamma_bounds(kDet, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroPhi);
  }
}

TEST(GammaBounds, IntervalIsExactlyThePlayableSet) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 1000; ++k) {
    PayoffVectors pv;
    pv.u_d = zdtest::random_vec(rng, -3, 3);
    pv.u_a = zdtest::random_vec(rng, -3, 3);
    const double mag = std::pow(10.0, zdtest::uniform(rng, -1, 1));
    const double phi = (k % 2 ? 1.0 : -1.0) * mag;
    const auto b = gamma_bounds(pv, phi);
    const double eps = 1e-9;
    if (b.feasible) {
      for (int s = 0; s <= 10; ++s) {
        const double g = b.gamma_min + (b.gamma_max - b.gamma_min) * s / 10.0;
        Vec4 p = recover_strategy(pv, phi, g);
        for (double& x : p) ASSERT_TRUE(x >= -1e-12 && x <= 1 + 1e-12) << k;
      }
    }
    for (int s = 0; s < 20; ++s) {
      const double g = zdtest::uniform(rng, std::min(b.gamma_min, b.gamma_max) - 2,
                                       std::max(b.gamma_min, b.gamma_max) + 2);
      const bool inside = g >= b.gamma_min + eps && g <= b.gamma_max - eps;
      const bool outside = g < b.gamma_min - eps || g > b.gamma_max + eps;
      const bool ok = playable(recover_strategy(pv, phi, g));
      if (inside) {
        ASSERT_TRUE(ok) << k;
      }
      if (outside) {
        ASSERT_FALSE(ok) << k;
      }
    }
  }
}

TEST(Solve, RelaxedInstanceRecoversAndEnforces) {
  const double grid[] = {-0.5};
  const auto rep = solve_diff_max(kRelaxed, grid);
  ASSERT_TRUE(rep.any_feasible);
  const auto& s = rep.best;
  const Vec4 want{0.25, 1.0, 0.25, 0.35};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.p[i], want[i], 1e-12);
  EXPECT_NEAR(s.value, -1.5, 1e-12);

  const Vec4 hat{s.p[0] - 1, s.p[1] - 1, s.p[2], s.p[3]};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(hat[i], s.phi * (kRelaxed.u_d[i] - kRelaxed.u_a[i] + s.gamma), 1e-12);
  }

  std::mt19937_64 rng(7);
  int ergodic = 0;
  while (ergodic < 10) {
    const auto t = zdtest::random_attacker(rng, 0, 1);
    try {
      const auto out = stationary_utilities({s.p}, t, kRelaxed);
      EXPECT_NEAR(out.u_d - out.u_a, -1.5, 1e-9);
      ++ergodic;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::NonErgodic);
    }
  }
}

TEST(Solve, ProbabilisticDefaultsHaveNoFeasiblePhi) {
  const auto grid = default_phi_grid();
  ASSERT_EQ(grid.size(), 120u);
  EXPECT_LT(grid.front(), 0.0);
  EXPECT_NEAR(grid.front(), -10.0, 1e-12);
  EXPECT_NEAR(grid.back(), 10.0, 1e-12);
  const auto rep = solve_diff_max(kProb, grid);
  EXPECT_FALSE(rep.any_feasible);
  EXPECT_FALSE(rep.best.feasible);
  ASSERT_EQ(rep.per_phi.size(), grid.size());
  for (const auto& b : rep.per_phi) {
    EXPECT_FALSE(b.feasible);
    if (b.phi < 0) {
      EXPECT_NEAR(b.lower_terms[b.binding_lower], 16.8, 1e-12);
      EXPECT_EQ(b.binding_lower, 1);
      // the state-10 upper term 1.2 binds until 0.4 + 1/|phi| drops below it
      const int upper = b.phi >= -1.25 ? 2 : 0;
      EXPECT_EQ(b.binding_upper, upper);
    }
  }
}

TEST(Solve, EmptyGridRejected) {
  try {
    solve_diff_max(kProb, std::span<const double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
  }
}

TEST(Solve, IdenticalPayoffsGiveDegenerateStrategy) {
  PayoffVectors pv;
  pv.u_d = {1, 2, 3, 4};
  pv.u_a = pv.u_d;
  const double grid[] = {1.0};
  const auto rep = solve_diff_max(pv, grid);
  EXPECT_EQ(rep.best.gamma, 0.0);
  EXPECT_EQ(rep.best.p, (Vec4{1, 1, 0, 0}));
  try {
    stationary_utilities({rep.best.p}, {{0.3, 0.6}}, pv);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonErgodic);
  }
}

TEST(Solve, FeasibleSolutionsEnforceTheirValue) {
  const auto rep = solve_diff_max(kRelaxed, default_phi_grid());
  ASSERT_TRUE(rep.any_feasible);
  std::mt19937_64 rng(77);
  int checked = 0;
  for (const auto& b : rep.per_phi) {
    if (!b.feasible) continue;
    const double grid[] = {b.phi};
    const auto s = solve_diff_max(kRelaxed, grid).best;
    ASSERT_TRUE(s.feasible);
    for (int k = 0; k < 10; ++k) {
      try {
        const auto out = stationary_utilities({s.p}, zdtest::random_attacker(rng, 0, 1), kRelaxed);
        ASSERT_NEAR(out.u_d - out.u_a, s.value, 1e-9) << b.phi;
        ++checked;
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::NonErgodic);
      }
    }
    EXPECT_LE(s.value, rep.best.value);
  }
  EXPECT_GT(checked, 0);
}

TEST(Solve, DeterministicPipelineMatchesFullAuditProbabilistic) {
  std::mt19937_64 rng(55);
  const auto grid = default_phi_grid();
  for (int k = 0; k < 50; ++k) {
    const auto g = zdtest::random_strict_params(rng);
    const auto a = solve_diff_max(deterministic_payoffs(g), grid);
    const auto b = solve_diff_max(probabilistic_payoffs(g, make_policy(1.0, 0.0)), grid);
    ASSERT_EQ(a.any_feasible, b.any_feasible);
    ASSERT_EQ(a.best.value, b.best.value);
    ASSERT_EQ(a.best.p, b.best.p);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ASSERT_EQ(a.per_phi[i].gamma_min, b.per_phi[i].gamma_min);
      ASSERT_EQ(a.per_phi[i].gamma_max, b.per_phi[i].gamma_max);
    }
  }
}

TEST(Oracle, RelaxedInstanceFindsTheRecoveredCell) {
  const auto rep = brute_force_diff_oracle(kRelaxed, 0.05, 0.1);
  EXPECT_EQ(rep.cells_scanned, 21u * 21u * 21u * 21u);
  ASSERT_FALSE(rep.enforcing.empty());
  bool found = false;
  for (const auto& c : rep.enforcing) {
    if (std::abs(c.p[0] - 0.25) < 1e-9 && c.p[1] == 1.0 && std::abs(c.p[2] - 0.25) < 1e-9 &&
        std::abs(c.p[3] - 0.35) < 1e-9) {
      found = true;
      EXPECT_NEAR(c.value, -1.5, 1e-6);
      EXPECT_LE(c.spread, 1e-6);
    }
  }
  EXPECT_TRUE(found);

  // the best enforced value agrees with the closed-form optimum over phi
  const auto closed = solve_diff_max(kRelaxed, default_phi_grid());
  ASSERT_TRUE(rep.best.has_value());
  EXPECT_NEAR(rep.best->value, closed.best.value, 0.05);
}

TEST(Oracle, ProbabilisticDefaultsNeverEnforceTheClosedFormValue) {
  const auto rep = brute_force_diff_oracle(kProb, 0.1, 0.1);
  for (const auto& c : rep.enforcing) EXPECT_GT(std::abs(c.value - (-16.8)), 1e-3);
}

TEST(Oracle, ThreadCountDoesNotChangeResult) {
  const auto one = brute_force_diff_oracle(kRelaxed, 0.1, 0.25, 1e-6, 1);
  const auto many = brute_force_diff_oracle(kRelaxed, 0.1, 0.25, 1e-6, 4);
  ASSERT_EQ(one.enforcing.size(), many.enforcing.size());
  EXPECT_EQ(one.degenerate_cells, many.degenerate_cells);
  for (std::size_t i = 0; i < one.enforcing.size(); ++i) {
    EXPECT_EQ(one.enforcing[i].p, many.enforcing[i].p);
    EXPECT_EQ(one.enforcing[i].value, many.enforcing[i].value);
  }
}

TEST(Oracle, AbsorbingCellsAreDegenerate) {
  const auto rep = brute_force_diff_oracle(kRelaxed, 0.5, 0.5);
  EXPECT_GT(rep.degenerate_cells, 0u);
  for (const auto& c : rep.enforcing) EXPECT_GE(c.ergodic_q, 2);
}

TEST(Oracle, RejectsBadSteps) {
  EXPECT_THROW(brute_force_diff_oracle(kRelaxed, 0.0, 0.1), Error);
  EXPECT_THROW(brute_force_diff_oracle(kRelaxed, 0.1, 0.6), Error);
}
