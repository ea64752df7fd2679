#include <gtest/gtest.h>

#include <array>
#include <limits>
#include <random>

#include "support.hpp"
#include "zdaudit/game.hpp"

using namespace zdaudit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::InvalidArgument;
}

void expect_vec(const Vec4& got, const Vec4& want, double tol = 1e-12) {
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], tol) << "entry " << i;
}

// Enumerates every pure profile (d, a after d=0, a after d=1) and keeps the
// subgame-perfect one: each response must be the attacker's best (attack on
// ties), then the defender picks its best node (signal on ties).
GameState enumerate_equilibrium(const PayoffVectors& pv) {
  std::array<int, 2> best_reply{-1, -1};
  for (int d = 0; d < 2; ++d) {
    for (int a = 1; a >= 0; --a) {
      const int other = 1 - a;
      const double mine = pv.u_a[2 * d + a];
      const double alt = pv.u_a[2 * d + other];
      if (mine > alt || (mine == alt && a == 1)) best_reply[d] = a;
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  int state = -1;
  for (int d = 1; d >= 0; --d) {
    const double v = pv.u_d[2 * d + best_reply[d]];
    if (v > best) {
      best = v;
      state = 2 * d + best_reply[d];
    }
  }
  return GameState(state);
}

}  // namespace

TEST(BuildParams, AcceptsDefaults) {
  const auto g = build_params(8, 5, 2, 10, 5, true);
  EXPECT_EQ(g.t_d(), 8);
  EXPECT_EQ(g.s_a(), 5);
  EXPECT_TRUE(g.strict_mode());
  EXPECT_EQ(g, default_params());
}

TEST(BuildParams, RejectsOrderingInStrictMode) {
  EXPECT_EQ(code_of([] { build_params(1, 5, 2, 10, 5, true); }), ErrorCode::OrderingViolated);
}

TEST(BuildParams, RelaxedModeSkipsOrdering) {
  const auto g = build_params(1, 0.1, 2, 0.5, 0.4, false);
  EXPECT_FALSE(g.strict_mode());
}

TEST(BuildParams, RejectsNonPositive) {
  EXPECT_EQ(code_of([] { build_params(8, 5, 0, 10, 5); }), ErrorCode::NonPositiveParameter);
  EXPECT_EQ(code_of([] { build_params(8, 5, 2, -1, 5, false); }), ErrorCode::NonPositiveParameter);
  EXPECT_EQ(code_of([] { build_params(8, 5, 2, 10, std::nan(""), false); }),
            ErrorCode::NonPositiveParameter);
}

TEST(Payoffs, DeterministicDefaults) {
  const auto pv = deterministic_payoffs(default_params());
  expect_vec(pv.u_d, {0, -8, -2, -7}, 0);
  expect_vec(pv.u_a, {0, 10, 0, 5}, 0);
  EXPECT_EQ(pv.model, Model::deterministic);
}

TEST(Payoffs, DeterministicEdgeCases) {
  const auto tight = deterministic_payoffs(build_params(7.001, 5, 2, 10, 5));
  EXPECT_LT(tight.u_d[1], tight.u_d[3]);
  const auto even = deterministic_payoffs(build_params(8, 5, 2, 5, 5));
  EXPECT_EQ(even.u_a[3], 0.0);
}

TEST(Payoffs, ProbabilisticDefaults) {
  const auto pv = zdtest::probabilistic_defaults();
  expect_vec(pv.u_d, {-0.4, -7.8, -1.2, -7.4});
  expect_vec(pv.u_a, {0, 9, 0, 7});
  EXPECT_EQ(pv.model, Model::probabilistic);
}

TEST(Payoffs, PolicyViolations) {
  EXPECT_EQ(code_of([] { make_policy(0.5, 0.5); }), ErrorCode::PolicyViolated);
  EXPECT_EQ(code_of([] { make_policy(1.1, 0.5); }), ErrorCode::PolicyViolated);
  EXPECT_EQ(code_of([] { make_policy(0.5, -0.1); }), ErrorCode::PolicyViolated);
}

TEST(Payoffs, ProbabilisticAtFullAuditEqualsDeterministicExactly) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const bool strict = k % 2 == 0;
    const auto g = strict ? zdtest::random_strict_params(rng)
                          : build_params(zdtest::uniform(rng, 0.1, 9), zdtest::uniform(rng, 0.1, 9),
                                         zdtest::uniform(rng, 0.1, 9), zdtest::uniform(rng, 0.1, 9),
                                         zdtest::uniform(rng, 0.1, 9), false);
    const auto det = deterministic_payoffs(g);
    const auto prob = probabilistic_payoffs(g, make_policy(1.0, 0.0));
    for (int i = 0; i < 4; ++i) {
      ASSERT_EQ(det.u_d[i], prob.u_d[i]) << k;
      ASSERT_EQ(det.u_a[i], prob.u_a[i]) << k;
    }
  }
}

TEST(GameStateTest, IndexBijection) {
  for (int d = 0; d < 2; ++d) {
    for (int a = 0; a < 2; ++a) {
      const auto s = GameState::from_actions(d, a);
      EXPECT_EQ(s.index(), 2 * d + a);
      EXPECT_EQ(s.d(), d);
      EXPECT_EQ(s.a(), a);
    }
  }
  EXPECT_EQ(GameState(2).label(), "10");
}

TEST(Equilibrium, Defaults) {
  EXPECT_EQ(backward_induction_equilibrium(deterministic_payoffs(default_params())).state.label(), "11");
  EXPECT_EQ(backward_induction_equilibrium(zdtest::probabilistic_defaults()).state.label(), "11");
}

TEST(Equilibrium, AttackerQuitsWhenAuditIsCostly) {
  const auto g = build_params(8, 5, 2, 3, 5, false);
  const auto eq = backward_induction_equilibrium(probabilistic_payoffs(g, make_policy(1.0, 0.0)));
  EXPECT_EQ(eq.state.label(), "10");
  EXPECT_EQ(eq.attacker_response[0], 1);
  EXPECT_EQ(eq.attacker_response[1], 0);
}

TEST(Equilibrium, TiesFavourAttackAndSignal) {
  PayoffVectors flat;
  EXPECT_EQ(backward_induction_equilibrium(flat).state.label(), "11");
}

TEST(Equilibrium, MatchesEnumerationOnRandomDraws) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const auto g = build_params(zdtest::uniform(rng, 0.1, 10), zdtest::uniform(rng, 0.1, 10),
                                zdtest::uniform(rng, 0.1, 10), zdtest::uniform(rng, 0.1, 10),
                                zdtest::uniform(rng, 0.1, 10), false);
    const auto det = deterministic_payoffs(g);
    const auto prob = probabilistic_payoffs(g, zdtest::random_policy(rng));
    ASSERT_EQ(backward_induction_equilibrium(det).state, enumerate_equilibrium(det)) << k;
    ASSERT_EQ(backward_induction_equilibrium(prob).state, enumerate_equilibrium(prob)) << k;
  }
}

TEST(Equilibrium, StrictWithProfitableAttackIsAlways11) {
  std::mt19937_64 rng(99);
  int checked = 0;
  while (checked < 1000) {
    const auto g = zdtest::random_strict_params(rng);
    if (!(g.r_a() > g.s_a())) continue;
    ++checked;
    ASSERT_EQ(backward_induction_equilibrium(deterministic_payoffs(g)).state.label(), "11");
    ASSERT_EQ(backward_induction_equilibrium(probabilistic_payoffs(g, zdtest::random_policy(rng)))
                  .state.label(),
              "11");
  }
}
