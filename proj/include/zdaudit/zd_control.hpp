#pragma once

// Equalizer strategies: the defender pins the attacker's stationary utility
// by choosing p with (p1 - 1, p2 - 1, p3, p4) = alpha * U_A + gamma * 1.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "zdaudit/error.hpp"
#include "zdaudit/game.hpp"

namespace zdaudit {

struct EqualizerStrategy {
  /// Candidate strategy; entries may leave [0,1] unless clamped.
  Vec4 p{};
  double alpha = 0.0;
  double gamma = 0.0;
  double predicted_u_a = 0.0;
  bool feasible = false;
  /// 0-based indices of entries outside [0,1] before any clamping.
  std::vector<int> violations;
  /// Set by clamp_to_playable(); a clamped strategy no longer equalizes exactly.
  bool clamped = false;
};

namespace detail {

inline void require_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " must lie in [0,1], got " + std::to_string(x));
  }
}

/// Shared denominator p4 + 1 - p1 of every closed form below.
inline double control_denominator(double p1, double p4) {
  const double den = p4 + 1.0 - p1;
  if (den == 0.0) {
    throw Error(ErrorCode::DegenerateTarget, "p4 + 1 - p1 = 0 (target utility undefined)");
  }
  return den;
}

}  // namespace detail

inline EqualizerStrategy equalizer_strategy(double p1, double p4, const PayoffVectors& pv) {
  detail::require_unit(p1, "p1");
  detail::require_unit(p4, "p4");
  if (pv.u_a[0] != 0.0 || pv.u_a[2] != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "equalizer requires U_A[00] = U_A[10] = 0");
  }
  const double attack_payoff = pv.u_a[3];
  if (attack_payoff == 0.0) {
    throw Error(ErrorCode::ZeroAttackPayoff, "U_A[11] = 0, alpha is undefined");
  }
  const double den = detail::control_denominator(p1, p4);

  EqualizerStrategy eq;
  eq.gamma = p1 - 1.0;
  eq.alpha = den / attack_payoff;
  eq.p = {p1, 1.0 + eq.alpha * pv.u_a[1] + eq.gamma, eq.gamma, p4};
  eq.predicted_u_a = -eq.gamma / eq.alpha;
  for (int i = 0; i < 4; ++i) {
    if (!(eq.p[i] >= 0.0 && eq.p[i] <= 1.0)) eq.violations.push_back(i);
  }
  eq.feasible = eq.violations.empty();
  return eq;
}

/// Projection onto [0,1]^4 for play in simulations.
inline EqualizerStrategy clamp_to_playable(EqualizerStrategy eq) {
  if (eq.feasible) return eq;
  for (double& x : eq.p) x = std::clamp(x, 0.0, 1.0);
  eq.clamped = true;
  return eq;
}

/// (1 - p1) / (p4 + 1 - p1) * attack_payoff, attack_payoff being U_A[11].
inline double attacker_utility_formula(double p1, double p4, double attack_payoff) {
  return (1.0 - p1) / detail::control_denominator(p1, p4) * attack_payoff;
}

inline double attacker_utility_formula(double p1, double p4, const PayoffVectors& pv) {
  return attacker_utility_formula(p1, p4, pv.u_a[3]);
}

struct ControlGradients {
  double d_p1 = 0.0;
  double d_p4 = 0.0;
  /// Only defined for the probabilistic model.
  std::optional<double> d_tau;
};

inline ControlGradients control_gradients(double p1, double p4, const PayoffVectors& pv,
                                          const AuditGameParams& params) {
  const double den = detail::control_denominator(p1, p4);
  const double u11 = pv.u_a[3];
  ControlGradients g;
  g.d_p1 = -p4 / (den * den) * u11;
  g.d_p4 = (p1 - 1.0) / (den * den) * u11;
  if (pv.model == Model::probabilistic) g.d_tau = params.s_a() * (p1 - 1.0) / den;
  return g;
}

enum class ControlVariable { p1, p4, tau };

inline std::string to_string(ControlVariable v) {
  switch (v) {
    case ControlVariable::p1: return "p1";
    case ControlVariable::p4: return "p4";
    case ControlVariable::tau: return "tau";
  }
  return "?";
}

struct ControlRange {
  ControlVariable variable = ControlVariable::p1;
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

enum class Dominance { p1, p4, tie };

inline std::string to_string(Dominance d) {
  switch (d) {
    case Dominance::p1: return "p1";
    case Dominance::p4: return "p4";
    case Dominance::tie: return "tie";
  }
  return "?";
}

struct ControlAnalysis {
  ControlRange p1;
  ControlRange p4;
  std::optional<ControlRange> tau;
  Dominance dominant = Dominance::tie;
};

/// |du/dp4| > |du/dp1| exactly when 1 - p1 > p4.
inline Dominance dominant_variable(double p1, double p4, double tie_tolerance = 1e-12) {
  const double gap = (1.0 - p1) - p4;
  if (std::abs(gap) <= tie_tolerance) return Dominance::tie;
  return gap > 0.0 ? Dominance::p4 : Dominance::p1;
}

namespace detail {

inline ControlRange make_range(ControlVariable var, double a, double b) {
  return {var, std::min(a, b), std::max(a, b)};
}

}  // namespace detail

/// Ranges come from evaluating the utility formula at both ends of each
/// variable's sweep over [0,1] (the formula is monotone in each variable).
/// A degenerate endpoint p1 = 1, p4 = 0 contributes its one-sided limit.
inline ControlAnalysis control_range_and_dominance(double p1, double p4, const PayoffVectors& pv,
                                                   const AuditGameParams& params) {
  detail::require_unit(p1, "p1");
  detail::require_unit(p4, "p4");
  const double den = detail::control_denominator(p1, p4);
  const double u11 = pv.u_a[3];

  ControlAnalysis out;

  // p1 sweep: at p1 -> 1 with p4 = 0 the ratio (1 - p1) / (1 - p1) tends to 1.
  const double at_p1_zero = attacker_utility_formula(0.0, p4, u11);
  const double at_p1_one = (p4 == 0.0) ? u11 : attacker_utility_formula(1.0, p4, u11);
  out.p1 = detail::make_range(ControlVariable::p1, at_p1_zero, at_p1_one);

  // p4 sweep: at p4 -> 0 with p1 = 1 the value is identically 0.
  const double at_p4_zero = (p1 == 1.0) ? 0.0 : attacker_utility_formula(p1, 0.0, u11);
  const double at_p4_one = attacker_utility_formula(p1, 1.0, u11);
  out.p4 = detail::make_range(ControlVariable::p4, at_p4_zero, at_p4_one);

  if (pv.model == Model::probabilistic) {
    const double ratio = (1.0 - p1) / den;
    out.tau = detail::make_range(ControlVariable::tau, ratio * params.r_a(),
                                 ratio * (params.r_a() - params.s_a()));
  }
  out.dominant = dominant_variable(p1, p4);
  return out;
}

}  // namespace zdaudit
