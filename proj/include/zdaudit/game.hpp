#pragma once

// One-round audit game: parameters, payoff vectors of the deterministic and
// probabilistic models, and the sequential (defender first) equilibrium.

#include <array>
#include <cstdint>
#include <string>

#include "zdaudit/error.hpp"

namespace zdaudit {

using Vec4 = std::array<double, 4>;

/// Loss/gain scalars of the audit game. Construct through build_params().
class AuditGameParams {
 public:
  double t_d() const noexcept { return t_d_; }  ///< loss of an attack that is not audited
  double t_m() const noexcept { return t_m_; }  ///< loss of an attack audited in time
  double c() const noexcept { return c_; }      ///< audit cost
  double r_a() const noexcept { return r_a_; }  ///< attacker gain from a successful attack
  double s_a() const noexcept { return s_a_; }  ///< attacker loss when audited
  bool strict_mode() const noexcept { return strict_; }

  friend bool operator==(const AuditGameParams&, const AuditGameParams&) = default;

 private:
  AuditGameParams(double t_d, double t_m, double c, double r_a, double s_a, bool strict)
      : t_d_(t_d), t_m_(t_m), c_(c), r_a_(r_a), s_a_(s_a), strict_(strict) {}

  friend AuditGameParams build_params(double, double, double, double, double, bool);

  double t_d_, t_m_, c_, r_a_, s_a_;
  bool strict_;
};

/// Validates the five scalars. strict_mode additionally requires t_d > t_m + c.
inline AuditGameParams build_params(double t_d, double t_m, double c, double r_a, double s_a,
                                    bool strict_mode = true) {
  const std::array<std::pair<const char*, double>, 5> named{
      {{"t_d", t_d}, {"t_m", t_m}, {"c", c}, {"r_a", r_a}, {"s_a", s_a}}};
  for (const auto& [name, value] : named) {
    if (!(value > 0.0)) {
      throw Error(ErrorCode::NonPositiveParameter,
                  std::string(name) + " must be > 0, got " + std::to_string(value));
    }
  }
  if (strict_mode && !(t_d > t_m + c)) {
    throw Error(ErrorCode::OrderingViolated, "strict mode requires t_d > t_m + c");
  }
  return AuditGameParams(t_d, t_m, c, r_a, s_a, strict_mode);
}

/// t_d = 8, t_m = 5, c = 2, r_a = 10, s_a = 5.
inline AuditGameParams default_params() { return build_params(8.0, 5.0, 2.0, 10.0, 5.0, true); }

/// Audit probability with a signal (tau) and without one (delta).
class SignalPolicy {
 public:
  double tau() const noexcept { return tau_; }
  double delta() const noexcept { return delta_; }

  friend bool operator==(const SignalPolicy&, const SignalPolicy&) = default;

 private:
  SignalPolicy(double tau, double delta) : tau_(tau), delta_(delta) {}
  friend SignalPolicy make_policy(double, double);

  double tau_, delta_;
};

/// Requires 0 <= delta < tau <= 1.
inline SignalPolicy make_policy(double tau, double delta) {
  if (!(delta >= 0.0 && tau <= 1.0 && delta < tau)) {
    throw Error(ErrorCode::PolicyViolated, "policy requires 0 <= delta < tau <= 1 (tau=" +
                                               std::to_string(tau) +
                                               ", delta=" + std::to_string(delta) + ")");
  }
  return SignalPolicy(tau, delta);
}

/// Round outcome da. d = 1 means signal (and audit stance), a = 1 means attack.
class GameState {
 public:
  constexpr GameState() = default;
  constexpr explicit GameState(int index) : index_(static_cast<std::uint8_t>(index & 3)) {}

  static constexpr GameState from_actions(int d, int a) { return GameState(2 * d + a); }

  constexpr int index() const noexcept { return index_; }
  constexpr int d() const noexcept { return index_ >> 1; }
  constexpr int a() const noexcept { return index_ & 1; }

  std::string label() const { return {static_cast<char>('0' + d()), static_cast<char>('0' + a())}; }

  friend constexpr bool operator==(GameState, GameState) = default;

 private:
  std::uint8_t index_ = 0;
};

enum class Model { deterministic, probabilistic };

inline std::string to_string(Model m) {
  return m == Model::deterministic ? "deterministic" : "probabilistic";
}

/// Per-state payoffs in the order 00, 01, 10, 11.
struct PayoffVectors {
  Vec4 u_d{};
  Vec4 u_a{};
  Model model = Model::deterministic;
};

inline PayoffVectors deterministic_payoffs(const AuditGameParams& g) {
  return {
      .u_d = {0.0, -g.t_d(), -g.c(), -g.c() - g.t_m()},
      .u_a = {0.0, g.r_a(), 0.0, g.r_a() - g.s_a()},
      .model = Model::deterministic,
  };
}

inline PayoffVectors probabilistic_payoffs(const AuditGameParams& g, const SignalPolicy& policy) {
  const double tau = policy.tau();
  const double delta = policy.delta();
  if (!(delta < tau)) throw Error(ErrorCode::PolicyViolated, "tau must exceed delta");
  return {
      .u_d = {0.0 - delta * g.c(),
              0.0 - delta * g.c() - (delta * g.t_m() + (1.0 - delta) * g.t_d()),
              0.0 - tau * g.c(),
              0.0 - tau * g.c() - (tau * g.t_m() + (1.0 - tau) * g.t_d())},
      .u_a = {0.0, g.r_a() - delta * g.s_a(), 0.0, g.r_a() - tau * g.s_a()},
      .model = Model::probabilistic,
  };
}

struct Equilibrium {
  GameState state;
  /// attacker_response[d] is the attacker's best action after defender action d.
  std::array<int, 2> attacker_response{};
};

/// Backward induction over the one-round game tree. An indifferent attacker
/// attacks; an indifferent defender signals.
inline Equilibrium backward_induction_equilibrium(const PayoffVectors& pv) {
  Equilibrium eq;
  for (int d = 0; d < 2; ++d) {
    const double quit = pv.u_a[GameState::from_actions(d, 0).index()];
    const double attack = pv.u_a[GameState::from_actions(d, 1).index()];
    eq.attacker_response[d] = attack >= quit ? 1 : 0;
  }
  const double no_signal = pv.u_d[GameState::from_actions(0, eq.attacker_response[0]).index()];
  const double signal = pv.u_d[GameState::from_actions(1, eq.attacker_response[1]).index()];
  const int d = signal >= no_signal ? 1 : 0;
  eq.state = GameState::from_actions(d, eq.attacker_response[d]);
  return eq;
}

}  // namespace zdaudit
