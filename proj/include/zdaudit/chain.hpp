#pragma once

// Memory-one strategies, the round-to-round Markov chain they induce, and the
// determinant form of stationary payoffs.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "zdaudit/error.hpp"
#include "zdaudit/game.hpp"

namespace zdaudit {

/// p[i] = probability the defender plays 0 (no signal) after outcome state i.
struct DefenderStrategy {
  Vec4 p{};
  friend bool operator==(const DefenderStrategy&, const DefenderStrategy&) = default;
};

/// q[j] = probability the attacker plays 0 (quit) when the defender's current action is j.
struct AttackerStrategy {
  std::array<double, 2> q{};
  friend bool operator==(const AttackerStrategy&, const AttackerStrategy&) = default;
};

namespace detail {
inline bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }
}  // namespace detail

inline DefenderStrategy make_defender(const Vec4& p) {
  for (double x : p) {
    if (!detail::is_probability(x)) {
      throw Error(ErrorCode::InvalidStrategy, "defender entry outside [0,1]: " + std::to_string(x));
    }
  }
  return {p};
}

inline AttackerStrategy make_attacker(const std::array<double, 2>& q) {
  for (double x : q) {
    if (!detail::is_probability(x)) {
      throw Error(ErrorCode::InvalidStrategy, "attacker entry outside [0,1]: " + std::to_string(x));
    }
  }
  return {q};
}

/// Row-stochastic; rows index the previous state, columns the next one.
struct MarkovMatrix {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
};

inline MarkovMatrix build_transition(const DefenderStrategy& s, const AttackerStrategy& t) {
  const double q1 = t.q[0];
  const double q2 = t.q[1];
  MarkovMatrix out;
  for (int i = 0; i < 4; ++i) {
    const double pi = s.p[i];
    out.m(i, 0) = pi * q1;
    out.m(i, 1) = pi * (1.0 - q1);
    out.m(i, 2) = (1.0 - pi) * q2;
    out.m(i, 3) = (1.0 - pi) * (1.0 - q2);
  }
  return out;
}

enum class StationaryMethod { determinant, eigen };

struct StationaryOutcome {
  Vec4 v{};
  double u_d = std::numeric_limits<double>::quiet_NaN();
  double u_a = std::numeric_limits<double>::quiet_NaN();
  bool ergodic = false;
  StationaryMethod method = StationaryMethod::eigen;
  /// |ratio - eigen| of the utilities when both routes were available.
  std::optional<double> cross_check_gap;
};

inline constexpr double kErgodicTolerance = 1e-10;

/// Solves v^T M = v^T with sum(v) = 1. Throws NonErgodic when the stationary
/// distribution is not unique, i.e. M^T - I has nullity >= 2 at tolerance tol.
inline StationaryOutcome stationary_vector(const MarkovMatrix& mm, double tol = kErgodicTolerance) {
  const Eigen::Matrix4d a = mm.m.transpose() - Eigen::Matrix4d::Identity();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
  lu.setThreshold(tol);
  if (lu.rank() < 3) {
    throw Error(ErrorCode::NonErgodic, "stationary distribution is not unique (rank " +
                                           std::to_string(lu.rank()) + " of M^T - I)");
  }
  Eigen::Matrix<double, 5, 4> sys;
  sys.topRows<4>() = a;
  sys.row(4).setOnes();
  Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Zero();
  rhs(4) = 1.0;
  Eigen::Vector4d v = sys.colPivHouseholderQr().solve(rhs);
  v = v.cwiseMax(0.0);
  v /= v.sum();

  StationaryOutcome out;
  for (int i = 0; i < 4; ++i) out.v[i] = v(i);
  out.ergodic = true;
  out.method = StationaryMethod::eigen;
  return out;
}

namespace detail {

inline double det3(double a, double b, double c, double d, double e, double f, double g, double h,
                   double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

/// Cofactor expansion along the last column; rows given as r[i][j].
inline double det4(const std::array<Vec4, 4>& r) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    std::array<int, 3> keep{};
    for (int k = 0, n = 0; k < 4; ++k) {
      if (k != i) keep[n++] = k;
    }
    const auto& x = r[keep[0]];
    const auto& y = r[keep[1]];
    const auto& z = r[keep[2]];
    const double minor = det3(x[0], x[1], x[2], y[0], y[1], y[2], z[0], z[1], z[2]);
    const double sign = ((i + 3) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * r[i][3] * minor;
  }
  return acc;
}

}  // namespace detail

/// D(p, q, f): determinant of M - I after adding its first column into the
/// second and third and replacing the fourth with f. Proportional to v . f;
/// only ratios D(f) / D(1) carry meaning.
inline double zd_determinant(const DefenderStrategy& s, const AttackerStrategy& t, const Vec4& f) {
  const double q1 = t.q[0];
  const double q2 = t.q[1];
  std::array<Vec4, 4> rows{};
  for (int i = 0; i < 4; ++i) {
    const double pi = s.p[i];
    const double self_00 = (i == 0) ? 1.0 : 0.0;
    const double self_10 = (i == 2) ? 1.0 : 0.0;
    const double hat = (i < 2) ? pi - 1.0 : pi;
    rows[i] = {pi * q1 - self_00, hat, (1.0 - pi) * q2 + pi * q1 - self_00 - self_10, f[i]};
  }
  return detail::det4(rows);
}

inline constexpr Vec4 kOnes{1.0, 1.0, 1.0, 1.0};

inline double dot(const Vec4& x, const Vec4& y) {
  return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}

/// Stationary per-round utilities. Uses D(U)/D(1) when |D(1)| > tol and
/// records the gap to the eigen route; otherwise falls back to the eigen
/// solve, which throws NonErgodic if the stationary vector is not unique.
inline StationaryOutcome stationary_utilities(const DefenderStrategy& s, const AttackerStrategy& t,
                                              const PayoffVectors& pv,
                                              double tol = kErgodicTolerance) {
  const double d1 = zd_determinant(s, t, kOnes);
  if (std::abs(d1) > tol) {
    StationaryOutcome out;
    out.u_a = zd_determinant(s, t, pv.u_a) / d1;
    out.u_d = zd_determinant(s, t, pv.u_d) / d1;
    out.ergodic = true;
    out.method = StationaryMethod::determinant;
    try {
      const auto eig = stationary_vector(build_transition(s, t), tol);
      out.v = eig.v;
      out.cross_check_gap = std::max(std::abs(out.u_a - dot(eig.v, pv.u_a)),
                                     std::abs(out.u_d - dot(eig.v, pv.u_d)));
    } catch (const Error&) {
      // no eigen cross-check; the ratio stands
    }
    return out;
  }
  StationaryOutcome out = stationary_vector(build_transition(s, t), tol);
  out.u_a = dot(out.v, pv.u_a);
  out.u_d = dot(out.v, pv.u_d);
  return out;
}

}  // namespace zdaudit
