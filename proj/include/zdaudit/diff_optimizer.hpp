#pragma once

// Maximizing u_d - u_a with ZD strategies p_hat = phi * (U_D - U_A + gamma * 1),
// which enforce u_d - u_a = -gamma. Closed-form gamma bounds per sign of phi,
// strategy recovery, and a brute-force grid oracle that checks which strategies
// actually enforce a q-independent difference.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "zdaudit/chain.hpp"
#include "zdaudit/error.hpp"
#include "zdaudit/game.hpp"

namespace zdaudit {

struct DiffBounds {
  double phi = 0.0;
  /// Per-state terms; gamma_min = max(lower_terms), gamma_max = min(upper_terms).
  Vec4 lower_terms{};
  Vec4 upper_terms{};
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  bool feasible = false;
  /// States whose terms attain gamma_min and gamma_max.
  int binding_lower = 0;
  int binding_upper = 0;
};

/// Playability 0 <= p_i <= 1 under p_i = [i < 2] + phi * (U_D[i] - U_A[i] + gamma)
/// turns into one lower and one upper bound on gamma per state. With
/// w = U_A - U_D: for phi > 0 the lower terms are w - 1/phi (states 00, 01)
/// and w (10, 11), the upper terms w (00, 01) and w + 1/phi (10, 11); phi < 0
/// swaps the roles.
inline DiffBounds gamma_bounds(const PayoffVectors& pv, double phi) {
  if (phi == 0.0 || !std::isfinite(phi)) throw Error(ErrorCode::ZeroPhi, "phi must be nonzero");
  DiffBounds b;
  b.phi = phi;
  const double inv = 1.0 / phi;
  for (int i = 0; i < 4; ++i) {
    const double w = pv.u_a[i] - pv.u_d[i];
    const bool keeps_one = i < 2;
    if (phi > 0.0) {
      b.lower_terms[i] = keeps_one ? w - inv : w;
      b.upper_terms[i] = keeps_one ? w : w + inv;
    } else {
      b.lower_terms[i] = keeps_one ? w : w + inv;
      b.upper_terms[i] = keeps_one ? w - inv : w;
    }
  }
  const auto lo = std::max_element(b.lower_terms.begin(), b.lower_terms.end());
  const auto hi = std::min_element(b.upper_terms.begin(), b.upper_terms.end());
  b.gamma_min = *lo;
  b.gamma_max = *hi;
  b.binding_lower = static_cast<int>(lo - b.lower_terms.begin());
  b.binding_upper = static_cast<int>(hi - b.upper_terms.begin());
  b.feasible = b.gamma_min <= b.gamma_max;
  return b;
}

/// p_i = phi * (U_D[i] - U_A[i] + gamma) + [i in {00, 01}]. Unclamped.
inline Vec4 recover_strategy(const PayoffVectors& pv, double phi, double gamma) {
  Vec4 p{};
  for (int i = 0; i < 4; ++i) {
    p[i] = phi * (pv.u_d[i] - pv.u_a[i] + gamma) + (i < 2 ? 1.0 : 0.0);
  }
  return p;
}

struct DiffMaxSolution {
  double phi = 0.0;
  double gamma = 0.0;
  Vec4 p{};
  /// Enforced u_d - u_a = -gamma.
  double value = 0.0;
  bool feasible = false;
  DiffBounds bounds;
};

struct DiffMaxReport {
  /// Best feasible solution, or the closed-form gamma_min solution with the
  /// largest value when no phi is feasible (then best.feasible is false).
  DiffMaxSolution best;
  bool any_feasible = false;
  std::vector<DiffBounds> per_phi;
};

namespace detail {

inline bool in_unit_box(const Vec4& p, double slack = 1e-12) {
  return std::all_of(p.begin(), p.end(), [&](double x) { return x >= -slack && x <= 1.0 + slack; });
}

inline DiffMaxSolution solution_at(const PayoffVectors& pv, const DiffBounds& b) {
  DiffMaxSolution s;
  s.phi = b.phi;
  s.gamma = b.gamma_min;
  s.p = recover_strategy(pv, b.phi, b.gamma_min);
  s.value = -b.gamma_min;
  s.feasible = b.feasible && in_unit_box(s.p);
  if (s.feasible) {
    for (double& x : s.p) x = std::clamp(x, 0.0, 1.0);  // round-off only
  }
  s.bounds = b;
  return s;
}

}  // namespace detail

inline DiffMaxReport solve_diff_max(const PayoffVectors& pv, std::span<const double> phi_grid) {
  if (phi_grid.empty()) throw Error(ErrorCode::EmptyGrid, "phi grid is empty");
  DiffMaxReport report;
  std::optional<DiffMaxSolution> best_feasible;
  std::optional<DiffMaxSolution> best_any;
  for (double phi : phi_grid) {
    const DiffBounds b = gamma_bounds(pv, phi);
    report.per_phi.push_back(b);
    const DiffMaxSolution s = detail::solution_at(pv, b);
    if (s.feasible && (!best_feasible || s.value > best_feasible->value)) best_feasible = s;
    if (!best_any || s.value > best_any->value) best_any = s;
  }
  report.any_feasible = best_feasible.has_value();
  report.best = report.any_feasible ? *best_feasible : *best_any;
  return report;
}

/// 60 log-spaced magnitudes in [0.01, 10] for each sign, negatives first.
inline std::vector<double> default_phi_grid() {
  constexpr int n = 60;
  std::vector<double> mags;
  for (int k = 0; k < n; ++k) {
    mags.push_back(std::pow(10.0, -2.0 + 3.0 * k / (n - 1)));
  }
  std::vector<double> grid;
  for (auto it = mags.rbegin(); it != mags.rend(); ++it) grid.push_back(-*it);
  for (double m : mags) grid.push_back(m);
  return grid;
}

struct OracleCell {
  Vec4 p{};
  /// Mean of u_d - u_a over the ergodic q cells.
  double value = 0.0;
  /// max - min of u_d - u_a over the ergodic q cells.
  double spread = 0.0;
  int ergodic_q = 0;
};

struct OracleReport {
  std::vector<OracleCell> enforcing;
  std::size_t cells_scanned = 0;
  /// Cells with fewer than two ergodic q cells.
  std::size_t degenerate_cells = 0;
  std::optional<OracleCell> best;
  double tolerance = 0.0;
};

namespace detail {

inline std::vector<double> unit_grid(double step) {
  std::vector<double> g;
  const auto n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int k = 0; k <= n; ++k) g.push_back(std::min(1.0, k * step));
  if (g.back() < 1.0) g.push_back(1.0);
  return g;
}

}  // namespace detail

/// Scans p over a grid of [0,1]^4 and, for each p, evaluates the stationary
/// u_d - u_a over a grid of q (skipping non-ergodic chains). Cells whose
/// spread stays within tolerance enforce a q-independent difference. Runs on
/// `threads` workers (0 = hardware concurrency); the result does not depend
/// on the thread count.
inline OracleReport brute_force_diff_oracle(const PayoffVectors& pv, double p_step, double q_step,
                                            double tolerance = 1e-6, unsigned threads = 0) {
  for (double step : {p_step, q_step}) {
    if (!(step > 0.0 && step <= 0.5)) {
      throw Error(ErrorCode::InvalidArgument, "grid steps must lie in (0, 0.5]");
    }
  }
  const std::vector<double> pg = detail::unit_grid(p_step);
  const std::vector<double> qg = detail::unit_grid(q_step);
  Vec4 diff{};
  for (int i = 0; i < 4; ++i) diff[i] = pv.u_d[i] - pv.u_a[i];

  const std::size_t n = pg.size();
  const std::size_t total = n * n * n * n;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  struct Partial {
    std::vector<OracleCell> enforcing;
    std::size_t degenerate = 0;
  };
  std::vector<Partial> partials(threads);

  auto work = [&](unsigned worker) {
    Partial& out = partials[worker];
    for (std::size_t i0 = worker; i0 < n; i0 += threads) {
      for (std::size_t i1 = 0; i1 < n; ++i1) {
        for (std::size_t i2 = 0; i2 < n; ++i2) {
          for (std::size_t i3 = 0; i3 < n; ++i3) {
            const DefenderStrategy s{{pg[i0], pg[i1], pg[i2], pg[i3]}};
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            double sum = 0.0;
            int count = 0;
            for (double q1 : qg) {
              for (double q2 : qg) {
                const AttackerStrategy t{{q1, q2}};
                const double d1 = zd_determinant(s, t, kOnes);
                if (std::abs(d1) <= kErgodicTolerance) continue;
                const double value = zd_determinant(s, t, diff) / d1;
                lo = std::min(lo, value);
                hi = std::max(hi, value);
                sum += value;
                ++count;
              }
            }
            if (count < 2) {
              ++out.degenerate;
              continue;
            }
            if (hi - lo <= tolerance) {
              out.enforcing.push_back({s.p, sum / count, hi - lo, count});
            }
          }
        }
      }
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  OracleReport report;
  report.cells_scanned = total;
  report.tolerance = tolerance;
  for (auto& part : partials) {
    report.degenerate_cells += part.degenerate;
    report.enforcing.insert(report.enforcing.end(), part.enforcing.begin(), part.enforcing.end());
  }
  std::sort(report.enforcing.begin(), report.enforcing.end(),
            [](const OracleCell& a, const OracleCell& b) { return a.p < b.p; });
  for (const auto& cell : report.enforcing) {
    if (!report.best || cell.value > report.best->value) report.best = cell;
  }
  return report;
}

}  // namespace zdaudit
