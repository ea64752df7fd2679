#pragma once

#include <array>
#include <cmath>
#include <random>

#include "zdaudit/zdaudit.hpp"

namespace zdtest {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline zdaudit::DefenderStrategy random_defender(std::mt19937_64& rng, double lo = 0.05,
                                                 double hi = 0.95) {
  return {{uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)}};
}

inline zdaudit::AttackerStrategy random_attacker(std::mt19937_64& rng, double lo = 0.05,
                                                 double hi = 0.95) {
  return {{uniform(rng, lo, hi), uniform(rng, lo, hi)}};
}

inline zdaudit::Vec4 random_vec(std::mt19937_64& rng, double lo = -10.0, double hi = 10.0) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

/// Strict-mode parameters: t_d > t_m + c.
inline zdaudit::AuditGameParams random_strict_params(std::mt19937_64& rng) {
  const double t_m = uniform(rng, 0.1, 10.0);
  const double c = uniform(rng, 0.1, 10.0);
  const double t_d = t_m + c + uniform(rng, 0.01, 10.0);
  return zdaudit::build_params(t_d, t_m, c, uniform(rng, 0.1, 20.0), uniform(rng, 0.1, 20.0), true);
}

inline zdaudit::SignalPolicy random_policy(std::mt19937_64& rng) {
  const double delta = uniform(rng, 0.0, 0.9);
  return zdaudit::make_policy(uniform(rng, delta + 0.01, 1.0), delta);
}

/// The relaxed instance on which the difference maximizer is feasible.
inline zdaudit::PayoffVectors relaxed_payoffs() {
  const auto g = zdaudit::build_params(1.0, 0.1, 2.0, 0.5, 0.4, false);
  return zdaudit::probabilistic_payoffs(g, zdaudit::make_policy(1.0, 0.0));
}

inline zdaudit::PayoffVectors probabilistic_defaults() {
  return zdaudit::probabilistic_payoffs(zdaudit::default_params(), zdaudit::make_policy(0.6, 0.2));
}

/// v M = v, sum v = 1 by power iteration on the lazy chain (I + M) / 2.
inline zdaudit::Vec4 power_stationary(const zdaudit::MarkovMatrix& mm, int iters = 20000) {
  std::array<double, 4> v{0.25, 0.25, 0.25, 0.25};
  for (int it = 0; it < iters; ++it) {
    std::array<double, 4> next{};
    for (int j = 0; j < 4; ++j) {
      double s = 0.5 * v[j];
      for (int i = 0; i < 4; ++i) s += 0.5 * v[i] * mm.m(i, j);
      next[j] = s;
    }
    v = next;
  }
  return v;
}

}  // namespace zdtest
