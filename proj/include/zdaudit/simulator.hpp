#pragma once

// Round-by-round iterated play with seeded randomness, the classic baseline
// strategies, and ROC/AUC over the defender's per-round signal probability.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "zdaudit/chain.hpp"
#include "zdaudit/diff_optimizer.hpp"
#include "zdaudit/error.hpp"
#include "zdaudit/game.hpp"
#include "zdaudit/zd_control.hpp"

namespace zdaudit {

enum class Role { defender, attacker };

enum class StrategyKind { mixed, zd_equalizer, zd_diff_max, all0, all1, rand, tft, wsls };

inline std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::mixed: return "Mixed";
    case StrategyKind::zd_equalizer: return "ZD";
    case StrategyKind::zd_diff_max: return "ZDdiff";
    case StrategyKind::all0: return "ALL0";
    case StrategyKind::all1: return "ALL1";
    case StrategyKind::rand: return "Rand";
    case StrategyKind::tft: return "TFT";
    case StrategyKind::wsls: return "WSLS";
  }
  return "?";
}

struct StrategySpec {
  Role role = Role::defender;
  StrategyKind kind = StrategyKind::all1;
  /// Mixed: p (defender, 4 entries) or q (attacker, 2 entries), probabilities of action 0.
  std::vector<double> probs;
  double p1 = 0.0;
  double p4 = 0.0;
  bool clamp = true;
  double phi = -1.0;
  /// Set when a ZD spec resolved to a projected (inexact) strategy.
  bool clamped = false;
  /// Display name; ZD specs keep theirs after resolution.
  std::string label;

  static StrategySpec defender_mixed(const Vec4& p, std::string label = "Mixed") {
    make_defender(p);
    return {Role::defender, StrategyKind::mixed, {p.begin(), p.end()}, 0, 0, true, -1, false,
            std::move(label)};
  }
  static StrategySpec attacker_mixed(const std::array<double, 2>& q, std::string label = "Mixed") {
    make_attacker(q);
    return {Role::attacker, StrategyKind::mixed, {q.begin(), q.end()}, 0, 0, true, -1, false,
            std::move(label)};
  }
  static StrategySpec zd_equalizer(double p1, double p4, bool clamp = true) {
    return {Role::defender, StrategyKind::zd_equalizer, {}, p1, p4, clamp, -1, false, "ZD"};
  }
  static StrategySpec zd_diff_max(double phi) {
    return {Role::defender, StrategyKind::zd_diff_max, {}, 0, 0, true, phi, false, "ZD"};
  }
  static StrategySpec classic(StrategyKind kind, Role role) {
    if (kind == StrategyKind::mixed || kind == StrategyKind::zd_equalizer ||
        kind == StrategyKind::zd_diff_max) {
      throw Error(ErrorCode::InvalidStrategy, "not a classic strategy: " + to_string(kind));
    }
    return {role, kind, {}, 0, 0, true, -1, false, to_string(kind)};
  }

  std::string name() const { return label.empty() ? to_string(kind) : label; }
};

struct ResolvedStrategy {
  StrategySpec spec;
  std::vector<std::string> warnings;
};

/// Turns ZD specs into concrete mixed strategies. Infeasible candidates are
/// projected onto [0,1]^4 (flagged) when clamping is allowed.
inline ResolvedStrategy resolve_strategy(const StrategySpec& spec, const PayoffVectors& pv) {
  ResolvedStrategy out{spec, {}};
  if (spec.kind == StrategyKind::zd_equalizer) {
    EqualizerStrategy eq = equalizer_strategy(spec.p1, spec.p4, pv);
    if (!eq.feasible) {
      if (!spec.clamp) {
        throw Error(ErrorCode::InvalidStrategy, "equalizer candidate outside [0,1]^4");
      }
      eq = clamp_to_playable(eq);
      out.warnings.push_back("clamped equalizer (p1=" + std::to_string(spec.p1) +
                             ", p4=" + std::to_string(spec.p4) + "); predicted u_a " +
                             std::to_string(eq.predicted_u_a) + " is not enforced");
    }
    out.spec = StrategySpec::defender_mixed(eq.p, spec.name());
    out.spec.clamped = eq.clamped;
  } else if (spec.kind == StrategyKind::zd_diff_max) {
    const double grid[] = {spec.phi};
    const DiffMaxReport rep = solve_diff_max(pv, grid);
    Vec4 p = rep.best.p;
    bool clamped = false;
    if (!rep.best.feasible) {
      for (double& x : p) x = std::clamp(x, 0.0, 1.0);
      clamped = true;
      out.warnings.push_back("infeasible difference maximizer (phi=" + std::to_string(spec.phi) +
                             ", gamma_min=" + std::to_string(rep.best.gamma) +
                             " > gamma_max=" + std::to_string(rep.best.bounds.gamma_max) +
                             "); strategy clamped");
    }
    out.spec = StrategySpec::defender_mixed(p, spec.name());
    out.spec.clamped = clamped;
  }
  return out;
}

/// Behaviour of a resolved strategy: the probability of playing action 1
/// (signal / attack) given the previous state and, for the attacker, the
/// defender's current action.
struct BehaviorRule {
  Role role = Role::defender;
  StrategyKind kind = StrategyKind::all1;
  std::vector<double> probs;
  /// WSLS: the player's own state payoffs and the win threshold (strictly above wins).
  Vec4 own_payoffs{};
  double wsls_threshold = 0.0;

  double prob_one(GameState previous, int current_d = 0) const {
    const bool defender = role == Role::defender;
    switch (kind) {
      case StrategyKind::mixed:
        return defender ? 1.0 - probs[previous.index()] : 1.0 - probs[current_d];
      case StrategyKind::all0: return 0.0;
      case StrategyKind::all1: return 1.0;
      case StrategyKind::rand: return 0.5;
      case StrategyKind::tft:
        // the defender copies the attacker's last move; the attacker copies the current signal
        return defender ? previous.a() : current_d;
      case StrategyKind::wsls: {
        const int own_prev = defender ? previous.d() : previous.a();
        return own_payoffs[previous.index()] > wsls_threshold ? own_prev : 1 - own_prev;
      }
      default: break;
    }
    throw Error(ErrorCode::InvalidStrategy, "unresolved ZD strategy in play");
  }
};

/// Mean of the player's own four state payoffs.
inline double default_wsls_threshold(Role role, const PayoffVectors& pv) {
  const Vec4& u = role == Role::defender ? pv.u_d : pv.u_a;
  return (u[0] + u[1] + u[2] + u[3]) / 4.0;
}

/// Rule object for ALL0, ALL1, Rand, TFT or WSLS.
inline BehaviorRule classic_strategies(StrategyKind kind, Role role, const PayoffVectors& pv,
                                       std::optional<double> wsls_threshold = std::nullopt) {
  StrategySpec::classic(kind, role);  // validates the kind
  return {role, kind, {}, role == Role::defender ? pv.u_d : pv.u_a,
          wsls_threshold.value_or(default_wsls_threshold(role, pv))};
}

struct RoundRecord {
  int round = 0;
  GameState previous;
  int d = 0;
  /// Defender's probability of signalling this round.
  double signal_prob = 0.0;
  int a = 0;
  double pay_d = 0.0;
  double pay_a = 0.0;
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct PlayOptions {
  GameState initial_state{0};
  std::optional<double> wsls_threshold_defender;
  std::optional<double> wsls_threshold_attacker;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

struct TournamentResult {
  std::string defender;
  std::string attacker;
  int rounds = 0;
  int repetitions = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<RoundRecord>> records;
  std::vector<double> mean_u_d_per_round;
  std::vector<double> mean_u_a_per_round;
  double mean_u_d = 0.0;
  double mean_u_a = 0.0;
  std::vector<std::string> warnings;
  friend bool operator==(const TournamentResult&, const TournamentResult&) = default;
};

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

/// Uniform in [0,1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace detail {

inline BehaviorRule rule_for(const StrategySpec& spec, const PayoffVectors& pv,
                             std::optional<double> wsls_threshold) {
  if (spec.kind == StrategyKind::zd_equalizer || spec.kind == StrategyKind::zd_diff_max) {
    throw Error(ErrorCode::InvalidStrategy, "ZD spec must be resolved before play");
  }
  if (spec.kind == StrategyKind::mixed) {
    const std::size_t want = spec.role == Role::defender ? 4 : 2;
    if (spec.probs.size() != want) {
      throw Error(ErrorCode::InvalidStrategy, "mixed strategy has wrong length");
    }
    return {spec.role, spec.kind, spec.probs, {}, 0.0};
  }
  return classic_strategies(spec.kind, spec.role, pv, wsls_threshold);
}

inline std::vector<RoundRecord> play_one(const BehaviorRule& def, const BehaviorRule& att,
                                         const PayoffVectors& pv, int rounds, GameState start,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RoundRecord> out;
  out.reserve(static_cast<std::size_t>(rounds));
  GameState prev = start;
  for (int r = 0; r < rounds; ++r) {
    RoundRecord rec;
    rec.round = r;
    rec.previous = prev;
    rec.signal_prob = def.prob_one(prev);
    rec.d = unit_uniform(rng) < rec.signal_prob ? 1 : 0;
    const double attack_prob = att.prob_one(prev, rec.d);
    rec.a = unit_uniform(rng) < attack_prob ? 1 : 0;
    const GameState now = GameState::from_actions(rec.d, rec.a);
    rec.pay_d = pv.u_d[now.index()];
    rec.pay_a = pv.u_a[now.index()];
    out.push_back(rec);
    prev = now;
  }
  return out;
}

}  // namespace detail

/// Plays `repetitions` independent games of `rounds` rounds. Repetition k
/// draws from stream_seed(seed, k); the result is identical for any thread count.
inline TournamentResult play_iterated(const StrategySpec& defender, const StrategySpec& attacker,
                                      const PayoffVectors& pv, int rounds, int repetitions,
                                      std::uint64_t seed, const PlayOptions& options = {}) {
  if (rounds < 1 || repetitions < 1) {
    throw Error(ErrorCode::InvalidArgument, "rounds and repetitions must be >= 1");
  }
  if (defender.role != Role::defender || attacker.role != Role::attacker) {
    throw Error(ErrorCode::InvalidStrategy, "strategy roles are swapped");
  }
  const BehaviorRule def = detail::rule_for(defender, pv, options.wsls_threshold_defender);
  const BehaviorRule att = detail::rule_for(attacker, pv, options.wsls_threshold_attacker);

  TournamentResult res;
  res.defender = defender.name();
  res.attacker = attacker.name();
  res.rounds = rounds;
  res.repetitions = repetitions;
  res.seed = seed;
  res.records.resize(static_cast<std::size_t>(repetitions));
  if (defender.clamped) {
    res.warnings.push_back("defender " + defender.name() + " is a clamped projection");
  }

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(repetitions));
  auto work = [&](unsigned worker) {
    for (int k = static_cast<int>(worker); k < repetitions; k += static_cast<int>(threads)) {
      res.records[k] = detail::play_one(def, att, pv, rounds, options.initial_state,
                                        stream_seed(seed, static_cast<std::uint64_t>(k)));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  res.mean_u_d_per_round.assign(static_cast<std::size_t>(rounds), 0.0);
  res.mean_u_a_per_round.assign(static_cast<std::size_t>(rounds), 0.0);
  for (const auto& rep : res.records) {
    for (int r = 0; r < rounds; ++r) {
      res.mean_u_d_per_round[r] += rep[r].pay_d;
      res.mean_u_a_per_round[r] += rep[r].pay_a;
    }
  }
  double sum_d = 0.0;
  double sum_a = 0.0;
  for (int r = 0; r < rounds; ++r) {
    sum_d += res.mean_u_d_per_round[r];
    sum_a += res.mean_u_a_per_round[r];
    res.mean_u_d_per_round[r] /= repetitions;
    res.mean_u_a_per_round[r] /= repetitions;
  }
  const double n = static_cast<double>(rounds) * repetitions;
  res.mean_u_d = sum_d / n;
  res.mean_u_a = sum_a / n;
  return res;
}

// ---------------------------------------------------------------------------
// ROC

/// Confusion labels. `paper` counts signal-without-attack as FP,
/// no-signal-with-attack as TN and no-signal-without-attack as FN;
/// `standard` is the usual detection labelling with attack as the positive class.
enum class RocLabels { paper, standard };

struct RocSample {
  double signal_prob = 0.0;
  bool attack = false;
};

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  /// Ascending threshold.
  std::vector<RocPoint> points;
  double auc = 0.0;
  /// Thresholds dropped because TP+FN or FP+TN was zero.
  std::vector<double> skipped_thresholds;
};

inline std::vector<RocSample> roc_samples(const TournamentResult& result) {
  std::vector<RocSample> out;
  for (const auto& rep : result.records) {
    for (const auto& rec : rep) out.push_back({rec.signal_prob, rec.a == 1});
  }
  return out;
}

/// Distinct signal probabilities plus one threshold above all of them.
inline std::vector<double> default_thresholds(std::span<const RocSample> samples) {
  std::set<double> uniq;
  for (const auto& s : samples) uniq.insert(s.signal_prob);
  std::vector<double> out(uniq.begin(), uniq.end());
  out.push_back(out.empty() ? 1.0 : out.back() + 1.0);
  return out;
}

/// Sweeps theta: the defender "predicts" a signal when signal_prob >= theta.
/// The AUC integrates the points sorted by FPR with (0,0) and (1,1) added.
inline RocCurve roc_curve(std::span<const RocSample> samples, std::span<const double> thresholds,
                          RocLabels labels = RocLabels::paper) {
  std::vector<double> th(thresholds.begin(), thresholds.end());
  std::sort(th.begin(), th.end());
  RocCurve curve;
  for (double theta : th) {
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& s : samples) {
      const bool signal = s.signal_prob >= theta;
      if (signal && s.attack) ++tp;
      else if (signal) ++fp;
      else if (s.attack) (labels == RocLabels::paper ? tn : fn) += 1;
      else (labels == RocLabels::paper ? fn : tn) += 1;
    }
    if (tp + fn == 0 || fp + tn == 0) {
      curve.skipped_thresholds.push_back(theta);
      continue;
    }
    curve.points.push_back({theta, fp / (fp + tn), tp / (tp + fn)});
  }

  std::vector<std::pair<double, double>> xy{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& p : curve.points) xy.emplace_back(p.fpr, p.tpr);
  std::sort(xy.begin(), xy.end());
  double area = 0.0;
  for (std::size_t i = 1; i < xy.size(); ++i) {
    area += (xy[i].first - xy[i - 1].first) * (xy[i].second + xy[i - 1].second) / 2.0;
  }
  curve.auc = area;
  return curve;
}

inline RocCurve roc_curve(const TournamentResult& result, RocLabels labels = RocLabels::paper) {
  const auto samples = roc_samples(result);
  const auto th = default_thresholds(samples);
  return roc_curve(samples, th, labels);
}

inline RocCurve roc_curve(const TournamentResult& result, std::span<const double> thresholds,
                          RocLabels labels = RocLabels::paper) {
  const auto samples = roc_samples(result);
  return roc_curve(samples, thresholds, labels);
}

}  // namespace zdaudit
