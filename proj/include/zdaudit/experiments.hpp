#pragma once

// Experiment configuration (flat `key = value` text), deterministic CSV/JSON
// emission, run manifests and the figure data sets.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zdaudit/chain.hpp"
#include "zdaudit/diff_optimizer.hpp"
#include "zdaudit/error.hpp"
#include "zdaudit/game.hpp"
#include "zdaudit/simulator.hpp"
#include "zdaudit/zd_control.hpp"

namespace zdaudit {

inline constexpr std::string_view kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// number / CSV formatting

/// Shortest round-trip decimal, '.' separator regardless of locale.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row(std::vector<std::string> cells) {
    rows_.push_back(std::move(cells));
    return *this;
  }

  std::string str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string num(double x) { return format_number(x); }
inline std::string flag(bool b) { return b ? "true" : "false"; }

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// configuration

struct SweepDecl {
  std::string variable;
  double lo = 0.0;
  double hi = 1.0;
  int steps = 101;

  double at(int k) const { return steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1); }
};

struct ExperimentConfig {
  Model model = Model::deterministic;
  double t_d = 8.0, t_m = 5.0, c = 2.0, r_a = 10.0, s_a = 5.0;
  bool strict_mode = true;
  double tau = 0.6, delta = 0.2;
  std::string defender = "zd(0.9,0.5)";
  std::string attacker = "all1";
  /// Equalizer target used by `equalize`, `range` and the fig3/fig4 sweeps.
  double p1 = 0.5, p4 = 0.5;
  /// Equalizer played as the ZD defender in the fig5/fig6 tournaments.
  double zd_p1 = 0.9, zd_p4 = 0.5;
  /// phi values for `optimize`; empty means the default 120-point grid.
  std::vector<double> phi{-1.0};
  std::vector<SweepDecl> sweeps;
  int rounds = 50, repetitions = 50;
  std::uint64_t seed = 1;
  double p_step = 0.1, q_step = 0.1, oracle_tolerance = 1e-6;
  bool standard_labels = false;
  int initial_state = 0;
  std::optional<double> wsls_threshold_defender, wsls_threshold_attacker;
  std::string out;

  /// Declared sweep for `variable`, or [lo, hi] with `steps` points by default.
  SweepDecl sweep(const std::string& variable, double lo = 0.0, double hi = 1.0,
                  int steps = 101) const {
    for (const auto& s : sweeps) {
      if (s.variable == variable) return s;
    }
    return {variable, lo, hi, steps};
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void config_fail(int line, const std::string& key, const std::string& what) {
  std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  throw Error(ErrorCode::ConfigError, where + "key '" + key + "': " + what);
}

inline double parse_double(const std::string& text, int line, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) config_fail(line, key, "not a number: '" + text + "'");
  return v;
}

inline std::int64_t parse_int(const std::string& text, int line, const std::string& key) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_fail(line, key, "not an integer: '" + text + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& text, int line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  config_fail(line, key, "not a boolean: '" + text + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// Applies one `key = value` assignment. `line` only feeds error messages.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                          int line = 0) {
  using namespace detail;
  auto d = [&] { return parse_double(value, line, key); };
  if (key == "model") {
    if (value == "deterministic") cfg.model = Model::deterministic;
    else if (value == "probabilistic") cfg.model = Model::probabilistic;
    else config_fail(line, key, "expected deterministic|probabilistic");
  } else if (key == "t_d") cfg.t_d = d();
  else if (key == "t_m") cfg.t_m = d();
  else if (key == "c") cfg.c = d();
  else if (key == "r_a") cfg.r_a = d();
  else if (key == "s_a") cfg.s_a = d();
  else if (key == "strict_mode") cfg.strict_mode = parse_bool(value, line, key);
  else if (key == "tau") cfg.tau = d();
  else if (key == "delta") cfg.delta = d();
  else if (key == "defender") cfg.defender = value;
  else if (key == "attacker") cfg.attacker = value;
  else if (key == "p1") cfg.p1 = d();
  else if (key == "p4") cfg.p4 = d();
  else if (key == "zd_p1") cfg.zd_p1 = d();
  else if (key == "zd_p4") cfg.zd_p4 = d();
  else if (key == "phi") {
    cfg.phi.clear();
    if (value != "default") {
      for (const auto& part : split(value, ',')) cfg.phi.push_back(parse_double(part, line, key));
    }
  } else if (key == "sweep") {
    std::istringstream in(value);
    std::string var, lo, hi, steps;
    if (!(in >> var >> lo >> hi >> steps)) config_fail(line, key, "expected '<variable> <lo> <hi> <steps>'");
    static const std::array<std::string_view, 4> known{"p1", "p4", "tau", "delta"};
    if (std::find(known.begin(), known.end(), var) == known.end()) {
      config_fail(line, key, "unknown sweep variable '" + var + "'");
    }
    SweepDecl s{var, parse_double(lo, line, key), parse_double(hi, line, key),
                static_cast<int>(parse_int(steps, line, key))};
    if (s.steps < 1 || s.steps > 100001 || !(s.lo <= s.hi)) config_fail(line, key, "bad sweep bounds");
    std::erase_if(cfg.sweeps, [&](const SweepDecl& o) { return o.variable == var; });
    cfg.sweeps.push_back(s);
  } else if (key == "rounds") cfg.rounds = static_cast<int>(parse_int(value, line, key));
  else if (key == "repetitions") cfg.repetitions = static_cast<int>(parse_int(value, line, key));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, line, key));
  else if (key == "p_step") cfg.p_step = d();
  else if (key == "q_step") cfg.q_step = d();
  else if (key == "oracle_tolerance") cfg.oracle_tolerance = d();
  else if (key == "standard_labels") cfg.standard_labels = parse_bool(value, line, key);
  else if (key == "initial_state") {
    static const std::array<std::string_view, 4> states{"00", "01", "10", "11"};
    const auto it = std::find(states.begin(), states.end(), value);
    if (it == states.end()) config_fail(line, key, "expected 00|01|10|11");
    cfg.initial_state = static_cast<int>(it - states.begin());
  } else if (key == "wsls_threshold_defender") cfg.wsls_threshold_defender = d();
  else if (key == "wsls_threshold_attacker") cfg.wsls_threshold_attacker = d();
  else if (key == "out") cfg.out = value;
  else config_fail(line, key, "unknown key");
}

/// Parses `key = value` lines; `#` starts a comment.
inline ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg = {}) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) detail::config_fail(line_no, line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) detail::config_fail(line_no, key, "empty key");
    apply_setting(cfg, key, value, line_no);
  }
  return cfg;
}

/// Canonical key/value echo of a configuration (manifests, golden files).
inline std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> e{
      {"model", to_string(cfg.model)},
      {"t_d", num(cfg.t_d)},
      {"t_m", num(cfg.t_m)},
      {"c", num(cfg.c)},
      {"r_a", num(cfg.r_a)},
      {"s_a", num(cfg.s_a)},
      {"strict_mode", flag(cfg.strict_mode)},
      {"tau", num(cfg.tau)},
      {"delta", num(cfg.delta)},
      {"defender", cfg.defender},
      {"attacker", cfg.attacker},
      {"p1", num(cfg.p1)},
      {"p4", num(cfg.p4)},
      {"zd_p1", num(cfg.zd_p1)},
      {"zd_p4", num(cfg.zd_p4)},
  };
  std::string phis;
  for (double v : cfg.phi) phis += (phis.empty() ? "" : ",") + num(v);
  e.emplace_back("phi", cfg.phi.empty() ? "default" : phis);
  for (const auto& s : cfg.sweeps) {
    e.emplace_back("sweep", s.variable + " " + num(s.lo) + " " + num(s.hi) + " " + std::to_string(s.steps));
  }
  e.emplace_back("rounds", std::to_string(cfg.rounds));
  e.emplace_back("repetitions", std::to_string(cfg.repetitions));
  e.emplace_back("seed", std::to_string(cfg.seed));
  e.emplace_back("p_step", num(cfg.p_step));
  e.emplace_back("q_step", num(cfg.q_step));
  e.emplace_back("oracle_tolerance", num(cfg.oracle_tolerance));
  e.emplace_back("standard_labels", flag(cfg.standard_labels));
  e.emplace_back("initial_state", GameState(cfg.initial_state).label());
  if (cfg.wsls_threshold_defender) e.emplace_back("wsls_threshold_defender", num(*cfg.wsls_threshold_defender));
  if (cfg.wsls_threshold_attacker) e.emplace_back("wsls_threshold_attacker", num(*cfg.wsls_threshold_attacker));
  return e;
}

/// Validated game objects derived from a configuration.
struct GameSetup {
  AuditGameParams params;
  SignalPolicy policy;
  PayoffVectors deterministic;
  PayoffVectors probabilistic;

  const PayoffVectors& payoffs(Model m) const {
    return m == Model::deterministic ? deterministic : probabilistic;
  }
};

/// Runs every constructor check; failures become ConfigError naming the key.
inline GameSetup validate(const ExperimentConfig& cfg) {
  auto rethrow = [](const Error& e, const std::string& key) -> void {
    detail::config_fail(0, key, e.what());
  };
  std::optional<AuditGameParams> params;
  try {
    params = build_params(cfg.t_d, cfg.t_m, cfg.c, cfg.r_a, cfg.s_a, cfg.strict_mode);
  } catch (const Error& e) {
    std::string key = "t_d";
    for (const auto& [name, v] : {std::pair{"t_d", cfg.t_d}, {"t_m", cfg.t_m}, {"c", cfg.c},
                                  {"r_a", cfg.r_a}, {"s_a", cfg.s_a}}) {
      if (!(v > 0.0)) {
        key = name;
        break;
      }
    }
    rethrow(e, key);
  }
  std::optional<SignalPolicy> policy;
  try {
    policy = make_policy(cfg.tau, cfg.delta);
  } catch (const Error& e) {
    rethrow(e, cfg.delta < 0.0 ? "delta" : "tau");
  }
  if (cfg.rounds < 1) detail::config_fail(0, "rounds", "must be >= 1");
  if (cfg.repetitions < 1) detail::config_fail(0, "repetitions", "must be >= 1");
  for (double phi : cfg.phi) {
    if (phi == 0.0) detail::config_fail(0, "phi", "phi must be nonzero");
  }
  return {*params, *policy, deterministic_payoffs(*params), probabilistic_payoffs(*params, *policy)};
}

/// Strategy text: all0 | all1 | rand | tft | wsls | mixed(x,...) |
/// zd(p1,p4) (clamped equalizer) | zd_exact(p1,p4) | zd_diff(phi).
inline StrategySpec parse_strategy(const std::string& text, Role role) {
  const std::string key = role == Role::defender ? "defender" : "attacker";
  const auto open = text.find('(');
  const std::string head = detail::trim(text.substr(0, open));
  std::vector<double> args;
  if (open != std::string::npos) {
    const auto close = text.rfind(')');
    if (close == std::string::npos || close < open) detail::config_fail(0, key, "unbalanced parentheses");
    for (const auto& part : detail::split(text.substr(open + 1, close - open - 1), ',')) {
      args.push_back(detail::parse_double(part, 0, key));
    }
  }
  auto want = [&](std::size_t n) {
    if (args.size() != n) {
      detail::config_fail(0, key, head + " takes " + std::to_string(n) + " argument(s)");
    }
  };
  try {
    if (head == "all0") { want(0); return StrategySpec::classic(StrategyKind::all0, role); }
    if (head == "all1") { want(0); return StrategySpec::classic(StrategyKind::all1, role); }
    if (head == "rand") { want(0); return StrategySpec::classic(StrategyKind::rand, role); }
    if (head == "tft") { want(0); return StrategySpec::classic(StrategyKind::tft, role); }
    if (head == "wsls") { want(0); return StrategySpec::classic(StrategyKind::wsls, role); }
    if (head == "mixed") {
      if (role == Role::defender) {
        want(4);
        return StrategySpec::defender_mixed({args[0], args[1], args[2], args[3]});
      }
      want(2);
      return StrategySpec::attacker_mixed({args[0], args[1]});
    }
    if (role == Role::defender && (head == "zd" || head == "zd_exact")) {
      want(2);
      return StrategySpec::zd_equalizer(args[0], args[1], head == "zd");
    }
    if (role == Role::defender && head == "zd_diff") {
      want(1);
      return StrategySpec::zd_diff_max(args[0]);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    detail::config_fail(0, key, e.what());
  }
  detail::config_fail(0, key, "unknown strategy '" + text + "'");
}

// ---------------------------------------------------------------------------
// outputs and manifest

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> checksums;
  std::vector<std::string> warnings;

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "zdaudit";
    j["version"] = std::string(kVersion);
    j["command"] = command;
    j["seed"] = seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& [name, sum] : checksums) outs.push_back({{"file", name}, {"fnv1a64", sum}});
    j["outputs"] = outs;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
  }
};

inline RunManifest make_manifest(const std::string& command, const ExperimentConfig& cfg,
                                 const std::vector<OutputFile>& files,
                                 std::vector<std::string> warnings) {
  RunManifest m;
  m.command = command;
  m.seed = cfg.seed;
  m.config = config_echo(cfg);
  for (const auto& f : files) m.checksums.emplace_back(f.name, fnv1a64(f.content));
  m.warnings = std::move(warnings);
  return m;
}

// ---------------------------------------------------------------------------
// figure data

struct FigureSet {
  std::vector<OutputFile> files;
  std::vector<std::string> warnings;
};

namespace detail {

inline const std::array<StrategyKind, 5>& baseline_kinds() {
  static const std::array<StrategyKind, 5> k{StrategyKind::all0, StrategyKind::all1,
                                             StrategyKind::rand, StrategyKind::tft,
                                             StrategyKind::wsls};
  return k;
}

inline void add_unique(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  for (const auto& w : src) {
    if (std::find(dst.begin(), dst.end(), w) == dst.end()) dst.push_back(w);
  }
}

/// u_a along one variable of the equalizer formula; degenerate cells are skipped.
inline std::string equalizer_sweep(const PayoffVectors& pv, const SweepDecl& sweep, bool sweep_p1,
                                   double fixed) {
  CsvTable t({"p1", "p4", "u_a", "feasible"});
  for (int k = 0; k < sweep.steps; ++k) {
    const double x = sweep.at(k);
    const double p1 = sweep_p1 ? x : fixed;
    const double p4 = sweep_p1 ? fixed : x;
    if (p4 + 1.0 - p1 == 0.0) continue;
    const EqualizerStrategy eq = equalizer_strategy(p1, p4, pv);
    t.row({num(p1), num(p4), num(attacker_utility_formula(p1, p4, pv)), flag(eq.feasible)});
  }
  return t.str();
}

/// u_a as a function of tau through U_A[11] = r_a - tau * s_a, one column set per level.
inline std::string tau_sweep(const AuditGameParams& g, const SweepDecl& sweep, bool vary_p1,
                             double fixed, const std::vector<double>& levels) {
  CsvTable t({"tau", "p1", "p4", "u_a"});
  for (double level : levels) {
    const double p1 = vary_p1 ? level : fixed;
    const double p4 = vary_p1 ? fixed : level;
    for (int k = 0; k < sweep.steps; ++k) {
      const double tau = sweep.at(k);
      t.row({num(tau), num(p1), num(p4),
             num(attacker_utility_formula(p1, p4, g.r_a() - tau * g.s_a()))});
    }
  }
  return t.str();
}

inline std::vector<std::string> bounds_cells(const DiffBounds& b) {
  return {num(b.gamma_min), num(b.gamma_max), num(-b.gamma_min), flag(b.feasible)};
}

}  // namespace detail

/// Builds every figure CSV in memory. Pure function of (cfg, cfg.seed).
inline FigureSet emit_figure_data(const ExperimentConfig& cfg) {
  const GameSetup setup = validate(cfg);
  const AuditGameParams& g = setup.params;
  FigureSet fs;

  // fig3 / fig4: equalizer utility sweeps
  const SweepDecl sp1 = cfg.sweep("p1");
  const SweepDecl sp4 = cfg.sweep("p4");
  const SweepDecl stau = cfg.sweep("tau");
  fs.files.push_back({"fig3_p1.csv", detail::equalizer_sweep(setup.deterministic, sp1, true, cfg.p4)});
  fs.files.push_back({"fig3_p4.csv", detail::equalizer_sweep(setup.deterministic, sp4, false, cfg.p1)});
  fs.files.push_back({"fig4_p1.csv", detail::equalizer_sweep(setup.probabilistic, sp1, true, cfg.p4)});
  fs.files.push_back({"fig4_p4.csv", detail::equalizer_sweep(setup.probabilistic, sp4, false, cfg.p1)});
  const std::vector<double> levels{0.1, 0.3, 0.5, 0.7, 0.9};
  fs.files.push_back({"fig4_tau_p1.csv", detail::tau_sweep(g, stau, true, cfg.p4, levels)});
  fs.files.push_back({"fig4_tau_p4.csv", detail::tau_sweep(g, stau, false, cfg.p1, levels)});

  // fig5 / fig6 (deterministic) and fig8 (probabilistic): tournaments
  const PlayOptions opts{GameState(cfg.initial_state), cfg.wsls_threshold_defender,
                         cfg.wsls_threshold_attacker, 0};
  const RocLabels labels = cfg.standard_labels ? RocLabels::standard : RocLabels::paper;
  const double zd_phi = cfg.phi.empty() ? -1.0 : cfg.phi.front();

  auto defenders_for = [&](const PayoffVectors& pv, bool diff_max) {
    std::vector<StrategySpec> out;
    const StrategySpec zd = diff_max ? StrategySpec::zd_diff_max(zd_phi)
                                     : StrategySpec::zd_equalizer(cfg.zd_p1, cfg.zd_p4, true);
    const ResolvedStrategy r = resolve_strategy(zd, pv);
    detail::add_unique(fs.warnings, r.warnings);
    out.push_back(r.spec);
    for (StrategyKind k : detail::baseline_kinds()) out.push_back(StrategySpec::classic(k, Role::defender));
    return out;
  };

  struct Panel {
    std::string defender;
    std::vector<TournamentResult> runs;  // one per attacker baseline
  };
  auto run_panels = [&](const PayoffVectors& pv, bool diff_max, std::uint64_t figure_id) {
    std::vector<Panel> panels;
    const auto defenders = defenders_for(pv, diff_max);
    for (std::size_t i = 0; i < defenders.size(); ++i) {
      Panel panel{defenders[i].name(), {}};
      for (std::size_t j = 0; j < detail::baseline_kinds().size(); ++j) {
        const StrategySpec att = StrategySpec::classic(detail::baseline_kinds()[j], Role::attacker);
        const std::uint64_t cell_seed = stream_seed(cfg.seed, figure_id * 1000 + i * 10 + j);
        panel.runs.push_back(play_iterated(defenders[i], att, pv, cfg.rounds, cfg.repetitions,
                                           cell_seed, opts));
      }
      panels.push_back(std::move(panel));
    }
    return panels;
  };

  auto per_round_table = [&](const Panel& panel, const std::string& prefix, bool diff) {
    std::vector<std::string> header{"round"};
    for (const auto& run : panel.runs) header.push_back(prefix + run.attacker);
    CsvTable t(header);
    for (int r = 0; r < cfg.rounds; ++r) {
      std::vector<std::string> row{std::to_string(r + 1)};
      for (const auto& run : panel.runs) {
        row.push_back(num(diff ? run.mean_u_d_per_round[r] - run.mean_u_a_per_round[r]
                               : run.mean_u_a_per_round[r]));
      }
      t.row(row);
    }
    return t.str();
  };

  const auto det_panels = run_panels(setup.deterministic, false, 5);
  for (const auto& panel : det_panels) {
    fs.files.push_back({"fig5_" + panel.defender + ".csv", per_round_table(panel, "u_a_", false)});
  }

  CsvTable auc({"attacker", "defender", "auc", "points", "skipped_thresholds"});
  for (std::size_t j = 0; j < detail::baseline_kinds().size(); ++j) {
    const std::string att = to_string(detail::baseline_kinds()[j]);
    CsvTable t({"defender", "threshold", "fpr", "tpr"});
    for (const auto& panel : det_panels) {
      const RocCurve curve = roc_curve(panel.runs[j], labels);
      for (const auto& p : curve.points) {
        t.row({panel.defender, num(p.threshold), num(p.fpr), num(p.tpr)});
      }
      auc.row({att, panel.defender, num(curve.auc), std::to_string(curve.points.size()),
               std::to_string(curve.skipped_thresholds.size())});
    }
    fs.files.push_back({"fig6_" + att + ".csv", t.str()});
  }
  fs.files.push_back({"fig6_auc.csv", auc.str()});

  // fig7: closed-form maximal difference -gamma_min at the configured phi
  {
    const SweepDecl st = cfg.sweep("tau");
    const SweepDecl sd = cfg.sweep("delta");
    auto bounds_at = [&](double tau, double delta) {
      return gamma_bounds(probabilistic_payoffs(g, make_policy(tau, delta)), zd_phi);
    };
    const std::vector<std::string> header{"tau", "delta", "gamma_min", "gamma_max", "value", "feasible"};

    CsvTable surface(header);
    for (int i = 0; i < st.steps; ++i) {
      for (int k = 0; k < sd.steps; ++k) {
        const double tau = st.at(i);
        const double delta = sd.at(k);
        if (!(delta >= 0.0 && delta < tau && tau <= 1.0)) continue;
        auto row = detail::bounds_cells(bounds_at(tau, delta));
        row.insert(row.begin(), {num(tau), num(delta)});
        surface.row(row);
      }
    }
    fs.files.push_back({"fig7_surface.csv", surface.str()});

    auto line = [&](auto&& tau_delta, int steps) {
      CsvTable t(header);
      for (int k = 0; k < steps; ++k) {
        const auto [tau, delta] = tau_delta(k);
        if (!(delta >= 0.0 && delta < tau && tau <= 1.0)) continue;
        auto row = detail::bounds_cells(bounds_at(tau, delta));
        row.insert(row.begin(), {num(tau), num(delta)});
        t.row(row);
      }
      return t.str();
    };
    const int n = st.steps;
    fs.files.push_back({"fig7_tau.csv", line([&](int k) { return std::pair{st.at(k), cfg.delta}; }, n)});
    fs.files.push_back(
        {"fig7_delta.csv", line([&](int k) { return std::pair{cfg.tau, sd.at(k)}; }, sd.steps)});
    // tau - delta held at its configured value
    const double gap = cfg.tau - cfg.delta;
    fs.files.push_back({"fig7_slice_diff.csv", line(
                                                   [&](int k) {
                                                     const double delta = (1.0 - gap) * k / (n - 1);
                                                     return std::pair{delta + gap, delta};
                                                   },
                                                   n)});
    // delta / tau held at its configured ratio
    const double ratio = cfg.delta / cfg.tau;
    fs.files.push_back({"fig7_slice_ratio.csv", line(
                                                    [&](int k) {
                                                      const double tau = static_cast<double>(k + 1) / n;
                                                      return std::pair{tau, ratio * tau};
                                                    },
                                                    n)});
  }

  const auto prob_panels = run_panels(setup.probabilistic, true, 8);
  for (const auto& panel : prob_panels) {
    fs.files.push_back({"fig8_" + panel.defender + ".csv", per_round_table(panel, "diff_", true)});
  }
  return fs;
}

}  // namespace zdaudit
