#pragma once

// Subcommand dispatch for the zdaudit command line tool.
//
//   zdaudit <payoffs|equilibrium|equalize|range|optimize|oracle|simulate|roc|figures>
//           [--config PATH] [--seed N] [--out DIR] [--format csv|json] [--set key=value]...
//
// Exit status: 0 success, 2 validation error, 3 infeasible result (diagnostics
// still written), 1 I/O or internal failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zdaudit/experiments.hpp"

namespace zdaudit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"payoffs", "equilibrium", "equalize",
                                              "range",   "optimize",    "oracle",
                                              "simulate", "roc",        "figures"};
  return names;
}

enum class OutputFormat { csv, json };

struct CommandOutput {
  int status = kExitOk;
  /// The first file is also printed to stdout.
  std::vector<OutputFile> files;
  std::vector<std::string> warnings;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson vec_json(const Vec4& v) { return ojson::array({v[0], v[1], v[2], v[3]}); }

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

inline const PayoffVectors& model_payoffs(const ExperimentConfig& cfg, const GameSetup& s) {
  return s.payoffs(cfg.model);
}

inline CommandOutput cmd_payoffs(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  const PayoffVectors& pv = model_payoffs(cfg, s);
  if (fmt == OutputFormat::json) {
    ojson j;
    j["model"] = to_string(pv.model);
    j["states"] = {"00", "01", "10", "11"};
    j["u_d"] = vec_json(pv.u_d);
    j["u_a"] = vec_json(pv.u_a);
    return {kExitOk, {{"payoffs.json", dump(j)}}, {}};
  }
  CsvTable t({"state", "u_d", "u_a"});
  for (int i = 0; i < 4; ++i) t.row({GameState(i).label(), num(pv.u_d[i]), num(pv.u_a[i])});
  return {kExitOk, {{"payoffs.csv", t.str()}}, {}};
}

inline CommandOutput cmd_equilibrium(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  const Equilibrium eq = backward_induction_equilibrium(model_payoffs(cfg, s));
  if (fmt == OutputFormat::json) {
    ojson j;
    j["equilibrium"] = eq.state.label();
    j["model"] = to_string(cfg.model);
    j["attacker_response"] = {{"0", eq.attacker_response[0]}, {"1", eq.attacker_response[1]}};
    return {kExitOk, {{"equilibrium.json", dump(j)}}, {}};
  }
  CsvTable t({"equilibrium", "response_d0", "response_d1"});
  t.row({eq.state.label(), std::to_string(eq.attacker_response[0]),
         std::to_string(eq.attacker_response[1])});
  return {kExitOk, {{"equilibrium.csv", t.str()}}, {}};
}

inline CommandOutput cmd_equalize(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  const EqualizerStrategy eq = equalizer_strategy(cfg.p1, cfg.p4, model_payoffs(cfg, s));
  std::vector<std::string> violations;
  for (int i : eq.violations) violations.push_back("p" + std::to_string(i + 1));
  CommandOutput out;
  out.status = eq.feasible ? kExitOk : kExitInfeasible;
  if (!eq.feasible) out.warnings.push_back("equalizer candidate is outside [0,1]^4");
  if (fmt == OutputFormat::json) {
    ojson j;
    j["p1"] = cfg.p1;
    j["p4"] = cfg.p4;
    j["p"] = vec_json(eq.p);
    j["alpha"] = eq.alpha;
    j["gamma"] = eq.gamma;
    j["predicted_u_a"] = eq.predicted_u_a;
    j["feasible"] = eq.feasible;
    j["violations"] = violations;
    out.files.push_back({"equalize.json", dump(j)});
  } else {
    std::string joined;
    for (const auto& v : violations) joined += (joined.empty() ? "" : ";") + v;
    CsvTable t({"p1", "p2", "p3", "p4", "alpha", "gamma", "predicted_u_a", "feasible", "violations"});
    t.row({num(eq.p[0]), num(eq.p[1]), num(eq.p[2]), num(eq.p[3]), num(eq.alpha), num(eq.gamma),
           num(eq.predicted_u_a), flag(eq.feasible), joined});
    out.files.push_back({"equalize.csv", t.str()});
  }
  return out;
}

inline CommandOutput cmd_range(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  const PayoffVectors& pv = model_payoffs(cfg, s);
  const ControlAnalysis a = control_range_and_dominance(cfg.p1, cfg.p4, pv, s.params);
  const ControlGradients g = control_gradients(cfg.p1, cfg.p4, pv, s.params);
  std::vector<ControlRange> ranges{a.p1, a.p4};
  if (a.tau) ranges.push_back(*a.tau);
  if (fmt == OutputFormat::json) {
    ojson j;
    j["p1"] = cfg.p1;
    j["p4"] = cfg.p4;
    j["u_a"] = attacker_utility_formula(cfg.p1, cfg.p4, pv);
    ojson r = ojson::object();
    for (const auto& cr : ranges) {
      r[to_string(cr.variable)] = {{"lo", cr.lo}, {"hi", cr.hi}, {"width", cr.width()}};
    }
    j["ranges"] = r;
    j["gradients"] = {{"p1", g.d_p1}, {"p4", g.d_p4}};
    if (g.d_tau) j["gradients"]["tau"] = *g.d_tau;
    j["dominant"] = to_string(a.dominant);
    return {kExitOk, {{"range.json", dump(j)}}, {}};
  }
  CsvTable t({"variable", "lo", "hi", "width", "gradient", "dominant"});
  for (const auto& cr : ranges) {
    const double grad = cr.variable == ControlVariable::p1   ? g.d_p1
                        : cr.variable == ControlVariable::p4 ? g.d_p4
                                                             : g.d_tau.value_or(0.0);
    t.row({to_string(cr.variable), num(cr.lo), num(cr.hi), num(cr.width()), num(grad),
           to_string(a.dominant)});
  }
  return {kExitOk, {{"range.csv", t.str()}}, {}};
}

inline std::vector<std::string> solution_cells(const DiffBounds& b, const PayoffVectors& pv) {
  const Vec4 p = recover_strategy(pv, b.phi, b.gamma_min);
  return {num(b.phi),  num(b.gamma_min), num(b.gamma_max), flag(b.feasible), num(-b.gamma_min),
          GameState(b.binding_lower).label(), GameState(b.binding_upper).label(),
          num(p[0]), num(p[1]), num(p[2]), num(p[3])};
}

inline CommandOutput cmd_optimize(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  const PayoffVectors& pv = model_payoffs(cfg, s);
  const std::vector<double> grid = cfg.phi.empty() ? default_phi_grid() : cfg.phi;
  const DiffMaxReport rep = solve_diff_max(pv, grid);
  CommandOutput out;
  out.status = rep.any_feasible ? kExitOk : kExitInfeasible;
  if (!rep.any_feasible) {
    const DiffBounds& b = rep.best.bounds;
    out.warnings.push_back("no feasible phi; closed-form gamma_min=" + num(b.gamma_min) +
                           " exceeds gamma_max=" + num(b.gamma_max) + " (binding states " +
                           GameState(b.binding_lower).label() + "/" +
                           GameState(b.binding_upper).label() + ")");
  }
  if (fmt == OutputFormat::json) {
    ojson j;
    j["model"] = to_string(pv.model);
    j["any_feasible"] = rep.any_feasible;
    j["best"] = {{"phi", rep.best.phi},         {"gamma", rep.best.gamma},
                 {"value", rep.best.value},     {"feasible", rep.best.feasible},
                 {"p", vec_json(rep.best.p)}};
    ojson rows = ojson::array();
    for (const auto& b : rep.per_phi) {
      rows.push_back({{"phi", b.phi},
                      {"gamma_min", b.gamma_min},
                      {"gamma_max", b.gamma_max},
                      {"feasible", b.feasible},
                      {"lower_terms", vec_json(b.lower_terms)},
                      {"upper_terms", vec_json(b.upper_terms)},
                      {"binding_lower", GameState(b.binding_lower).label()},
                      {"binding_upper", GameState(b.binding_upper).label()}});
    }
    j["per_phi"] = rows;
    out.files.push_back({"optimize.json", dump(j)});
  } else {
    CsvTable t({"phi", "gamma_min", "gamma_max", "feasible", "value", "binding_lower",
                "binding_upper", "p1", "p2", "p3", "p4"});
    for (const auto& b : rep.per_phi) t.row(solution_cells(b, pv));
    out.files.push_back({"optimize.csv", t.str()});
  }
  return out;
}

inline CommandOutput cmd_oracle(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  const PayoffVectors& pv = model_payoffs(cfg, s);
  OracleReport rep;
  try {
    rep = brute_force_diff_oracle(pv, cfg.p_step, cfg.q_step, cfg.oracle_tolerance);
  } catch (const Error& e) {
    config_fail(0, "p_step", e.what());
  }
  CommandOutput out;
  out.status = rep.enforcing.empty() ? kExitInfeasible : kExitOk;
  if (rep.enforcing.empty()) out.warnings.push_back("no grid cell enforces a q-independent u_d - u_a");
  if (fmt == OutputFormat::json) {
    ojson j;
    j["cells_scanned"] = rep.cells_scanned;
    j["degenerate_cells"] = rep.degenerate_cells;
    j["enforcing_cells"] = rep.enforcing.size();
    j["tolerance"] = rep.tolerance;
    if (rep.best) j["best"] = {{"p", vec_json(rep.best->p)}, {"value", rep.best->value}};
    else j["best"] = nullptr;
    out.files.push_back({"oracle.json", dump(j)});
  } else {
    CsvTable t({"p1", "p2", "p3", "p4", "value", "spread", "ergodic_q"});
    for (const auto& c : rep.enforcing) {
      t.row({num(c.p[0]), num(c.p[1]), num(c.p[2]), num(c.p[3]), num(c.value), num(c.spread),
             std::to_string(c.ergodic_q)});
    }
    out.files.push_back({"oracle.csv", t.str()});
  }
  return out;
}

inline TournamentResult run_tournament(const ExperimentConfig& cfg, const GameSetup& s,
                                       std::vector<std::string>& warnings) {
  const PayoffVectors& pv = model_payoffs(cfg, s);
  const ResolvedStrategy def = resolve_strategy(parse_strategy(cfg.defender, Role::defender), pv);
  const StrategySpec att = parse_strategy(cfg.attacker, Role::attacker);
  add_unique(warnings, def.warnings);
  const PlayOptions opts{GameState(cfg.initial_state), cfg.wsls_threshold_defender,
                         cfg.wsls_threshold_attacker, 0};
  TournamentResult res = play_iterated(def.spec, att, pv, cfg.rounds, cfg.repetitions, cfg.seed, opts);
  add_unique(warnings, res.warnings);
  return res;
}

inline CommandOutput cmd_simulate(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  CommandOutput out;
  const TournamentResult res = run_tournament(cfg, s, out.warnings);
  if (fmt == OutputFormat::json) {
    ojson j;
    j["defender"] = res.defender;
    j["attacker"] = res.attacker;
    j["rounds"] = res.rounds;
    j["repetitions"] = res.repetitions;
    j["seed"] = res.seed;
    j["mean_u_d"] = res.mean_u_d;
    j["mean_u_a"] = res.mean_u_a;
    j["mean_u_d_per_round"] = res.mean_u_d_per_round;
    j["mean_u_a_per_round"] = res.mean_u_a_per_round;
    out.files.push_back({"simulate.json", dump(j)});
  } else {
    CsvTable t({"round", "mean_u_d", "mean_u_a", "mean_diff"});
    for (int r = 0; r < res.rounds; ++r) {
      t.row({std::to_string(r + 1), num(res.mean_u_d_per_round[r]), num(res.mean_u_a_per_round[r]),
             num(res.mean_u_d_per_round[r] - res.mean_u_a_per_round[r])});
    }
    out.files.push_back({"simulate.csv", t.str()});
  }
  return out;
}

inline CommandOutput cmd_roc(const ExperimentConfig& cfg, const GameSetup& s, OutputFormat fmt) {
  CommandOutput out;
  const TournamentResult res = run_tournament(cfg, s, out.warnings);
  const RocCurve curve =
      roc_curve(res, cfg.standard_labels ? RocLabels::standard : RocLabels::paper);
  if (!curve.skipped_thresholds.empty()) {
    out.warnings.push_back(std::to_string(curve.skipped_thresholds.size()) +
                           " threshold(s) skipped: empty TPR/FPR denominator");
  }
  if (fmt == OutputFormat::json) {
    ojson j;
    j["defender"] = res.defender;
    j["attacker"] = res.attacker;
    j["auc"] = curve.auc;
    ojson pts = ojson::array();
    for (const auto& p : curve.points) pts.push_back({{"threshold", p.threshold}, {"fpr", p.fpr}, {"tpr", p.tpr}});
    j["points"] = pts;
    j["skipped_thresholds"] = curve.skipped_thresholds;
    out.files.push_back({"roc.json", dump(j)});
  } else {
    CsvTable t({"threshold", "fpr", "tpr", "auc"});
    for (const auto& p : curve.points) t.row({num(p.threshold), num(p.fpr), num(p.tpr), num(curve.auc)});
    out.files.push_back({"roc.csv", t.str()});
  }
  return out;
}

inline CommandOutput cmd_figures(const ExperimentConfig& cfg) {
  FigureSet fs = emit_figure_data(cfg);
  CommandOutput out;
  out.files = std::move(fs.files);
  out.warnings = std::move(fs.warnings);
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Runs one subcommand on an already parsed configuration. Files go to
/// cfg.out when set (together with manifest.json).
inline CommandOutput execute(const std::string& command, const ExperimentConfig& cfg,
                             OutputFormat fmt) {
  const GameSetup setup = validate(cfg);
  if (command == "payoffs") return detail::cmd_payoffs(cfg, setup, fmt);
  if (command == "equilibrium") return detail::cmd_equilibrium(cfg, setup, fmt);
  if (command == "equalize") return detail::cmd_equalize(cfg, setup, fmt);
  if (command == "range") return detail::cmd_range(cfg, setup, fmt);
  if (command == "optimize") return detail::cmd_optimize(cfg, setup, fmt);
  if (command == "oracle") return detail::cmd_oracle(cfg, setup, fmt);
  if (command == "simulate") return detail::cmd_simulate(cfg, setup, fmt);
  if (command == "roc") return detail::cmd_roc(cfg, setup, fmt);
  if (command == "figures") return detail::cmd_figures(cfg);
  throw Error(ErrorCode::UnknownSubcommand, "unknown subcommand '" + command + "'");
}

/// Entry point behind main(). `args` excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-determinant strategies for signaling audit games", "zdaudit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory for files and manifest.json");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", sets, "inline key=value override (repeatable)");
  for (const auto& name : subcommands()) app.add_subcommand(name);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto unknown = std::find_if(args.begin(), args.end(), [](const std::string& a) {
      return !a.empty() && a[0] != '-' &&
             std::find(subcommands().begin(), subcommands().end(), a) == subcommands().end();
    });
    if (!args.empty() && unknown == args.begin()) {
      err << "UnknownSubcommand: '" << *unknown << "' (expected one of";
      for (const auto& name : subcommands()) err << " " << name;
      err << ")\n";
    } else {
      err << "usage error: " << e.what() << "\n";
    }
    return kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = parse_config(detail::read_file(config_path));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
      }
      apply_setting(cfg, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
    }
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (command == "figures" && cfg.out.empty()) cfg.out = "figures";

    const bool tabular = command == "optimize" || command == "oracle" || command == "simulate" ||
                         command == "roc" || command == "figures";
    const OutputFormat fmt = format.empty() ? (tabular ? OutputFormat::csv : OutputFormat::json)
                             : format == "json" ? OutputFormat::json
                                                : OutputFormat::csv;

    CommandOutput result = execute(command, cfg, fmt);
    const RunManifest manifest = make_manifest(command, cfg, result.files, result.warnings);

    if (!cfg.out.empty()) {
      std::filesystem::create_directories(cfg.out);
      for (const auto& f : result.files) detail::write_file(std::filesystem::path(cfg.out) / f.name, f.content);
      detail::write_file(std::filesystem::path(cfg.out) / "manifest.json", manifest.to_json());
    }
    if (command == "figures") {
      for (const auto& [name, sum] : manifest.checksums) out << name << " " << sum << "\n";
    } else if (!result.files.empty()) {
      out << result.files.front().content;
    }
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    return result.status;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace zdaudit
