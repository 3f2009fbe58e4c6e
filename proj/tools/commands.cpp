#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "jumpstop/config.hpp"
#include "jumpstop/errors.hpp"
#include "jumpstop/montecarlo.hpp"
#include "jumpstop/report.hpp"
#include "jumpstop/solver.hpp"
#include "jumpstop/statics.hpp"

namespace jumpstop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) { return format_number(v); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Inputs {
  std::string config;
  std::string out;
};

// Output directory handling shared by the commands that write files.
class OutputSet {
 public:
  OutputSet(std::string dir, RunManifest manifest) : dir_(std::move(dir)), manifest_(std::move(manifest)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error("cannot create output directory " + dir_.string());
    const auto probe = dir_ / ".jumpstop-write-test";
    std::ofstream test(probe);
    if (!test) throw Error("output directory " + dir_.string() + " is not writable");
    test.close();
    fs::remove(probe, ec);
  }

  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
    manifest_.outputs.push_back((dir_ / name).string());
    return CsvWriter(dir_ / name, manifest_.hash(), header);
  }

  void finish() {
    manifest_.outputs.push_back((dir_ / "manifest.json").string());
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write manifest");
    out << manifest_.to_json().dump(2) << "\n";
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

RunManifest make_manifest(const std::string& command, const Inputs& in, const Model& model, json flags,
                          std::uint64_t seed = 0) {
  RunManifest m;
  m.command = command;
  m.input = in.config;
  m.model = to_json(model);
  m.flags = std::move(flags);
  m.version = JUMPSTOP_VERSION;
  m.timestamp = utc_now();
  m.seed = seed;
  return m;
}

// Loads and structurally checks the model; prints the reason on failure.
std::optional<Model> load(const std::string& path, std::ostream& err) {
  try {
    Model model = load_model(path);
    check_structure(model);
    return model;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
  } catch (const StructuralError& e) {
    fmt::print(err, "error: {}: {}\n", path, e.what());
  }
  return std::nullopt;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  fmt::print(out, "classification: {}\n", to_string(report.classification));
  fmt::print(out, "h: {}\n", num(report.h));
  for (const auto& v : report.violations) {
    fmt::print(out, "violation [{}]: {} (value {})\n", v.rule, v.message, num(v.value));
  }
}

std::string describe(const ParamDomain& d) {
  if (!d.analytic) return "no closed form for this jump law";
  if (d.intervals.empty()) return "empty";
  std::string s;
  for (const auto& iv : d.intervals) {
    if (!s.empty()) s += " U ";
    s += fmt::format("{}{}, {}{}", iv.lo_closed ? '[' : '(', num(iv.lo), num(iv.hi), iv.hi_closed ? ']' : ')');
  }
  if (!d.constrained) s += " (unconstrained)";
  return s;
}

// Returns the admissibility exit code after printing the reason.
bool require_admissible(const Model& model, std::ostream& out) {
  const auto report = validate(model);
  if (report.valid) return true;
  print_report(report, out);
  if (report.classification == Classification::invest_immediately) {
    fmt::print(out, "model is not admissible: invest immediately\n");
  } else {
    fmt::print(out, "model is not admissible: diverging\n");
  }
  return false;
}

int cmd_validate(const Inputs& in, std::ostream& out, std::ostream& err) {
  const auto model = load(in.config, err);
  if (!model) return exit_usage;
  const auto report = validate(*model);
  print_report(report, out);
  if (report.classification == Classification::invest_immediately) {
    fmt::print(out, "invest immediately: rho <= mu_I\n");
  }
  const auto dom = demand_domain(*model);
  fmt::print(out, "demand domain (others fixed):\n");
  fmt::print(out, "  mu_X     {}\n", describe(dom.drift));
  fmt::print(out, "  sigma_X  {}\n", describe(dom.volatility));
  fmt::print(out, "  lambda_X {}\n", describe(dom.intensity));
  fmt::print(out, "  m_X      {}\n", describe(dom.jump_size));
  if (dom.b) fmt::print(out, "  B = {}\n", num(*dom.b));
  if (dom.c) fmt::print(out, "  C = {}\n", num(*dom.c));
  if (dom.d) fmt::print(out, "  D = {}\n", num(*dom.d));
  if (dom.xi.negative) fmt::print(out, "  xi1 = {}\n", num(*dom.xi.negative));
  if (dom.xi.positive) fmt::print(out, "  xi2 = {}\n", num(*dom.xi.positive));
  return report.valid ? exit_ok : exit_inadmissible;
}

int cmd_solve(const Inputs& in, std::size_t grid_points, std::ostream& out, std::ostream& err) {
  const auto model = load(in.config, err);
  if (!model) return exit_usage;
  if (grid_points < 2) {
    fmt::print(err, "error: --grid-points must be >= 2\n");
    return exit_usage;
  }
  if (!require_admissible(*model, out)) return exit_inadmissible;

  const auto s = compute_qstar(*model);
  const auto gaps = smooth_pasting_check(s);
  const auto grid = default_hjb_grid(s, grid_points);
  const auto hjb = hjb_residuals(s, grid);
  const double x0 = model->demand.initial;
  const double i0 = model->cost.initial;

  fmt::print(out, "h             {}\n", num(s.h));
  fmt::print(out, "A             {}\n", num(s.a));
  fmt::print(out, "r0            {}\n", num(s.r0));
  fmt::print(out, "q*            {}\n", num(s.qstar));
  fmt::print(out, "|j(r0)|       {}\n", num(s.root_residual));
  fmt::print(out, "value gap     {}\n", num(gaps.value_gap));
  fmt::print(out, "slope gap     {}\n", num(gaps.derivative_gap));
  fmt::print(out, "min f - l     {}  ({} points below q*)\n", num(hjb.min_continuation_slack),
             hjb.continuation_points);
  fmt::print(out, "min stop slack {} ({} points at or above q*)\n", num(hjb.min_stopping_slack),
             hjb.stopping_points);
  fmt::print(out, "max |rho f - L_Q f| below q*: {}\n", num(hjb.max_continuation_equation));
  fmt::print(out, "V(x0, i0)     {}  (q0 = {}, {})\n", num(value_v(s, x0, i0)),
             num(std::pow(x0, model->market.theta) / i0), in_continuation(s, x0, i0) ? "wait" : "invest");

  if (!in.out.empty()) {
    OutputSet files(in.out, make_manifest("solve", in, *model, {{"grid_points", grid_points}}));
    auto fcsv = files.csv("value.csv", {"q", "f", "l", "region"});
    for (const double q : grid) {
      fcsv.row({num(q), num(value_f(s, q)), num(payoff_l(s, q)), q < s.qstar ? "continuation" : "stopping"});
    }
    const auto xs = log_grid(x0 / 10.0, x0 * 10.0, grid_points);
    auto bcsv = files.csv("boundary.csv", {"x", "i"});
    for (const auto& p : boundary_curve(s, xs)) bcsv.row({num(p.x), num(p.i)});
    files.finish();
  }
  return exit_ok;
}

std::optional<std::vector<double>> parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) return std::nullopt;
  try {
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const long steps = std::stol(parts[2]);
    if (steps < 1 || !std::isfinite(lo) || !std::isfinite(hi)) return std::nullopt;
    std::vector<double> v;
    for (long k = 0; k < steps; ++k) {
      v.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1));
    }
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string valid_param_names() {
  std::string s;
  for (const auto p : all_params) s += (s.empty() ? "" : ", ") + std::string(param_name(p));
  return s;
}

int cmd_statics(const Inputs& in, const std::string& param, const std::string& sweep_spec, std::ostream& out,
                std::ostream& err) {
  std::optional<ParamId> chosen;
  if (!param.empty()) {
    chosen = parse_param(param);
    if (!chosen) {
      fmt::print(err, "error: unknown parameter '{}'; valid names: {}\n", param, valid_param_names());
      return exit_usage;
    }
  }
  std::optional<std::vector<double>> values;
  if (!sweep_spec.empty()) {
    if (!chosen) {
      fmt::print(err, "error: --sweep needs --param\n");
      return exit_usage;
    }
    values = parse_sweep(sweep_spec);
    if (!values) {
      fmt::print(err, "error: --sweep expects lo:hi:steps, got '{}'\n", sweep_spec);
      return exit_usage;
    }
  }
  const auto model = load(in.config, err);
  if (!model) return exit_usage;
  if (!require_admissible(*model, out)) return exit_inadmissible;
  const auto s = compute_qstar(*model);
  const json flags = {{"param", param}, {"sweep", sweep_spec}};

  if (values) {
    std::vector<SweepRow> rows;
    try {
      rows = sweep(*model, *chosen, *values);
    } catch (const UnsupportedAnalyticError& e) {
      fmt::print(err, "error: {}\n", e.what());
      return exit_usage;
    }
    const std::vector<std::string> header{"y", "admissible", "classification", "h", "r0", "qstar", "note"};
    const auto fields = [](const SweepRow& r) {
      return std::vector<std::string>{num(r.y),    r.admissible ? "1" : "0", to_string(r.classification),
                                      num(r.h),    num(r.r0),                num(r.qstar),
                                      r.note};
    };
    if (in.out.empty()) {
      std::string line;
      for (std::size_t k = 0; k < header.size(); ++k) line += (k ? "," : "") + header[k];
      fmt::print(out, "{}\n", line);
      for (const auto& r : rows) {
        const auto f = fields(r);
        line.clear();
        for (std::size_t k = 0; k < f.size(); ++k) line += (k ? "," : "") + csv_escape(f[k]);
        fmt::print(out, "{}\n", line);
      }
    } else {
      OutputSet files(in.out, make_manifest("statics", in, *model, flags));
      auto csv = files.csv(fmt::format("sweep_{}.csv", param), header);
      for (const auto& r : rows) csv.row(fields(r));
      files.finish();
      fmt::print(out, "wrote {} sweep rows for {}\n", rows.size(), param);
    }
    return exit_ok;
  }

  std::vector<ParamId> params;
  if (chosen) {
    params.push_back(*chosen);
  } else {
    params.assign(all_params.begin(), all_params.end());
  }
  const std::vector<std::string> header{"param", "dqstar_dy", "delta", "dh_dy", "dj_dy", "fd_estimate",
                                        "fd_rel_gap", "fd_mode", "sign", "sign_source"};
  std::vector<std::vector<std::string>> table;
  for (const auto p : params) {
    try {
      const auto r = dqstar_dy(*model, s, p);
      table.push_back({std::string(param_name(p)), num(r.derivative), num(r.delta), r.dh_dy ? num(*r.dh_dy) : "n/a",
                       num(r.dj_dy), num(r.fd_estimate), num(r.fd_relative_gap), to_string(r.fd_mode),
                       to_string(r.sign), r.sign_from_table ? "sign-table" : "local"});
    } catch (const UnsupportedAnalyticError&) {
      table.push_back({std::string(param_name(p)), "unsupported-analytic", "", "", "", "", "", "", "not-classified",
                       "random jump law: use --sweep"});
    }
  }
  fmt::print(out, "q* = {}, r0 = {}\n", num(s.qstar), num(s.r0));
  for (const auto& row : table) {
    fmt::print(out, "{:<9} dq*/dy {:<16} fd {:<16} gap {:<14} {:<10} {} ({})\n", row[0], row[1], row[5], row[6],
               row[7], row[8], row[9]);
  }
  if (!in.out.empty()) {
    OutputSet files(in.out, make_manifest("statics", in, *model, flags));
    auto csv = files.csv("statics.csv", header);
    for (const auto& row : table) csv.row(row);
    files.finish();
  }
  return exit_ok;
}

struct SimFlags {
  long paths = 100000;
  double dt = 1e-3;
  double horizon = 0.0;  // 0: 5 / rho
  std::uint64_t seed = 20240601;
  std::string scan;
  double moment_time = 1.0;
};

std::optional<unsigned> thread_cap(std::ostream& err) {
  const char* env = std::getenv("JUMPSTOP_THREADS");
  if (!env || !*env) return 0u;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    fmt::print(err, "error: JUMPSTOP_THREADS must be a positive integer, got '{}'\n", env);
    return std::nullopt;
  }
  return static_cast<unsigned>(v);
}

int cmd_simulate(const Inputs& in, const SimFlags& f, std::ostream& out, std::ostream& err) {
  if (f.paths < 2) {
    fmt::print(err, "error: --paths must be >= 2\n");
    return exit_usage;
  }
  if (!(f.dt > 0.0)) {
    fmt::print(err, "error: --dt must be > 0\n");
    return exit_usage;
  }
  if (f.horizon < 0.0 || !(f.moment_time > 0.0)) {
    fmt::print(err, "error: --horizon and --moment-time must be > 0\n");
    return exit_usage;
  }
  std::vector<double> multipliers;
  if (!f.scan.empty()) {
    std::stringstream ss(f.scan);
    for (std::string tok; std::getline(ss, tok, ',');) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !(v > 0.0)) throw std::invalid_argument(tok);
        multipliers.push_back(v);
      } catch (const std::exception&) {
        fmt::print(err, "error: --scan expects positive comma-separated multipliers, got '{}'\n", f.scan);
        return exit_usage;
      }
    }
  }
  const auto threads = thread_cap(err);
  if (!threads) return exit_usage;
  const auto model = load(in.config, err);
  if (!model) return exit_usage;
  if (!require_admissible(*model, out)) return exit_inadmissible;

  SimConfig cfg;
  cfg.paths = static_cast<std::size_t>(f.paths);
  cfg.dt = f.dt;
  cfg.horizon = f.horizon > 0.0 ? f.horizon : 5.0 / model->market.rho;
  cfg.seed = f.seed;
  cfg.threads = *threads;
  if (cfg.dt > cfg.horizon) {
    fmt::print(err, "error: --dt exceeds the horizon\n");
    return exit_usage;
  }

  const auto s = compute_qstar(*model);
  const double theta = model->market.theta;
  std::vector<double> ks{1.0, 2.0};
  if (theta != 1.0 && theta != 2.0) ks.push_back(theta);

  struct MomentRow {
    std::string process;
    double k, analytic;
    McEstimate est;
  };
  std::vector<MomentRow> moments;
  const auto add_moments = [&](const char* name, const ProcessParams& proc, StreamTag tag) {
    for (const double k : ks) {
      moments.push_back({name, k, analytic_moment(proc, k, f.moment_time),
                         estimate_moment(proc, k, f.moment_time, cfg, tag)});
    }
  };
  add_moments("demand", model->demand, StreamTag::demand);
  add_moments("cost", model->cost, StreamTag::cost);

  const double x0 = model->demand.initial;
  const double i0 = model->cost.initial;
  const double v0 = value_v(s, x0, i0);
  const auto policy = evaluate_policy(*model, s.qstar, cfg);
  const double tolerance = std::max(3.0 * policy.std_error, 0.01 * std::abs(v0));
  const bool agrees = std::abs(policy.mean - v0) <= tolerance;

  fmt::print(out, "paths {}, dt {}, horizon {}, seed {}\n", cfg.paths, num(cfg.dt), num(cfg.horizon), cfg.seed);
  fmt::print(out, "moment check at t = {}:\n", num(f.moment_time));
  for (const auto& m : moments) {
    fmt::print(out, "  {:<6} k={:<6} analytic {:<14} estimate {:<14} se {:<12} z {}\n", m.process, num(m.k),
               num(m.analytic), num(m.est.mean), num(m.est.std_error), num(z_score(m.est, m.analytic)));
  }
  fmt::print(out, "policy at q* = {}: {} +/- {} (se {}, stopped {})\n", num(s.qstar), num(policy.mean),
             num(policy.ci95_half_width), num(policy.std_error), num(policy.fraction_stopped));
  fmt::print(out, "analytic V(x0, i0) = {}; {}\n", num(v0), agrees ? "agrees" : "DISAGREES");

  std::vector<ScanRow> scan;
  if (!multipliers.empty()) {
    scan = optimality_scan(*model, s, multipliers, cfg);
    fmt::print(out, "threshold scan (common random numbers):\n");
    for (const auto& r : scan) {
      fmt::print(out, "  x{:<6} threshold {:<14} value {:<14} +/- {}\n", num(r.multiplier), num(r.threshold),
                 num(r.estimate.mean), num(r.estimate.ci95_half_width));
    }
  }

  if (!in.out.empty()) {
    const json flags = {{"paths", cfg.paths},  {"dt", cfg.dt},   {"horizon", cfg.horizon},
                        {"scan", multipliers}, {"moment_time", f.moment_time}};
    OutputSet files(in.out, make_manifest("simulate", in, *model, flags, cfg.seed));
    auto mcsv = files.csv("moments.csv", {"process", "k", "t", "analytic", "estimate", "std_error", "z"});
    for (const auto& m : moments) {
      mcsv.row({m.process, num(m.k), num(f.moment_time), num(m.analytic), num(m.est.mean), num(m.est.std_error),
                num(z_score(m.est, m.analytic))});
    }
    auto pcsv = files.csv("policy.csv", {"threshold", "estimate", "std_error", "ci95", "fraction_stopped",
                                         "analytic_v", "agrees"});
    pcsv.row({num(s.qstar), num(policy.mean), num(policy.std_error), num(policy.ci95_half_width),
              num(policy.fraction_stopped), num(v0), agrees ? "1" : "0"});
    if (!scan.empty()) {
      auto scsv = files.csv("scan.csv", {"multiplier", "threshold", "estimate", "std_error", "ci95",
                                         "fraction_stopped"});
      for (const auto& r : scan) {
        scsv.row({num(r.multiplier), num(r.threshold), num(r.estimate.mean), num(r.estimate.std_error),
                  num(r.estimate.ci95_half_width), num(r.estimate.fraction_stopped)});
      }
    }
    files.finish();
  }
  return exit_ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal investment timing under two jump-diffusions", "jumpstop"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(JUMPSTOP_VERSION));

  Inputs in;
  std::size_t grid_points = 1000;
  std::string param;
  std::string sweep_spec;
  SimFlags sim;

  auto* validate_cmd = app.add_subcommand("validate", "Check admissibility and print demand-parameter domains");
  validate_cmd->add_option("config", in.config, "Model JSON file")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Solve for the threshold and certify the HJB inequalities");
  solve_cmd->add_option("config", in.config, "Model JSON file")->required();
  solve_cmd->add_option("--grid-points", grid_points, "Rows per CSV table and HJB grid size");
  solve_cmd->add_option("--out", in.out, "Output directory for CSV files");

  auto* statics_cmd = app.add_subcommand("statics", "Threshold sensitivities and parameter sweeps");
  statics_cmd->add_option("config", in.config, "Model JSON file")->required();
  statics_cmd->add_option("--param", param, "Parameter name (mu_X, sigma_X, ..., m_I)");
  statics_cmd->add_option("--sweep", sweep_spec, "lo:hi:steps");
  statics_cmd->add_option("--out", in.out, "Output directory for CSV files");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo checks of moments and the threshold policy");
  simulate_cmd->add_option("config", in.config, "Model JSON file")->required();
  simulate_cmd->add_option("--paths", sim.paths, "Number of paths");
  simulate_cmd->add_option("--dt", sim.dt, "Observation step");
  simulate_cmd->add_option("--horizon", sim.horizon, "Horizon T (default 5 / rho)");
  simulate_cmd->add_option("--seed", sim.seed, "Base seed");
  simulate_cmd->add_option("--scan", sim.scan, "Comma-separated threshold multipliers");
  simulate_cmd->add_option("--moment-time", sim.moment_time, "Time at which moments are checked");
  simulate_cmd->add_option("--out", in.out, "Output directory for CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << JUMPSTOP_VERSION << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_usage;
  }

  try {
    if (*validate_cmd) return cmd_validate(in, out, err);
    if (*solve_cmd) return cmd_solve(in, grid_points, out, err);
    if (*statics_cmd) return cmd_statics(in, param, sweep_spec, out, err);
    if (*simulate_cmd) return cmd_simulate(in, sim, out, err);
  } catch (const PreconditionError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_inadmissible;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_usage;
  }
  return exit_usage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("jumpstop");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace jumpstop::cli
