// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "fixtures.hpp"
#include "jumpstop/montecarlo.hpp"
#include "jumpstop/solver.hpp"
#include "jumpstop/statics.hpp"

using namespace jumpstop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // <= 0: no runtime limit
  std::function<Outcome()> body;
};

// Positive root of the no-jump characteristic quadratic, from its
// coefficients written out by hand.
double quadratic_root(const Model& m) {
  const double th = m.market.theta;
  const double vx = m.demand.sigma * m.demand.sigma;
  const double vi = m.cost.sigma * m.cost.sigma;
  const double a = 0.5 * (th * th * vx + vi);
  const double b = th * (m.demand.mu - 0.5 * vx) - (m.cost.mu + 0.5 * vi);
  const double c = m.cost.mu - m.market.rho;
  return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

// Interior points of a log-spaced grid on (lo, hi).
std::vector<double> open_log_grid(double lo, double hi, std::size_t points) {
  auto g = log_grid(lo, hi, points + 2);
  return {g.begin() + 1, g.end() - 1};
}

SimConfig m0_sim() {
  SimConfig c;
  c.dt = 1e-3;
  c.horizon = 5.0 / fixtures::m0().market.rho;
  c.paths = 100000;
  c.seed = 20240601;
  return c;
}

Outcome c1_closed_form() {
  fixtures::Draw draw(101);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto m = fixtures::random_model(draw, false);
    worst = std::max(worst, std::abs(find_r0(m) - quadratic_root(m)));
  }
  return {worst <= 1e-10, fmt::format("max |r0 - quadratic root| = {:.3g} over 50 models", worst)};
}

Outcome c2_identities() {
  fixtures::Draw draw(102);
  double root = 0.0, at0 = 0.0, at1 = 0.0, at1_neg_h = 0.0;
  bool above_one = true, floor_ok = true;
  for (int k = 0; k < 50; ++k) {
    const auto m = fixtures::random_model(draw, true);
    const auto s = compute_qstar(m);
    const double vi = m.cost.sigma * m.cost.sigma;
    root = std::max(root, std::abs(j_eval(m, s.r0)));
    at0 = std::max(at0, std::abs(j_eval(m, 0.0) - (m.cost.mu - m.market.rho)));
    at1 = std::max(at1, std::abs(j_eval(m, 1.0) - (vi - s.h)));
    at1_neg_h = std::max(at1_neg_h, std::abs(j_eval(m, 1.0) + s.h));
    above_one = above_one && s.r0 > 1.0;
    floor_ok = floor_ok && s.qstar >= (m.market.rho - m.cost.mu) / (s.payoff_slope() * s.h);
  }
  const bool pass = root <= 1e-10 && at0 <= 1e-12 && at1 <= 1e-12 && above_one && floor_ok;
  return {pass, fmt::format("max |j(r0)| = {:.3g}, max |j(0) - (mu_I - rho)| = {:.3g}, "
                            "max |j(1) - (sigma_I^2 - h)| = {:.3g} (|j(1) + h| = {:.3g}), r0 > 1: {}, q* floor: {}",
                            root, at0, at1, at1_neg_h, above_one, floor_ok)};
}

Outcome c3_hjb() {
  fixtures::Draw draw(103);
  std::vector<Model> models{fixtures::m0()};
  for (int k = 0; k < 20; ++k) models.push_back(fixtures::random_model(draw, k % 2 == 0));
  double cont = INFINITY, stop = INFINITY, pasting = 0.0;
  for (const auto& m : models) {
    const auto s = compute_qstar(m);
    for (const double q : open_log_grid(s.qstar / 1000.0, s.qstar, 1000)) {
      cont = std::min(cont, value_f(s, q) - payoff_l(s, q));
    }
    for (const double q : open_log_grid(s.qstar, 1000.0 * s.qstar, 1000)) {
      stop = std::min(stop, s.payoff_slope() * s.h * q + (m.cost.mu - m.market.rho));
    }
    const auto gaps = smooth_pasting_check(s);
    pasting = std::max({pasting, gaps.value_gap, gaps.derivative_gap});
  }
  const bool pass = cont >= -1e-12 && stop >= -1e-12 && pasting <= 1e-10;
  return {pass, fmt::format("min f - l = {:.3g}, min stopping slack = {:.3g}, max pasting gap = {:.3g} over {} models",
                            cont, stop, pasting, models.size())};
}

Outcome c4_generator() {
  fixtures::Draw draw(104);
  double worst = 0.0;
  int triples = 0;
  for (int k = 0; k < 50; ++k) {
    auto m = fixtures::random_model(draw, true);
    if (k % 3 == 1) m.demand.jump = JumpSizeSpec::log_normal(-0.1, 0.3);
    if (k % 3 == 2) m.cost.jump = JumpSizeSpec::discrete({{-0.25, 0.3}, {0.1, 0.5}, {0.6, 0.2}});
    for (int t = 0; t < 20; ++t) {
      const double b = draw.uniform(0.01, 10.0);
      const double r = draw.uniform(-3.0, 5.0);
      const double q = std::exp(draw.uniform(-5.0, 5.0));
      const double via_j = apply_generator_power(m, b, r, q);
      const double direct = m.market.rho * b * std::pow(q, r) - generator_power_direct(m, b, r, q);
      const double scale = std::max(std::abs(via_j), std::abs(direct));
      if (scale > 0.0) worst = std::max(worst, std::abs(via_j - direct) / scale);
      ++triples;
    }
  }
  return {worst <= 1e-9, fmt::format("max relative gap = {:.3g} over {} triples", worst, triples)};
}

Outcome c5_moments() {
  auto a = fixtures::m0();
  a.demand.lambda = 0.5;
  a.demand.jump = JumpSizeSpec::deterministic(-0.3);
  a.cost.lambda = 0.3;
  a.cost.jump = JumpSizeSpec::deterministic(0.15);
  auto b = fixtures::m0();
  b.market.theta = 0.7;
  b.demand.lambda = 0.8;
  b.demand.jump = JumpSizeSpec::log_normal(-0.05, 0.2);
  b.cost.lambda = 0.4;
  b.cost.jump = JumpSizeSpec::discrete({{-0.2, 0.5}, {0.25, 0.5}});

  SimConfig cfg;
  cfg.paths = 100000;
  cfg.seed = 555;
  double worst = 0.0;
  int checks = 0;
  for (const auto* m : {&a, &b}) {
    for (const auto& [proc, tag] : {std::pair{&m->demand, StreamTag::demand}, std::pair{&m->cost, StreamTag::cost}}) {
      for (const double k : {1.0, 2.0, m->market.theta}) {
        for (const double t : {0.5, 2.0}) {
          const auto est = estimate_moment(*proc, k, t, cfg, tag);
          worst = std::max(worst, z_score(est, analytic_moment(*proc, k, t)));
          ++checks;
        }
      }
    }
  }
  return {worst <= 3.0, fmt::format("max |z| = {:.3g} over {} moment checks at 1e5 draws", worst, checks)};
}

Outcome c6_policy() {
  const auto m = fixtures::m0();
  const auto s = compute_qstar(m);
  const auto est = evaluate_policy(m, s.qstar, m0_sim());
  const double v = value_v(s, 1.0, 10.0);
  const double tol = std::max(3.0 * est.std_error, 0.01 * v);
  return {std::abs(est.mean - v) <= tol,
          fmt::format("MC {:.6f} (se {:.4f}, stopped {:.3f}) vs V(1,10) = {:.6f}, gap {:.4f}, tolerance {:.4f}",
                      est.mean, est.std_error, est.fraction_stopped, v, std::abs(est.mean - v), tol)};
}

Outcome c7_scan() {
  const auto m = fixtures::m0();
  const auto s = compute_qstar(m);
  const std::vector<double> mult{0.5, 0.75, 1.0, 1.5, 2.0};
  const auto rows = optimality_scan(m, s, mult, m0_sim());
  const auto& star = rows[2].estimate;
  bool pass = true;
  std::string cols;
  for (const auto& r : rows) {
    if (r.estimate.mean - star.mean > star.ci95_half_width) pass = false;
    cols += fmt::format(" x{}={:.4f}", r.multiplier, r.estimate.mean);
  }
  return {pass, fmt::format("q* column {:.4f} +/- {:.4f};{}", star.mean, star.ci95_half_width, cols)};
}

Outcome c8_statics() {
  fixtures::Draw draw(108);
  double worst_gap = 0.0, min_delta = INFINITY;
  bool all_central = true;
  int sign_checks = 0, sign_failures = 0;
  std::string failures;
  for (int k = 0; k < 20; ++k) {
    const auto m = fixtures::random_model(draw, true, 0.4, 1.3);
    const auto s = compute_qstar(m);
    for (const auto p : all_params) {
      const auto rep = dqstar_dy(m, s, p);
      all_central = all_central && rep.fd_mode == FdMode::central;
      worst_gap = std::max(worst_gap, rep.fd_relative_gap);
      min_delta = std::min(min_delta, rep.delta);
    }
    const double theta = m.market.theta;
    const bool demand_scope = 1.0 / s.r0 <= theta && theta <= 1.0;
    const auto expect = [&](ParamId p, int sign) {
      const double d = dqstar_dy(m, s, p).derivative;
      ++sign_checks;
      if (!(sign > 0 ? d > 0.0 : d < 0.0)) {
        ++sign_failures;
        failures += fmt::format(" {}#{}", param_name(p), k);
      }
    };
    if (demand_scope) {
      expect(ParamId::sigma_x, +1);
      expect(ParamId::lambda_x, +1);
    }
    expect(ParamId::mu_i, -1);
    expect(ParamId::sigma_i, +1);
    expect(ParamId::lambda_i, +1);
    expect(ParamId::m_i, *m.cost.jump.deterministic_size() < 0.0 ? -1 : +1);
  }
  const bool pass = all_central && worst_gap <= 1e-5 && min_delta > 0.0 && sign_failures == 0;
  return {pass, fmt::format("max FD relative gap = {:.3g} (all central: {}), min delta = {:.3g}, "
                            "{} sign checks, {} mismatches{}",
                            worst_gap, all_central, min_delta, sign_checks, sign_failures, failures)};
}

Outcome c9_theta_one() {
  auto m = fixtures::m0();
  double worst = 0.0;
  const std::vector<JumpSizeSpec> laws{JumpSizeSpec::deterministic(-0.6), JumpSizeSpec::deterministic(0.9),
                                       JumpSizeSpec::discrete({{-0.5, 0.2}, {0.05, 0.5}, {1.5, 0.3}}),
                                       JumpSizeSpec::log_normal(0.3, 0.5), JumpSizeSpec::log_normal(-0.4, 0.1)};
  for (const auto& law : laws) {
    for (const double lambda : {0.1, 1.0, 7.5}) {
      m.demand.jump = law;
      m.demand.lambda = lambda;
      worst = std::max(worst, std::abs(compute_h(m) - (m.market.rho - m.demand.mu)));
    }
  }
  return {worst <= 1e-14, fmt::format("max |h - (rho - mu_X)| = {:.3g} over 15 jump specs", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome c10_determinism() {
  const auto dir = fs::temp_directory_path() / "jumpstop_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "model.json";
  std::ofstream(cfg) << R"({
  "market": {"rho": 0.12, "theta": 0.8, "kappa0": 0.5, "kappa1": 1.5, "n": 1.0},
  "demand": {"mu": 0.04, "sigma": 0.2, "lambda": 0.5,
             "jump": {"kind": "deterministic", "m": -0.2}, "initial": 1.0},
  "cost":   {"mu": 0.01, "sigma": 0.1, "lambda": 0.3,
             "jump": {"kind": "lognormal", "a": 0.1, "b": 0.05}, "initial": 10.0}
})";
  const auto simulate = [&](const char* threads, const std::string& name) {
    ::setenv("JUMPSTOP_THREADS", threads, 1);
    std::ostringstream out, err;
    const int code = cli::run({"simulate", cfg.string(), "--paths", "4000", "--dt", "0.01", "--seed", "77", "--scan",
                               "0.5,1,2", "--out", (dir / name).string()},
                              out, err);
    ::unsetenv("JUMPSTOP_THREADS");
    return code;
  };
  const int a = simulate("1", "t1");
  const int b = simulate("8", "t8");
  const int c = simulate("1", "t1_again");
  bool same = a == 0 && b == 0 && c == 0;
  int files = 0;
  for (const char* f : {"moments.csv", "policy.csv", "scan.csv"}) {
    const auto ref = slurp(dir / "t1" / f);
    same = same && !ref.empty() && ref == slurp(dir / "t8" / f) && ref == slurp(dir / "t1_again" / f);
    ++files;
  }
  fs::remove_all(dir);
  return {same, fmt::format("{} CSVs compared across JUMPSTOP_THREADS=1, 8 and a repeat run (exit codes {}, {}, {})",
                            files, a, b, c)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form reduction oracle", 1.0, c1_closed_form},
      {2, "root and boundary identities", 5.0, c2_identities},
      {3, "HJB certification", 5.0, c3_hjb},
      {4, "generator identity", 1.0, c4_generator},
      {5, "moment verification", 30.0, c5_moments},
      {6, "policy-value agreement", 120.0, c6_policy},
      {7, "optimality scan", 300.0, c7_scan},
      {8, "comparative statics", 30.0, c8_statics},
      {9, "theta = 1 compensation identity", 1.0, c9_theta_one},
      {10, "determinism", 0.0, c10_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0.0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    const std::string timing = c.limit_seconds > 0.0 ? fmt::format("{:.2f} s, limit {:g} s", secs, c.limit_seconds)
                                                     : fmt::format("{:.2f} s", secs);
    std::cout << fmt::format("[{}] {:>2}. {}: {} ({}{})", pass ? "PASS" : "FAIL", c.id, c.name, o.detail, timing,
                             in_time ? "" : ", over time limit")
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
