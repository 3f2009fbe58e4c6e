#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jumpstop/model.hpp"
#include "jumpstop/random.hpp"
#include "jumpstop/solver.hpp"

namespace jumpstop {

// What an unexercised path is worth at the horizon.
enum class Truncation {
  zero,               // contributes nothing
  exercise_at_horizon // invests at T if g(X_T, I_T) > 0
};

struct SimConfig {
  double horizon = 50.0;
  double dt = 1e-3;
  std::size_t paths = 100000;
  std::uint64_t seed = 20240601;
  Truncation truncation = Truncation::zero;
  unsigned threads = 0;  // 0: hardware concurrency

  void check() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_half_width = 0.0;
  std::size_t paths = 0;
  double fraction_stopped = 0.0;
};

inline constexpr double z95 = 1.959964;

/// Mean and standard error of `samples`, reduced by pairwise summation in
/// index order.
McEstimate summarize(std::span<const double> samples);

/// Exact draw of Y_t (no time discretisation).
double sample_terminal(const ProcessParams& process, double t, Rng& rng);

/// E[Y_t^k] / y0^k in closed form.
double analytic_moment(const ProcessParams& process, double k, double t);

/// Empirical E[Y_t^k] / y0^k over config.paths exact draws taken from the
/// `tag` substreams.
McEstimate estimate_moment(const ProcessParams& process, double k, double t, const SimConfig& config,
                           StreamTag tag = StreamTag::terminal);

/// |estimate - analytic| / SE; zero when both agree exactly.
double z_score(const McEstimate& estimate, double analytic);

enum class EventKind { start, grid, demand_jump, cost_jump };

struct Observation {
  double t;
  double x;
  double i;
  double q;
  EventKind kind;
};

using Path = std::vector<Observation>;

/// Simulates both processes on the merged grid of uniform steps and jump
/// times. Continuous parts are advanced by exact lognormal increments.
std::vector<Path> simulate_paths(const Model& model, const SimConfig& config);

/// Value of "invest the first time Q >= threshold", discounted at rho.
McEstimate evaluate_policy(const Model& model, double threshold, const SimConfig& config);

struct ScanRow {
  double multiplier;
  double threshold;
  McEstimate estimate;
};

/// Policy values at multiplier * q*, all on one shared path ensemble.
std::vector<ScanRow> optimality_scan(const Model& model, const Solution& solution,
                                     std::span<const double> multipliers, const SimConfig& config);

}  // namespace jumpstop
