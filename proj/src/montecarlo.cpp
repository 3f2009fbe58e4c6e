#include "jumpstop/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "jumpstop/errors.hpp"

namespace jumpstop {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

unsigned worker_count(const SimConfig& config, std::size_t work) {
  unsigned n = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Runs fn(path) for every path index. Each path owns its random streams, so
// the split over threads cannot change any result.
template <class Fn>
void for_each_path(std::size_t paths, unsigned threads, Fn&& fn) {
  if (threads <= 1) {
    for (std::size_t p = 0; p < paths; ++p) fn(p);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (paths + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(paths, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t p = begin; p < end; ++p) fn(p);
    });
  }
}

// One continuous-plus-jump process in log space on its own random stream.
class LogProcess {
 public:
  LogProcess(const ProcessParams& params, Rng rng)
      : rng_(std::move(rng)),
        params_(&params),
        level_(std::log(params.initial)),
        drift_(params.mu - 0.5 * params.sigma * params.sigma - params.lambda * mean_jump(params.jump)),
        next_jump_(draw_wait(0.0)) {}

  double level() const { return level_; }
  double next_jump() const { return next_jump_; }

  void diffuse(double dt) {
    level_ += drift_ * dt;
    if (params_->sigma > 0.0) {
      if (dt != last_dt_) {
        last_dt_ = dt;
        scale_ = params_->sigma * std::sqrt(dt);
      }
      level_ += scale_ * normal_(rng_);
    }
  }

  void jump(double now) {
    level_ += std::log(sample_factor(params_->jump, rng_));
    next_jump_ = draw_wait(now);
  }

 private:
  double draw_wait(double now) {
    if (params_->lambda <= 0.0) return inf;
    return now + boost::random::exponential_distribution<double>(params_->lambda)(rng_);
  }

  Rng rng_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  const ProcessParams* params_;
  double level_;
  double drift_;
  double next_jump_;
  double last_dt_ = -1.0;
  double scale_ = 0.0;
};

// Walks one path of (X, I) through the merged grid of uniform steps and
// jump times up to the horizon.
class PathWalker {
 public:
  PathWalker(const Model& model, const SimConfig& config, std::uint64_t path)
      : x_(model.demand, substream(config.seed, path, StreamTag::demand)),
        i_(model.cost, substream(config.seed, path, StreamTag::cost)),
        theta_(model.market.theta),
        dt_(config.dt),
        horizon_(config.horizon) {}

  double t() const { return t_; }
  double log_x() const { return x_.level(); }
  double log_i() const { return i_.level(); }
  double log_q() const { return theta_ * x_.level() - i_.level(); }
  bool done() const { return t_ >= horizon_; }

  EventKind advance() {
    const double grid = std::min(static_cast<double>(step_ + 1) * dt_, horizon_);
    double next = grid;
    EventKind kind = EventKind::grid;
    if (x_.next_jump() < next) {
      next = x_.next_jump();
      kind = EventKind::demand_jump;
    }
    if (i_.next_jump() < next) {
      next = i_.next_jump();
      kind = EventKind::cost_jump;
    }
    const double dt = next - t_;
    x_.diffuse(dt);
    i_.diffuse(dt);
    t_ = next;
    switch (kind) {
      case EventKind::demand_jump: x_.jump(t_); break;
      case EventKind::cost_jump: i_.jump(t_); break;
      default: ++step_; break;
    }
    return kind;
  }

 private:
  LogProcess x_;
  LogProcess i_;
  double theta_;
  double dt_;
  double horizon_;
  double t_ = 0.0;
  std::size_t step_ = 0;
};

struct PolicyOutcome {
  std::vector<std::vector<double>> payoffs;  // [threshold][path]
  std::vector<std::size_t> stopped;          // per threshold
};

// Values every threshold on the same paths. Lower thresholds never stop
// later than higher ones, so one cursor over the sorted list suffices.
PolicyOutcome run_policies(const Model& model, std::span<const double> thresholds, const SimConfig& config) {
  config.check();
  check_structure(model);
  for (const double b : thresholds) {
    if (!(b > 0.0)) throw DomainError("policy threshold must be > 0");
  }
  const double slope = (model.market.kappa1 - model.market.kappa0) * compute_a(compute_h(model), model.market.n);
  const double rho = model.market.rho;
  const double theta = model.market.theta;

  std::vector<std::size_t> order(thresholds.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return thresholds[a] < thresholds[b]; });
  std::vector<double> log_thr(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) log_thr[k] = std::log(thresholds[order[k]]);

  PolicyOutcome out;
  out.payoffs.assign(thresholds.size(), std::vector<double>(config.paths, 0.0));
  std::vector<std::vector<unsigned char>> hit(thresholds.size(), std::vector<unsigned char>(config.paths, 0));

  const auto payoff = [&](double t, double lx, double li) {
    return std::exp(-rho * t) * (slope * std::exp(theta * lx) - std::exp(li));
  };

  for_each_path(config.paths, worker_count(config, config.paths), [&](std::size_t path) {
    PathWalker walker(model, config, path);
    std::size_t cursor = 0;
    const auto settle = [&] {
      const double lq = walker.log_q();
      while (cursor < log_thr.size() && lq >= log_thr[cursor]) {
        const std::size_t idx = order[cursor];
        out.payoffs[idx][path] = payoff(walker.t(), walker.log_x(), walker.log_i());
        hit[idx][path] = 1;
        ++cursor;
      }
    };
    settle();
    while (cursor < log_thr.size() && !walker.done()) {
      walker.advance();
      settle();
    }
    if (config.truncation == Truncation::exercise_at_horizon && cursor < log_thr.size()) {
      const double v = std::max(0.0, payoff(walker.t(), walker.log_x(), walker.log_i()));
      for (std::size_t c = cursor; c < log_thr.size(); ++c) out.payoffs[order[c]][path] = v;
    }
  });

  out.stopped.assign(thresholds.size(), 0);
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    for (const auto h : hit[k]) out.stopped[k] += h;
  }
  return out;
}

McEstimate finish(std::span<const double> payoffs, std::size_t stopped) {
  auto est = summarize(payoffs);
  est.fraction_stopped = static_cast<double>(stopped) / static_cast<double>(payoffs.size());
  return est;
}

}  // namespace

void SimConfig::check() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("simulation horizon must be > 0");
  if (!(dt > 0.0) || !(dt <= horizon)) throw DomainError("simulation step must satisfy 0 < dt <= horizon");
  if (paths < 2) throw DomainError("simulation needs at least 2 paths");
}

McEstimate summarize(std::span<const double> samples) {
  McEstimate e;
  e.paths = samples.size();
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.mean = pairwise_sum(samples) / n;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double d = samples[k] - e.mean;
      sq[k] = d * d;
    }
    e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  e.ci95_half_width = z95 * e.std_error;
  return e;
}

double sample_terminal(const ProcessParams& process, double t, Rng& rng) {
  if (!(t > 0.0)) throw DomainError("sample_terminal: t must be > 0");
  const double m = mean_jump(process.jump);
  double log_y = std::log(process.initial) +
                 (process.mu - 0.5 * process.sigma * process.sigma - process.lambda * m) * t;
  if (process.sigma > 0.0) {
    log_y += process.sigma * std::sqrt(t) * std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  if (process.lambda > 0.0) {
    const auto jumps = std::poisson_distribution<long>(process.lambda * t)(rng);
    for (long k = 0; k < jumps; ++k) log_y += std::log(sample_factor(process.jump, rng));
  }
  return std::exp(log_y);
}

double analytic_moment(const ProcessParams& process, double k, double t) {
  const double var = process.sigma * process.sigma;
  const double m = mean_jump(process.jump);
  double rate = (process.mu + (k - 1.0) * 0.5 * var - process.lambda * m) * k;
  if (process.lambda != 0.0) rate += process.lambda * (power_moment(process.jump, k) - 1.0);
  return std::exp(rate * t);
}

McEstimate estimate_moment(const ProcessParams& process, double k, double t, const SimConfig& config,
                           StreamTag tag) {
  config.check();
  std::vector<double> samples(config.paths);
  for_each_path(config.paths, worker_count(config, config.paths), [&](std::size_t path) {
    Rng rng = substream(config.seed, path, tag);
    samples[path] = std::pow(sample_terminal(process, t, rng) / process.initial, k);
  });
  auto est = summarize(samples);
  est.fraction_stopped = 0.0;
  return est;
}

double z_score(const McEstimate& estimate, double analytic) {
  const double gap = std::abs(estimate.mean - analytic);
  if (gap == 0.0) return 0.0;
  if (estimate.std_error == 0.0) return inf;
  return gap / estimate.std_error;
}

std::vector<Path> simulate_paths(const Model& model, const SimConfig& config) {
  check_structure(model);
  if (!(config.horizon > 0.0) || !(config.dt > 0.0) || config.dt > config.horizon || config.paths == 0) {
    throw DomainError("simulate_paths: need 0 < dt <= horizon and at least one path");
  }
  std::vector<Path> ensemble(config.paths);
  for_each_path(config.paths, worker_count(config, config.paths), [&](std::size_t path) {
    PathWalker walker(model, config, path);
    auto& obs = ensemble[path];
    const auto record = [&](EventKind kind) {
      obs.push_back({walker.t(), std::exp(walker.log_x()), std::exp(walker.log_i()), std::exp(walker.log_q()),
                     kind});
    };
    record(EventKind::start);
    while (!walker.done()) record(walker.advance());
  });
  return ensemble;
}

McEstimate evaluate_policy(const Model& model, double threshold, const SimConfig& config) {
  const double thr[] = {threshold};
  const auto out = run_policies(model, thr, config);
  return finish(out.payoffs[0], out.stopped[0]);
}

std::vector<ScanRow> optimality_scan(const Model& model, const Solution& solution,
                                     std::span<const double> multipliers, const SimConfig& config) {
  std::vector<double> thresholds;
  thresholds.reserve(multipliers.size());
  for (const double m : multipliers) {
    if (!(m > 0.0)) throw DomainError("optimality_scan: multipliers must be > 0");
    thresholds.push_back(m * solution.qstar);
  }
  const auto out = run_policies(model, thresholds, config);
  std::vector<ScanRow> rows;
  rows.reserve(multipliers.size());
  for (std::size_t k = 0; k < multipliers.size(); ++k) {
    rows.push_back({multipliers[k], thresholds[k], finish(out.payoffs[k], out.stopped[k])});
  }
  return rows;
}

}  // namespace jumpstop
