#include "jumpstop/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "jumpstop/errors.hpp"

namespace jumpstop {

namespace {

constexpr double root_tolerance = 1e-10;
constexpr double bracket_limit = 1099511627776.0;  // 2^40
constexpr int max_iterations = 200;

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericRangeError(std::string(what) + ": non-finite intermediate value");
  return v;
}

// Coefficients of the polynomial part of j.
struct JCoefficients {
  double quadratic;
  double linear;
  double constant;
};

JCoefficients j_coefficients(const Model& model) {
  const auto& x = model.demand;
  const auto& c = model.cost;
  const double theta = model.market.theta;
  const double var_x = x.sigma * x.sigma;
  const double var_i = c.sigma * c.sigma;
  const double m_x = mean_jump(x.jump);
  const double m_i = mean_jump(c.jump);
  return {
      0.5 * var_x * theta * theta + 0.5 * var_i,
      (x.mu - 0.5 * var_x - x.lambda * m_x) * theta - (c.mu + 0.5 * var_i - c.lambda * m_i),
      (c.mu - c.lambda * m_i) - (x.lambda + c.lambda) - model.market.rho,
  };
}

}  // namespace

double compute_h(const Model& model) {
  const auto& x = model.demand;
  const double theta = model.market.theta;
  double h = model.market.rho - theta * x.mu - theta * (theta - 1.0) * 0.5 * x.sigma * x.sigma;
  if (x.lambda != 0.0) {
    // theta m - (E[(1+U)^theta] - 1): the compensator and the jump moment
    // cancel exactly at theta = 1.
    h += x.lambda * (theta * mean_jump(x.jump) - (power_moment(x.jump, theta) - 1.0));
  }
  return h;
}

double compute_a(double h, double n) {
  if (!(h > 0.0)) {
    throw DivergentPerpetuityError("A = e^{-hn}/h needs h > 0, got h = " + std::to_string(h));
  }
  if (!(n >= 0.0)) throw DomainError("A: lag n must be >= 0");
  return std::exp(-h * n) / h;
}

double j_eval(const Model& model, double r) {
  const auto k = j_coefficients(model);
  double v = (k.quadratic * r + k.linear) * r + k.constant;
  if (model.demand.lambda != 0.0) {
    v += model.demand.lambda * power_moment(model.demand.jump, r * model.market.theta);
  }
  if (model.cost.lambda != 0.0) {
    v += model.cost.lambda * power_moment(model.cost.jump, 1.0 - r);
  }
  return v;
}

double j_derivative(const Model& model, double r) {
  const auto k = j_coefficients(model);
  const double theta = model.market.theta;
  double v = 2.0 * k.quadratic * r + k.linear;
  if (model.demand.lambda != 0.0) {
    v += model.demand.lambda * theta * power_moment_slope(model.demand.jump, r * theta);
  }
  if (model.cost.lambda != 0.0) {
    v -= model.cost.lambda * power_moment_slope(model.cost.jump, 1.0 - r);
  }
  return v;
}

double j_second_derivative(const Model& model, double r) {
  const auto k = j_coefficients(model);
  const double theta = model.market.theta;
  double v = 2.0 * k.quadratic;
  if (model.demand.lambda != 0.0) {
    v += model.demand.lambda * theta * theta * power_moment_curvature(model.demand.jump, r * theta);
  }
  if (model.cost.lambda != 0.0) {
    v += model.cost.lambda * power_moment_curvature(model.cost.jump, 1.0 - r);
  }
  return v;
}

double find_r0(const Model& model) {
  const auto report = validate(model);
  if (!report.valid) {
    throw PreconditionError(std::string("find_r0: model is not admissible (") +
                            to_string(report.classification) + ")");
  }

  // j(1) = -h < 0, so the root lies above 1.
  double lo = 1.0;
  double hi = 2.0;
  double f_hi = finite_or_throw(j_eval(model, hi), "find_r0");
  while (!(f_hi > 0.0)) {
    lo = hi;
    hi *= 2.0;
    if (hi > bracket_limit) throw NoRootError("find_r0: no sign change of j below 2^40");
    f_hi = finite_or_throw(j_eval(model, hi), "find_r0");
  }

  // Newton from the right edge of a convex increasing function approaches
  // the root monotonically; bisection catches anything leaving the bracket.
  double r = hi;
  double f = f_hi;
  double best_r = r;
  double best_f = f;
  for (int it = 0; it < max_iterations; ++it) {
    if (std::abs(f) < std::abs(best_f)) {
      best_r = r;
      best_f = f;
    }
    if (f == 0.0) break;
    if (f > 0.0) {
      hi = r;
    } else {
      lo = r;
    }
    const double slope = j_derivative(model, r);
    double next = r - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool tiny_step = std::abs(next - r) <= 4.0 * std::numeric_limits<double>::epsilon() * r;
    if (tiny_step || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      if (std::abs(best_f) <= root_tolerance) break;
    }
    if (next == r) break;
    r = next;
    f = finite_or_throw(j_eval(model, r), "find_r0");
  }
  if (std::abs(f) < std::abs(best_f)) {
    best_r = r;
    best_f = f;
  }
  if (!(std::abs(best_f) <= root_tolerance)) {
    throw NoRootError("find_r0: residual " + std::to_string(best_f) + " above tolerance");
  }
  return best_r;
}

Solution compute_qstar(const Model& model) {
  Solution s;
  s.model = model;
  s.r0 = find_r0(model);
  s.root_residual = std::abs(j_eval(model, s.r0));
  s.h = compute_h(model);
  s.a = compute_a(s.h, model.market.n);
  s.qstar = finite_or_throw(s.r0 / (s.payoff_slope() * (s.r0 - 1.0)), "compute_qstar");

  const double floor_q = (model.market.rho - model.cost.mu) / (s.payoff_slope() * s.h);
  if (s.qstar < floor_q * (1.0 - 1e-12)) {
    throw NumericRangeError("compute_qstar: threshold below the myopic bound");
  }
  return s;
}

double payoff_l(const Solution& solution, double q) { return solution.payoff_slope() * q - 1.0; }

double value_f(const Solution& s, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("value_f: q must be finite and > 0");
  if (q < s.qstar) return std::pow(q / s.qstar, s.r0) / (s.r0 - 1.0);
  return payoff_l(s, q);
}

double value_f_derivative(const Solution& s, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("value_f_derivative: q must be finite and > 0");
  if (q < s.qstar) return s.r0 / ((s.r0 - 1.0) * s.qstar) * std::pow(q / s.qstar, s.r0 - 1.0);
  return s.payoff_slope();
}

double value_v(const Solution& s, double x, double i) {
  if (!(x > 0.0) || !(i > 0.0)) throw DomainError("value_v: x and i must be > 0");
  return i * value_f(s, std::pow(x, s.model.market.theta) / i);
}

double payoff_g(const Model& model, double x, double i) {
  if (!(x > 0.0) || !(i > 0.0)) throw DomainError("payoff_g: x and i must be > 0");
  const double a = compute_a(compute_h(model), model.market.n);
  return (model.market.kappa1 - model.market.kappa0) * a * std::pow(x, model.market.theta) - i;
}

double apply_generator_power(const Model& model, double b, double r, double q) {
  if (!(q > 0.0)) throw DomainError("apply_generator_power: q must be > 0");
  return -b * std::pow(q, r) * j_eval(model, r);
}

double generator_power_direct(const Model& model, double b, double r, double q) {
  if (!(q > 0.0)) throw DomainError("generator_power_direct: q must be > 0");
  const auto& x = model.demand;
  const auto& c = model.cost;
  const double theta = model.market.theta;
  const double var_x = x.sigma * x.sigma;
  const double var_i = c.sigma * c.sigma;
  const double m_x = mean_jump(x.jump);
  const double m_i = mean_jump(c.jump);

  const double zeta = b * std::pow(q, r);
  const double dzeta = b * r * std::pow(q, r - 1.0);
  const double d2zeta = b * r * (r - 1.0) * std::pow(q, r - 2.0);

  const double diffusion = 0.5 * (theta * theta * var_x + var_i) * q * q * d2zeta;
  const double drift =
      ((x.mu + (theta - 1.0) * 0.5 * var_x - x.lambda * m_x) * theta - (c.mu - c.lambda * m_i)) * q * dzeta;
  const double killing = ((c.mu - c.lambda * m_i) - (x.lambda + c.lambda)) * zeta;
  // E[zeta(q (1+U_X)^theta)] and E[(1+U_I) zeta(q / (1+U_I))]
  double jumps = 0.0;
  if (x.lambda != 0.0) jumps += x.lambda * zeta * power_moment(x.jump, theta * r);
  if (c.lambda != 0.0) jumps += c.lambda * zeta * power_moment(c.jump, 1.0 - r);
  return diffusion + drift + killing + jumps;
}

double stopping_slack_direct(const Solution& s, double q) {
  const double rho = s.model.market.rho;
  const double generator =
      generator_power_direct(s.model, s.payoff_slope(), 1.0, q) + generator_power_direct(s.model, -1.0, 0.0, q);
  return rho * payoff_l(s, q) - generator;
}

double stopping_slack(const Solution& s, double q) {
  return s.payoff_slope() * s.h * q + (s.model.cost.mu - s.model.market.rho);
}

HjbResiduals hjb_residuals(const Solution& s, std::span<const double> grid) {
  if (grid.empty()) throw DomainError("hjb_residuals: empty grid");
  constexpr double inf = std::numeric_limits<double>::infinity();
  HjbResiduals out{inf, inf, 0.0, 0, 0};
  const double b = 1.0 / ((s.r0 - 1.0) * std::pow(s.qstar, s.r0));
  for (const double q : grid) {
    if (!(q > 0.0)) throw DomainError("hjb_residuals: grid points must be > 0");
    if (q < s.qstar) {
      out.min_continuation_slack = std::min(out.min_continuation_slack, value_f(s, q) - payoff_l(s, q));
      out.max_continuation_equation =
          std::max(out.max_continuation_equation, std::abs(apply_generator_power(s.model, b, s.r0, q)));
      ++out.continuation_points;
    } else {
      out.min_stopping_slack = std::min(out.min_stopping_slack, stopping_slack(s, q));
      ++out.stopping_points;
    }
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log_grid: need 0 < lo <= hi");
  std::vector<double> g;
  if (points == 0) return g;
  g.reserve(points);
  if (points == 1) {
    g.push_back(lo);
    return g;
  }
  const double a = std::log(lo);
  const double span = std::log(hi) - a;
  for (std::size_t k = 0; k < points; ++k) {
    g.push_back(std::exp(a + span * static_cast<double>(k) / static_cast<double>(points - 1)));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_hjb_grid(const Solution& s, std::size_t points) {
  return log_grid(s.qstar / 1000.0, s.qstar * 1000.0, points);
}

PastingGaps smooth_pasting_check(const Solution& s) { return smooth_pasting_check(s, s.qstar); }

PastingGaps smooth_pasting_check(const Solution& s, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("smooth_pasting_check: threshold must be > 0");
  // Left limits of the power branch glued at `threshold`.
  const double left_value = 1.0 / (s.r0 - 1.0);
  const double left_slope = s.r0 / ((s.r0 - 1.0) * threshold);
  return {std::abs(left_value - payoff_l(s, threshold)), std::abs(left_slope - s.payoff_slope())};
}

std::vector<BoundaryPoint> boundary_curve(const Solution& s, std::span<const double> xs) {
  std::vector<BoundaryPoint> out;
  out.reserve(xs.size());
  for (const double x : xs) {
    if (!(x > 0.0)) throw DomainError("boundary_curve: x must be > 0");
    out.push_back({x, std::pow(x, s.model.market.theta) / s.qstar});
  }
  return out;
}

bool in_continuation(const Solution& s, double x, double i) {
  if (!(x > 0.0) || !(i > 0.0)) throw DomainError("in_continuation: x and i must be > 0");
  return std::pow(x, s.model.market.theta) / i < s.qstar;
}

}  // namespace jumpstop
