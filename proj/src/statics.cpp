#include "jumpstop/statics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "jumpstop/errors.hpp"

namespace jumpstop {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const ProcessParams& process_of(const Model& model, ParamId p) {
  return is_demand_param(p) ? model.demand : model.cost;
}

ProcessParams& process_of(Model& model, ParamId p) {
  return is_demand_param(p) ? model.demand : model.cost;
}

double deterministic_jump(const ProcessParams& process, ParamId p) {
  const auto m = process.jump.deterministic_size();
  if (!m) {
    throw UnsupportedAnalyticError(fmt::format(
        "{}: closed-form sensitivity needs deterministic jump sizes ({} law given); use a sweep",
        param_name(p), process.jump.kind_name()));
  }
  return *m;
}

std::optional<double> solve_threshold(const Model& model) {
  try {
    check_structure(model);
    if (!is_admissible(model)) return std::nullopt;
    return compute_qstar(model).qstar;
  } catch (const StructuralError&) {
    return std::nullopt;
  }
}

std::optional<Model> try_with_param(const Model& model, ParamId p, double value) {
  try {
    Model out = with_param(model, p, value);
    check_structure(out);
    return out;
  } catch (const StructuralError&) {
    return std::nullopt;
  }
}

SignClass by_sign(double v) {
  if (v > 0.0) return SignClass::increasing;
  if (v < 0.0) return SignClass::decreasing;
  return SignClass::non_monotonic_here;
}

SignClass by_jump_side(double m) {
  if (m > 0.0) return SignClass::increasing;
  if (m < 0.0) return SignClass::decreasing;
  return SignClass::non_monotonic_here;
}

}  // namespace

std::string_view param_name(ParamId p) {
  switch (p) {
    case ParamId::mu_x: return "mu_X";
    case ParamId::sigma_x: return "sigma_X";
    case ParamId::lambda_x: return "lambda_X";
    case ParamId::m_x: return "m_X";
    case ParamId::mu_i: return "mu_I";
    case ParamId::sigma_i: return "sigma_I";
    case ParamId::lambda_i: return "lambda_I";
    case ParamId::m_i: return "m_I";
  }
  return "?";
}

std::optional<ParamId> parse_param(std::string_view name) {
  for (const auto p : all_params) {
    if (param_name(p) == name) return p;
  }
  return std::nullopt;
}

bool is_demand_param(ParamId p) {
  return p == ParamId::mu_x || p == ParamId::sigma_x || p == ParamId::lambda_x || p == ParamId::m_x;
}

bool is_jump_param(ParamId p) {
  return p == ParamId::lambda_x || p == ParamId::m_x || p == ParamId::lambda_i || p == ParamId::m_i;
}

double get_param(const Model& model, ParamId p) {
  const auto& proc = process_of(model, p);
  switch (p) {
    case ParamId::mu_x:
    case ParamId::mu_i: return proc.mu;
    case ParamId::sigma_x:
    case ParamId::sigma_i: return proc.sigma;
    case ParamId::lambda_x:
    case ParamId::lambda_i: return proc.lambda;
    case ParamId::m_x:
    case ParamId::m_i: return mean_jump(proc.jump);
  }
  return nan;
}

Model with_param(Model model, ParamId p, double value) {
  auto& proc = process_of(model, p);
  switch (p) {
    case ParamId::mu_x:
    case ParamId::mu_i: proc.mu = value; break;
    case ParamId::sigma_x:
    case ParamId::sigma_i: proc.sigma = value; break;
    case ParamId::lambda_x:
    case ParamId::lambda_i: proc.lambda = value; break;
    case ParamId::m_x:
    case ParamId::m_i:
      deterministic_jump(proc, p);
      proc.jump = JumpSizeSpec::deterministic(value);
      break;
  }
  return model;
}

double theta_fn(const Model& model, double r) {
  const double m = deterministic_jump(model.cost, ParamId::lambda_i);
  return m * (r - 1.0) + std::pow(1.0 + m, 1.0 - r) - 1.0;
}

Partials partials(const Model& model, const Solution& solution, ParamId p) {
  const double theta = model.market.theta;
  const double r = solution.r0;
  const auto& x = model.demand;
  const auto& c = model.cost;
  switch (p) {
    case ParamId::mu_x: return {-theta, theta * r};
    case ParamId::sigma_x:
      return {-theta * (theta - 1.0) * x.sigma, theta * r * (theta * r - 1.0) * x.sigma};
    case ParamId::lambda_x: {
      const double m = deterministic_jump(x, p);
      return {-upsilon(theta, m), upsilon(theta * r, m)};
    }
    case ParamId::m_x: {
      // d/dm of -lambda((1+m)^theta - 1 - theta m) is theta lambda (1 - (1+m)^{theta-1}).
      const double m = deterministic_jump(x, p);
      return {theta * x.lambda * phi(theta - 1.0, m), -theta * r * x.lambda * phi(theta * r - 1.0, m)};
    }
    case ParamId::mu_i: return {std::nullopt, 1.0 - r};
    case ParamId::sigma_i: return {std::nullopt, c.sigma * r * (r - 1.0)};
    case ParamId::lambda_i: return {std::nullopt, theta_fn(model, r)};
    case ParamId::m_i: {
      const double m = deterministic_jump(c, p);
      return {std::nullopt, c.lambda * (r - 1.0) * phi(-r, m)};
    }
  }
  return {std::nullopt, nan};
}

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::increasing: return "increasing";
    case SignClass::decreasing: return "decreasing";
    case SignClass::non_monotonic_here: return "non-monotonic-at-this-point";
    case SignClass::not_classified: return "not-classified";
  }
  return "?";
}

const char* to_string(FdMode m) {
  switch (m) {
    case FdMode::central: return "central";
    case FdMode::one_sided: return "one-sided";
    case FdMode::unavailable: return "unavailable";
  }
  return "?";
}

double relative_gap(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

SensitivityReport dqstar_dy(const Model& model, const Solution& solution, ParamId p) {
  const auto part = partials(model, solution, p);
  const double r = solution.r0;
  const double delta = j_derivative(model, r);
  const double pre = 1.0 / (delta * solution.kappa_gap() * solution.a * (r - 1.0) * (r - 1.0));
  double derivative = pre * part.dj_dy;
  if (part.dh_dy) {
    const double h = solution.h;
    const double n = model.market.n;
    derivative = pre * (delta * r * (r - 1.0) * (n * h + 1.0) / h * *part.dh_dy + part.dj_dy);
  }

  SensitivityReport rep{};
  rep.param = p;
  rep.derivative = derivative;
  rep.delta = delta;
  rep.dh_dy = part.dh_dy;
  rep.dj_dy = part.dj_dy;

  const double y = get_param(model, p);
  const double scale = std::max(1.0, std::abs(y));
  const double eps = 1e-6 * scale;
  std::optional<double> up;
  std::optional<double> down;
  if (auto m = try_with_param(model, p, y + eps)) up = solve_threshold(*m);
  if (auto m = try_with_param(model, p, y - eps)) down = solve_threshold(*m);
  if (up && down) {
    rep.fd_mode = FdMode::central;
    rep.fd_estimate = (*up - *down) / (2.0 * eps);
    rep.fd_tolerance = 1e-5;
  } else if (up || down) {
    rep.fd_mode = FdMode::one_sided;
    rep.fd_estimate = up ? (*up - solution.qstar) / eps : (solution.qstar - *down) / eps;
    rep.fd_tolerance = 1e-4;
  } else {
    rep.fd_mode = FdMode::unavailable;
    rep.fd_estimate = nan;
    rep.fd_tolerance = nan;
  }
  // Derivatives below 1e-4 in elasticity units are compared absolutely.
  rep.fd_relative_gap = rep.fd_mode == FdMode::unavailable
                            ? nan
                            : relative_gap(derivative, rep.fd_estimate, 1e-4 * solution.qstar / scale);

  rep.sign = by_sign(derivative);
  rep.sign_from_table = false;
  for (const auto& row : sign_table(model, solution)) {
    if (row.param == p && row.in_scope && row.predicted != SignClass::not_classified) {
      rep.sign = row.predicted;
      rep.sign_from_table = true;
    }
  }
  return rep;
}

std::vector<SignRow> sign_table(const Model& model, const Solution& solution) {
  const double theta = model.market.theta;
  const double r = solution.r0;
  const bool demand_scope = 1.0 / r <= theta && theta <= 1.0;
  const auto& x = model.demand;
  const auto& c = model.cost;
  const std::string out_of_scope = fmt::format("theta = {:.9g} outside [1/r0, 1] = [{:.9g}, 1]", theta, 1.0 / r);
  constexpr auto nc = SignClass::not_classified;

  std::vector<SignRow> rows;

  rows.push_back({ParamId::mu_x, nc, false, "not monotonic in general: h and j move in opposite directions"});

  if (demand_scope) {
    rows.push_back({ParamId::sigma_x, SignClass::increasing, true, "increases with demand volatility"});
  } else {
    rows.push_back({ParamId::sigma_x, nc, false, out_of_scope});
  }

  const auto m_x = x.jump.deterministic_size();
  if (!demand_scope) {
    rows.push_back({ParamId::lambda_x, nc, false, out_of_scope});
    rows.push_back({ParamId::m_x, nc, false, out_of_scope});
  } else if (!m_x) {
    rows.push_back({ParamId::lambda_x, nc, true, "random jump law: no closed form, use a sweep"});
    rows.push_back({ParamId::m_x, nc, true, "random jump law: no closed form, use a sweep"});
  } else {
    if (*m_x == 0.0) {
      rows.push_back({ParamId::lambda_x, nc, true, "m_X = 0: jump intensity has no effect"});
    } else {
      rows.push_back({ParamId::lambda_x, SignClass::increasing, true, "increases with demand jump intensity"});
    }
    if (x.lambda == 0.0) {
      rows.push_back({ParamId::m_x, nc, true, "lambda_X = 0: jump size has no effect"});
    } else {
      const auto dom = demand_domain(model);
      const double d = dom.d.value_or(nan);
      std::string desc;
      if (theta == 1.0 || d > 0.0) {
        desc = fmt::format("D = {:.9g} > 0: decreasing on (-1, 0), increasing on (0, inf)", d);
      } else if (d <= theta - 1.0) {
        desc = fmt::format("D = {:.9g} <= theta - 1: increasing on (xi2, inf), xi2 = {:.9g}", d,
                           dom.xi.positive.value_or(nan));
      } else {
        desc = fmt::format("theta - 1 < D = {:.9g} <= 0: decreasing on (-1, xi1), increasing on (xi2, inf), "
                           "xi1 = {:.9g}, xi2 = {:.9g}",
                           d, dom.xi.negative.value_or(nan), dom.xi.positive.value_or(nan));
      }
      rows.push_back({ParamId::m_x, by_jump_side(*m_x), true, desc});
    }
  }

  rows.push_back({ParamId::mu_i, SignClass::decreasing, true, "decreases with investment drift"});
  if (c.sigma > 0.0) {
    rows.push_back({ParamId::sigma_i, SignClass::increasing, true, "increases with investment volatility"});
  } else {
    rows.push_back({ParamId::sigma_i, SignClass::non_monotonic_here, true,
                    "stationary at sigma_I = 0, increasing above"});
  }

  const auto m_i = c.jump.deterministic_size();
  if (!m_i) {
    rows.push_back({ParamId::lambda_i, nc, true, "random jump law: no closed form, use a sweep"});
    rows.push_back({ParamId::m_i, nc, true, "random jump law: no closed form, use a sweep"});
  } else {
    if (*m_i == 0.0) {
      rows.push_back({ParamId::lambda_i, nc, true, "m_I = 0: jump intensity has no effect"});
    } else {
      rows.push_back({ParamId::lambda_i, SignClass::increasing, true, "increases with investment jump intensity"});
    }
    if (c.lambda == 0.0) {
      rows.push_back({ParamId::m_i, nc, true, "lambda_I = 0: jump size has no effect"});
    } else {
      rows.push_back({ParamId::m_i, by_jump_side(*m_i), true, "decreasing on (-1, 0), increasing on (0, inf)"});
    }
  }
  return rows;
}

std::vector<SweepRow> sweep(const Model& model, ParamId p, std::span<const double> values) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (const double y : values) {
    SweepRow row{y, false, Classification::diverging, nan, nan, nan, ""};
    if (!std::isfinite(y)) {
      row.note = "non-finite value";
      rows.push_back(row);
      continue;
    }
    try {
      const Model m = with_param(model, p, y);
      const auto report = validate(m);
      row.h = report.h;
      row.classification = report.classification;
      row.admissible = report.valid;
      if (report.valid) {
        const auto s = compute_qstar(m);
        row.r0 = s.r0;
        row.qstar = s.qstar;
      } else {
        row.note = report.violations.front().message;
      }
    } catch (const StructuralError& e) {
      row.note = std::string("structural: ") + e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace jumpstop
