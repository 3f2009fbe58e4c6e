#include "jumpstop/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "jumpstop/errors.hpp"
#include "jumpstop/shape.hpp"
#include "jumpstop/solver.hpp"

namespace jumpstop {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw StructuralError(what);
}

void check_process(const ProcessParams& p, const char* name, bool volatility_may_vanish) {
  const std::string prefix(name);
  require(std::isfinite(p.mu), prefix + ".mu must be finite");
  require(std::isfinite(p.sigma), prefix + ".sigma must be finite");
  if (volatility_may_vanish) {
    require(p.sigma >= 0.0, prefix + ".sigma must be >= 0");
  } else {
    require(p.sigma > 0.0, prefix + ".sigma must be > 0");
  }
  require(std::isfinite(p.lambda) && p.lambda >= 0.0, prefix + ".lambda must be finite and >= 0");
  require(std::isfinite(p.initial) && p.initial > 0.0, prefix + ".initial must be finite and > 0");
}

}  // namespace

void check_structure(const Model& model) {
  check_process(model.demand, "demand", false);
  check_process(model.cost, "cost", true);
  const auto& mk = model.market;
  require(std::isfinite(mk.rho) && mk.rho > 0.0, "market.rho must be finite and > 0");
  require(std::isfinite(mk.theta) && mk.theta > 0.0, "market.theta must be finite and > 0");
  require(std::isfinite(mk.kappa0) && mk.kappa0 > 0.0, "market.kappa0 must be finite and > 0");
  require(std::isfinite(mk.kappa1) && mk.kappa1 > mk.kappa0, "market.kappa1 must be finite and > kappa0");
  require(std::isfinite(mk.n) && mk.n >= 0.0, "market.n must be finite and >= 0");
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::admissible: return "admissible";
    case Classification::invest_immediately: return "invest-immediately";
    case Classification::diverging: return "diverging";
  }
  return "?";
}

ValidationReport validate(const Model& model) {
  check_structure(model);
  ValidationReport report;
  report.h = compute_h(model);
  const double rho = model.market.rho;
  const double mu_i = model.cost.mu;
  const double var_i = model.cost.sigma * model.cost.sigma;

  const bool immediate = !(rho > mu_i);
  const bool diverging = !(report.h > var_i);
  if (immediate) {
    report.violations.push_back({"rho_gt_mu_I",
                                 "rho <= mu_I: the cost drifts at least as fast as discounting, "
                                 "invest immediately",
                                 mu_i});
  }
  if (diverging) {
    report.violations.push_back(
        {"h_gt_sigma_I_sq",
         report.h <= 0.0 ? "h <= 0: the discounted profit stream diverges"
                         : "h <= sigma_I^2: admissibility requires h > sigma_I^2",
         report.h});
  }
  report.valid = report.violations.empty();
  if (immediate) {
    report.classification = Classification::invest_immediately;
  } else if (diverging) {
    report.classification = Classification::diverging;
  }
  return report;
}

bool is_admissible(const Model& model) { return validate(model).valid; }

bool Interval::contains(double y) const {
  const bool above = lo_closed ? y >= lo : y > lo;
  const bool below = hi_closed ? y <= hi : y < hi;
  return above && below;
}

bool ParamDomain::contains(double y) const {
  for (const auto& iv : intervals) {
    if (iv.contains(y)) return true;
  }
  return false;
}

namespace {

// Bisection for upsilon(theta, x) = d on (lo, hi). `lo_value` stands in for
// f(lo) so the open end x = -1 is never evaluated.
double bisect_upsilon(double theta, double d, double lo, double hi, double lo_value) {
  const double tol = 1e-12;
  double f_lo = lo_value;
  double best = 0.5 * (lo + hi);
  double best_residual = inf;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = upsilon(theta, mid) - d;
    if (std::abs(f_mid) < best_residual) {
      best_residual = std::abs(f_mid);
      best = mid;
    }
    if (std::abs(f_mid) <= tol) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

double expand_upper(double theta, double d, bool want_positive) {
  double hi = 1.0;
  for (int it = 0; it < 1100; ++it) {
    const double f = upsilon(theta, hi) - d;
    if (want_positive ? f > 0.0 : f < 0.0) return hi;
    hi *= 2.0;
  }
  throw NoRootError("xi_roots: bracket expansion failed");
}

}  // namespace

XiRoots xi_roots(double theta, double d) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw StructuralError("xi_roots: theta must be > 0");
  if (theta == 1.0) throw DomainError("xi_roots: upsilon_1 vanishes identically, no isolated roots");
  if (!std::isfinite(d)) throw DomainError("xi_roots: d must be finite");
  XiRoots roots;
  const double at_minus_one = theta - 1.0;  // limit of upsilon at x -> -1
  if (theta > 1.0) {
    if (d > 0.0 && d < at_minus_one) {
      roots.negative = bisect_upsilon(theta, d, -1.0, 0.0, at_minus_one - d);
    }
    if (d > 0.0) {
      const double hi = expand_upper(theta, d, true);
      roots.positive = bisect_upsilon(theta, d, 0.0, hi, -d);
    }
  } else {
    if (d > at_minus_one && d < 0.0) {
      roots.negative = bisect_upsilon(theta, d, -1.0, 0.0, at_minus_one - d);
    }
    if (d < 0.0) {
      const double hi = expand_upper(theta, d, false);
      roots.positive = bisect_upsilon(theta, d, 0.0, hi, -d);
    }
  }
  return roots;
}

DomainBounds demand_domain(const Model& model) {
  check_structure(model);
  const auto& x = model.demand;
  const double theta = model.market.theta;
  const double rho = model.market.rho;
  const double var_i = model.cost.sigma * model.cost.sigma;
  const double var_x = x.sigma * x.sigma;
  const double m = mean_jump(x.jump);
  const double moment = power_moment(x.jump, theta);
  // E[(1+U)^theta] - (theta m + 1); equals upsilon_theta(m) for fixed jumps.
  const double jump_gap = moment - (theta * m + 1.0);

  DomainBounds out;

  // drift
  out.drift_bound =
      (rho - ((theta - 1.0) * 0.5 * var_x - x.lambda * m) * theta - x.lambda * (moment - 1.0) - var_i) / theta;
  out.drift.intervals.push_back({-inf, out.drift_bound});

  // volatility
  if (theta == 1.0) {
    out.volatility.constrained = false;
    const double slack = compute_h(model) - var_i;
    if (slack > 0.0) out.volatility.intervals.push_back({0.0, inf});
  } else {
    const double rest = rho - (x.mu - x.lambda * m) * theta - x.lambda * (moment - 1.0) - var_i;
    const double b = std::sqrt(std::max(0.0, 2.0 / (theta * (theta - 1.0)) * rest));
    out.b = b;
    if (theta < 1.0) {
      out.volatility.intervals.push_back({b, inf});
    } else if (b > 0.0) {
      out.volatility.intervals.push_back({0.0, b});
    }
  }

  // intensity
  const double s = rho - (x.mu + (theta - 1.0) * 0.5 * var_x) * theta - var_i;
  if (jump_gap == 0.0) {
    out.intensity.constrained = false;
    if (s > 0.0) out.intensity.intervals.push_back({0.0, inf, true, false});
  } else {
    const double c = std::max(0.0, s / jump_gap);
    out.c = c;
    if (jump_gap < 0.0) {
      if (s > 0.0) {
        out.intensity.intervals.push_back({0.0, inf, true, false});
      } else {
        out.intensity.intervals.push_back({c, inf});
      }
    } else if (c > 0.0) {
      out.intensity.intervals.push_back({0.0, c, true, false});
    }
  }

  // jump size
  if (!x.jump.is_deterministic()) {
    out.jump_size.analytic = false;
  } else if (x.lambda == 0.0) {
    out.jump_size.constrained = false;
    if (s > 0.0) out.jump_size.intervals.push_back({-1.0, inf});
  } else {
    const double d = s / x.lambda;
    out.d = d;
    auto& iv = out.jump_size.intervals;
    if (theta == 1.0) {
      if (d > 0.0) iv.push_back({-1.0, inf});
    } else {
      out.xi = xi_roots(theta, d);
      const auto& xi = out.xi;
      if (theta < 1.0) {
        if (d <= theta - 1.0) {
          iv.push_back({*xi.positive, inf});
        } else if (d < 0.0) {
          iv.push_back({-1.0, *xi.negative});
          iv.push_back({*xi.positive, inf});
        } else if (d == 0.0) {
          iv.push_back({-1.0, 0.0});  // upsilon(0) = 0 = d is the boundary itself
          iv.push_back({0.0, inf});
        } else {
          iv.push_back({-1.0, inf});
        }
      } else {
        if (d <= 0.0) {
          // h <= sigma_I^2 for every jump size
        } else if (d < theta - 1.0) {
          iv.push_back({*xi.negative, *xi.positive});
        } else {
          iv.push_back({-1.0, *xi.positive});
        }
      }
    }
  }
  return out;
}

}  // namespace jumpstop
