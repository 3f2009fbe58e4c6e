#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jumpstop/jumps.hpp"

namespace jumpstop {

/// One jump-diffusion Y_t = y0 exp((mu - sigma^2/2 - lambda m) t + sigma W_t)
/// times the product of N_t jump factors.
struct ProcessParams {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  JumpSizeSpec jump;
  double initial = 1.0;
};

struct MarketParams {
  double rho = 0.0;     // discount rate
  double theta = 1.0;   // profit elasticity
  double kappa0 = 0.0;  // profit coefficient before investing
  double kappa1 = 0.0;  // profit coefficient after investing
  double n = 0.0;       // time-to-build lag
};

/// Demand X and investment cost I are independent.
struct Model {
  ProcessParams demand;
  ProcessParams cost;
  MarketParams market;
};

/// Throws StructuralError when a field breaks its structural invariant.
/// The demand volatility must be strictly positive; the cost volatility may
/// be zero (deterministic cost).
void check_structure(const Model& model);

enum class Classification { admissible, invest_immediately, diverging };

const char* to_string(Classification c);

struct Violation {
  std::string rule;
  std::string message;
  double value;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;
  Classification classification = Classification::admissible;
  double h = 0.0;
};

/// Checks rho > mu_I and h > sigma_I^2. When both fail the model is
/// classified invest-immediately, with both violations listed.
ValidationReport validate(const Model& model);

bool is_admissible(const Model& model);

// ---------------------------------------------------------------------------
// Admissible demand-parameter domains

struct Interval {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double y) const;
};

/// A union of at most two intervals. `constrained` is false when the
/// admissibility condition does not depend on the parameter at all.
struct ParamDomain {
  bool constrained = true;
  bool analytic = true;  // false: no closed-form domain for this jump law
  std::vector<Interval> intervals;

  bool empty() const { return analytic && intervals.empty(); }
  bool contains(double y) const;
};

struct XiRoots {
  std::optional<double> negative;  // in (-1, 0)
  std::optional<double> positive;  // in (0, inf)
};

struct DomainBounds {
  ParamDomain drift;
  ParamDomain volatility;
  ParamDomain intensity;
  ParamDomain jump_size;

  double drift_bound = 0.0;         // mu_X must stay below this
  std::optional<double> b;          // volatility bound (absent when theta = 1)
  std::optional<double> c;          // intensity bound (absent when it would divide by zero)
  std::optional<double> d;          // jump-size level, needs lambda_X > 0
  XiRoots xi;
};

/// Region of each demand parameter for which admissibility
/// (h > sigma_I^2) holds with every other parameter fixed. The jump-size
/// domain is closed-form only for deterministic jumps.
DomainBounds demand_domain(const Model& model);

/// Roots of Upsilon_theta(x) = d on (-1, 0) and (0, inf). Requires
/// theta > 0 and theta != 1. Each root satisfies |Upsilon - d| <= 1e-12.
XiRoots xi_roots(double theta, double d);

}  // namespace jumpstop
