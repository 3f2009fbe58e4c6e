#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jumpstop/model.hpp"
#include "jumpstop/shape.hpp"
#include "jumpstop/solver.hpp"

namespace jumpstop {

enum class ParamId { mu_x, sigma_x, lambda_x, m_x, mu_i, sigma_i, lambda_i, m_i };

inline constexpr std::array<ParamId, 8> all_params{
    ParamId::mu_x, ParamId::sigma_x, ParamId::lambda_x, ParamId::m_x,
    ParamId::mu_i, ParamId::sigma_i, ParamId::lambda_i, ParamId::m_i};

// "mu_X", "sigma_I", ...
std::string_view param_name(ParamId p);
std::optional<ParamId> parse_param(std::string_view name);

// Demand parameters enter both h and j; cost parameters only j.
bool is_demand_param(ParamId p);
bool is_jump_param(ParamId p);

double get_param(const Model& model, ParamId p);

/// Copy of `model` with one parameter replaced. Jump sizes require a
/// deterministic law and replace it with Deterministic(value).
Model with_param(Model model, ParamId p, double value);

/// Theta(r) = m_I (r - 1) + (1+m_I)^{1-r} - 1, the lambda_I partial of j.
/// Requires a deterministic cost jump.
double theta_fn(const Model& model, double r);

struct Partials {
  std::optional<double> dh_dy;  // empty for cost parameters
  double dj_dy;                 // at r = r0
};

/// Closed-form partial derivatives of h and j. Jump parameters need
/// deterministic jump sizes (UnsupportedAnalyticError otherwise).
Partials partials(const Model& model, const Solution& solution, ParamId p);

enum class SignClass { increasing, decreasing, non_monotonic_here, not_classified };
const char* to_string(SignClass s);

enum class FdMode { central, one_sided, unavailable };
const char* to_string(FdMode m);

struct SensitivityReport {
  ParamId param;
  double derivative;  // dq*/dy
  double delta;       // j'(r0) > 0
  std::optional<double> dh_dy;
  double dj_dy;
  double fd_estimate;
  double fd_relative_gap;
  FdMode fd_mode;
  double fd_tolerance;  // 1e-5 central, 1e-4 one-sided
  SignClass sign;
  bool sign_from_table;
};

/// dq*/dy from the implicit derivative of r0, cross-checked against finite
/// differences of the full solve.
SensitivityReport dqstar_dy(const Model& model, const Solution& solution, ParamId p);

/// |a - b| / max(|a|, |b|, floor).
double relative_gap(double a, double b, double floor);

struct SignRow {
  ParamId param;
  SignClass predicted;  // at the model's current parameter value
  bool in_scope;
  std::string description;
};

/// Monotonicity predicted for every parameter. Demand rows are classified
/// only when 1/r0 <= theta <= 1; the demand drift is never classified.
std::vector<SignRow> sign_table(const Model& model, const Solution& solution);

struct SweepRow {
  double y;
  bool admissible;
  Classification classification;
  double h;
  double r0;      // NaN when inadmissible
  double qstar;   // NaN when inadmissible
  std::string note;
};

std::vector<SweepRow> sweep(const Model& model, ParamId p, std::span<const double> values);

}  // namespace jumpstop
