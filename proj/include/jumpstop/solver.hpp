#pragma once

#include <span>
#include <vector>

#include "jumpstop/model.hpp"

namespace jumpstop {

/// Closed-form solution of the reduced one-dimensional stopping problem in
/// q = x^theta / i. Built by compute_qstar; treat as an immutable value.
struct Solution {
  Model model;
  double h = 0.0;
  double a = 0.0;       // A = e^{-hn} / h
  double r0 = 0.0;      // positive root of j, > 1
  double qstar = 0.0;   // investment threshold
  double root_residual = 0.0;

  // kappa1 - kappa0
  double kappa_gap() const { return model.market.kappa1 - model.market.kappa0; }
  // (kappa1 - kappa0) * A, the slope of the stopping payoff l(q).
  double payoff_slope() const { return kappa_gap() * a; }
};

double compute_h(const Model& model);

/// A = e^{-hn} / h. Throws DivergentPerpetuityError for h <= 0.
double compute_a(double h, double n);

/// Characteristic function whose positive root gives the power of the
/// continuation value.
double j_eval(const Model& model, double r);
double j_derivative(const Model& model, double r);
double j_second_derivative(const Model& model, double r);

/// Unique positive root of j. Requires an admissible model, which puts the
/// root above 1. Safeguarded Newton inside [1, r_hi].
double find_r0(const Model& model);

Solution compute_qstar(const Model& model);

/// Stopping payoff in reduced form, l(q) = (kappa1 - kappa0) A q - 1.
double payoff_l(const Solution& solution, double q);

/// Reduced value f(q); continuous at q* and equal to l beyond it.
double value_f(const Solution& solution, double q);
double value_f_derivative(const Solution& solution, double q);

/// V(x, i) = i f(x^theta / i).
double value_v(const Solution& solution, double x, double i);

/// g(x, i) = (kappa1 - kappa0) A x^theta - i. Requires h > 0.
double payoff_g(const Model& model, double x, double i);

// ---------------------------------------------------------------------------
// Generator of Q applied to zeta(q) = b q^r

/// rho zeta - L_Q zeta through the characteristic function: -b q^r j(r).
double apply_generator_power(const Model& model, double b, double r, double q);

/// L_Q zeta evaluated term by term from the generator of Q (diffusion,
/// drift, killing and both jump integrals), independent of j.
double generator_power_direct(const Model& model, double b, double r, double q);

/// rho l - L_Q l for the linear payoff, built from generator_power_direct.
double stopping_slack_direct(const Solution& solution, double q);

/// Closed form of rho l - L_Q l: (kappa1 - kappa0) A h q + (mu_I - rho).
double stopping_slack(const Solution& solution, double q);

struct HjbResiduals {
  double min_continuation_slack;   // min of f - l over grid points below q*
  double min_stopping_slack;       // min of rho l - L_Q l over points at or above q*
  double max_continuation_equation; // max |rho f - L_Q f| below q*
  std::size_t continuation_points;
  std::size_t stopping_points;
};

HjbResiduals hjb_residuals(const Solution& solution, std::span<const double> grid);

/// `points` log-spaced values on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Default certification grid, [q*/1000, 1000 q*].
std::vector<double> default_hjb_grid(const Solution& solution, std::size_t points = 1000);

struct PastingGaps {
  double value_gap;
  double derivative_gap;
};

/// Value matching and smooth pasting at q*.
PastingGaps smooth_pasting_check(const Solution& solution);

/// Same check for the power solution glued at an arbitrary threshold.
/// Only the true q* closes both gaps.
PastingGaps smooth_pasting_check(const Solution& solution, double threshold);

struct BoundaryPoint {
  double x;
  double i;
};

/// Points (x, x^theta / q*) of the critical boundary. Larger i lies in the
/// continuation region.
std::vector<BoundaryPoint> boundary_curve(const Solution& solution, std::span<const double> xs);

bool in_continuation(const Solution& solution, double x, double i);

}  // namespace jumpstop
