#pragma once

#include <cmath>
#include <random>

#include "jumpstop/model.hpp"
#include "jumpstop/solver.hpp"

namespace fixtures {

using namespace jumpstop;

// rho = 0.1, theta = 1, kappa = (0.5, 1.5), n = 0; GBM demand and cost.
inline Model m0() {
  Model m;
  m.market = {0.1, 1.0, 0.5, 1.5, 0.0};
  m.demand = {0.05, 0.2, 0.0, JumpSizeSpec{}, 1.0};
  m.cost = {0.02, 0.1, 0.0, JumpSizeSpec{}, 10.0};
  return m;
}

// One-factor case: constant cost.
inline Model m1() {
  Model m = m0();
  m.demand.mu = 0.0;
  m.cost = {0.0, 0.0, 0.0, JumpSizeSpec{}, 10.0};
  return m;
}

// Independent closed forms for M0.
inline double m0_r0() { return (-0.005 + std::sqrt(0.005 * 0.005 + 4.0 * 0.025 * 0.08)) / 0.05; }

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

// Random admissible model. Jumps are deterministic with sizes away from 0;
// `with_jumps` false gives pure GBM. theta is drawn from theta_lo..theta_hi.
inline Model random_model(Draw& d, bool with_jumps, double theta_lo = 0.5, double theta_hi = 1.5) {
  for (;;) {
    Model m;
    m.market.rho = d.uniform(0.05, 0.2);
    m.market.theta = d.uniform(theta_lo, theta_hi);
    m.market.kappa0 = d.uniform(0.2, 1.0);
    m.market.kappa1 = m.market.kappa0 + d.uniform(0.2, 2.0);
    m.market.n = d.uniform(0.0, 3.0);
    m.demand.mu = d.uniform(-0.05, 0.06);
    m.demand.sigma = d.uniform(0.05, 0.4);
    m.demand.initial = d.uniform(0.5, 2.0);
    m.cost.mu = d.uniform(-0.05, 0.08);
    m.cost.sigma = d.uniform(0.02, 0.3);
    m.cost.initial = d.uniform(5.0, 20.0);
    if (with_jumps) {
      const auto size = [&d] {
        const double s = d.uniform(0.05, 0.5);
        return d.uniform(0.0, 1.0) < 0.5 ? -s : s;
      };
      m.demand.lambda = d.uniform(0.05, 1.0);
      m.demand.jump = JumpSizeSpec::deterministic(size());
      m.cost.lambda = d.uniform(0.05, 1.0);
      m.cost.jump = JumpSizeSpec::deterministic(size());
    }
    if (is_admissible(m)) return m;
  }
}

}  // namespace fixtures
