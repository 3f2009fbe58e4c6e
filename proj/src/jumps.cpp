#include "jumpstop/jumps.hpp"

#include <cmath>
#include <string>

#include "jumpstop/errors.hpp"

namespace jumpstop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_support(double u, const char* what) {
  if (!std::isfinite(u) || u <= -1.0) {
    throw StructuralError(std::string(what) + ": jump size must be finite and > -1, got " +
                          std::to_string(u));
  }
}

}  // namespace

JumpSizeSpec JumpSizeSpec::deterministic(double m) {
  require_support(m, "deterministic jump");
  return JumpSizeSpec(DeterministicJump{m});
}

JumpSizeSpec JumpSizeSpec::discrete(std::vector<JumpAtom> atoms) {
  if (atoms.empty()) throw StructuralError("discrete jump: at least one atom required");
  double total = 0.0;
  for (const auto& atom : atoms) {
    require_support(atom.u, "discrete jump");
    if (!std::isfinite(atom.p) || atom.p < 0.0 || atom.p > 1.0) {
      throw StructuralError("discrete jump: probability outside [0, 1]: " + std::to_string(atom.p));
    }
    total += atom.p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw StructuralError("discrete jump: probabilities sum to " + std::to_string(total));
  }
  return JumpSizeSpec(DiscreteJump{std::move(atoms)});
}

JumpSizeSpec JumpSizeSpec::log_normal(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || b < 0.0) {
    throw StructuralError("lognormal jump: need finite a and b >= 0");
  }
  return JumpSizeSpec(LogNormalJump{a, b});
}

std::optional<double> JumpSizeSpec::deterministic_size() const {
  if (const auto* d = std::get_if<DeterministicJump>(&law_)) return d->m;
  return std::nullopt;
}

const char* JumpSizeSpec::kind_name() const {
  return std::visit(overloaded{[](const DeterministicJump&) { return "deterministic"; },
                               [](const DiscreteJump&) { return "discrete"; },
                               [](const LogNormalJump&) { return "lognormal"; }},
                    law_);
}

double power_moment(const JumpSizeSpec& spec, double k) {
  return std::visit(
      overloaded{[k](const DeterministicJump& d) { return std::pow(1.0 + d.m, k); },
                 [k](const DiscreteJump& d) {
                   double s = 0.0;
                   for (const auto& atom : d.atoms) s += atom.p * std::pow(1.0 + atom.u, k);
                   return s;
                 },
                 [k](const LogNormalJump& l) { return std::exp(k * l.a + 0.5 * k * k * l.b * l.b); }},
      spec.variant());
}

double power_moment_slope(const JumpSizeSpec& spec, double k) {
  return std::visit(
      overloaded{[k](const DeterministicJump& d) { return std::log1p(d.m) * std::pow(1.0 + d.m, k); },
                 [k](const DiscreteJump& d) {
                   double s = 0.0;
                   for (const auto& atom : d.atoms) {
                     s += atom.p * std::log1p(atom.u) * std::pow(1.0 + atom.u, k);
                   }
                   return s;
                 },
                 [k](const LogNormalJump& l) {
                   return (l.a + k * l.b * l.b) * std::exp(k * l.a + 0.5 * k * k * l.b * l.b);
                 }},
      spec.variant());
}

double power_moment_curvature(const JumpSizeSpec& spec, double k) {
  return std::visit(
      overloaded{[k](const DeterministicJump& d) {
                   const double lg = std::log1p(d.m);
                   return lg * lg * std::pow(1.0 + d.m, k);
                 },
                 [k](const DiscreteJump& d) {
                   double s = 0.0;
                   for (const auto& atom : d.atoms) {
                     const double lg = std::log1p(atom.u);
                     s += atom.p * lg * lg * std::pow(1.0 + atom.u, k);
                   }
                   return s;
                 },
                 [k](const LogNormalJump& l) {
                   const double s = l.a + k * l.b * l.b;
                   return (s * s + l.b * l.b) * std::exp(k * l.a + 0.5 * k * k * l.b * l.b);
                 }},
      spec.variant());
}

double mean_jump(const JumpSizeSpec& spec) { return power_moment(spec, 1.0) - 1.0; }

double sample_factor(const JumpSizeSpec& spec, Rng& rng) {
  return std::visit(
      overloaded{[](const DeterministicJump& d) { return 1.0 + d.m; },
                 [&rng](const DiscreteJump& d) {
                   const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                   double acc = 0.0;
                   for (const auto& atom : d.atoms) {
                     acc += atom.p;
                     if (u < acc) return 1.0 + atom.u;
                   }
                   // probabilities sum to 1 only within rounding
                   for (auto it = d.atoms.rbegin(); it != d.atoms.rend(); ++it) {
                     if (it->p > 0.0) return 1.0 + it->u;
                   }
                   return 1.0 + d.atoms.back().u;
                 },
                 [&rng](const LogNormalJump& l) {
                   if (l.b == 0.0) return std::exp(l.a);
                   return std::exp(std::normal_distribution<double>(l.a, l.b)(rng));
                 }},
      spec.variant());
}

}  // namespace jumpstop
