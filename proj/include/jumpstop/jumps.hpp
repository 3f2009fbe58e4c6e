#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "jumpstop/random.hpp"

namespace jumpstop {

/// Every jump multiplies the level by exactly 1 + m.
struct DeterministicJump {
  double m = 0.0;
};

struct JumpAtom {
  double u;  // relative jump size, > -1
  double p;  // probability
};

/// Finitely many jump sizes.
struct DiscreteJump {
  std::vector<JumpAtom> atoms;
};

/// ln(1 + U) ~ Normal(a, b^2).
struct LogNormalJump {
  double a = 0.0;
  double b = 0.0;
};

/// Law of the multiplicative jump factor 1 + U. Construction validates the
/// support (U > -1) and the probability weights, so every instance is usable.
class JumpSizeSpec {
 public:
  using Variant = std::variant<DeterministicJump, DiscreteJump, LogNormalJump>;

  JumpSizeSpec() = default;  // deterministic, m = 0

  static JumpSizeSpec deterministic(double m);
  static JumpSizeSpec discrete(std::vector<JumpAtom> atoms);
  static JumpSizeSpec log_normal(double a, double b);

  const Variant& variant() const { return law_; }
  bool is_deterministic() const { return std::holds_alternative<DeterministicJump>(law_); }

  // Jump size m when the law is deterministic.
  std::optional<double> deterministic_size() const;

  const char* kind_name() const;

 private:
  explicit JumpSizeSpec(Variant law) : law_(std::move(law)) {}
  Variant law_{DeterministicJump{}};
};

/// E[(1+U)^k]. Closed form for every variant and every finite real k.
double power_moment(const JumpSizeSpec& spec, double k);

/// d/dk E[(1+U)^k] = E[ln(1+U) (1+U)^k].
double power_moment_slope(const JumpSizeSpec& spec, double k);

/// d^2/dk^2 E[(1+U)^k] = E[ln(1+U)^2 (1+U)^k].
double power_moment_curvature(const JumpSizeSpec& spec, double k);

/// m = E[U] = E[1+U] - 1.
double mean_jump(const JumpSizeSpec& spec);

/// One draw of the factor 1 + U.
double sample_factor(const JumpSizeSpec& spec, Rng& rng);

}  // namespace jumpstop
