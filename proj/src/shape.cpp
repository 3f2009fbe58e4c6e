#include "jumpstop/shape.hpp"

#include <cmath>
#include <string>

#include "jumpstop/errors.hpp"

namespace jumpstop {

double upsilon(double alpha, double x) {
  if (!(x > -1.0)) throw DomainError("upsilon: x must be > -1, got " + std::to_string(x));
  if (!(alpha > 0.0)) throw DomainError("upsilon: alpha must be > 0");
  return std::pow(1.0 + x, alpha) - (alpha * x + 1.0);
}

double phi(double alpha, double x) {
  if (!(x > -1.0)) throw DomainError("phi: x must be > -1, got " + std::to_string(x));
  return 1.0 - std::pow(1.0 + x, alpha);
}

}  // namespace jumpstop
