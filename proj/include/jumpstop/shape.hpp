#pragma once

namespace jumpstop {

// Upsilon_alpha(x) = (1+x)^alpha - (alpha x + 1): gap between the power
// curve and its tangent at x = 0. Requires x > -1, alpha > 0.
double upsilon(double alpha, double x);

// Phi_alpha(x) = 1 - (1+x)^alpha. Requires x > -1; alpha may be any real.
double phi(double alpha, double x);

}  // namespace jumpstop
