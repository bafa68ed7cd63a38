#pragma once

#include <cmath>
#include <string>

#include "fracmag/errors.hpp"

namespace fracmag {

/// Normalization constant of the fractional Laplacian in dimension 3:
/// c_s = s 4^s Gamma((3+2s)/2) / (pi^{3/2} Gamma(1-s)).  For s = 1/2 this
/// reduces to 1/pi^2, matching the m = 0 relativistic kernel.
inline double cs_constant(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw domain_error("cs_constant: s must lie in (0,1), got " + std::to_string(s));
  return s * std::pow(2.0, 2.0 * s) * std::tgamma(1.5 + s) /
         (std::pow(M_PI, 1.5) * std::tgamma(1.0 - s));
}

inline double critical_exponent(double s) { return 6.0 / (3.0 - 2.0 * s); }

/// Fractional exponent s, Lebesgue exponent p and the constants derived
/// from them.  c_s and p_crit are always recomputed from s on construction.
struct FractionalParams {
  double s;
  double p;
  double c_s;
  double p_crit;

  static FractionalParams make(double s, double p) {
    if (!(s > 0.0 && s < 1.0))
      throw domain_error("FractionalParams: s must lie in (0,1)");
    const double pc = critical_exponent(s);
    if (!(p > 2.0 && p <= pc + 1e-12))
      throw domain_error("FractionalParams: need 2 < p <= 6/(3-2s) = " + std::to_string(pc));
    return FractionalParams{s, p, cs_constant(s), pc};
  }

  static FractionalParams critical(double s) {
    return make(s, critical_exponent(s));
  }

  double kernel_exponent() const { return 3.0 + 2.0 * s; }
};

}  // namespace fracmag
