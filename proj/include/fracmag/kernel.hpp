#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "fracmag/errors.hpp"
#include "fracmag/field.hpp"
#include "fracmag/params.hpp"
#include "fracmag/potential.hpp"

namespace fracmag {

/// One evaluation of the magnetic kernel: the unit-modulus midpoint phase
/// e^{-i (x-y).A((x+y)/2)} and the Riesz weight c_s |x-y|^{-(3+2s)}.
struct KernelSample {
  complex phase;
  double weight = 0.0;
};

inline KernelSample kernel_sample(const FractionalParams& p, const MagneticPotential& A,
                                  Vec3 x, Vec3 y) {
  const Vec3 d = x - y;
  const double r2 = norm2(d);
  if (r2 == 0.0) throw singular_pair_error("kernel_sample: x == y");
  const double theta = dot(d, eval_potential(A, 0.5 * (x + y)));
  return {std::polar(1.0, -theta), p.c_s * std::pow(r2, -0.5 * p.kernel_exponent())};
}

/// Upsilon_u^A(x,y) = 2 Re(|u(x)||u(y)| - e^{-i(x-y).A((x+y)/2)} u(x) conj(u(y))),
/// the pointwise excess of the magnetic pairing over the modulus pairing.
/// Nonnegative up to rounding.
inline double upsilon(const FractionalParams& p, const MagneticPotential& A, const Field& u,
                      std::size_t xi, std::size_t yi) {
  if (xi == yi) throw singular_pair_error("upsilon: x == y");
  const Vec3 x = u.grid.node(xi), y = u.grid.node(yi);
  const complex ux = u.values[xi], uy = u.values[yi];
  const double theta = dot(x - y, eval_potential(A, 0.5 * (x + y)));
  const complex cross = std::polar(1.0, -theta) * ux * std::conj(uy);
  (void)p;
  return 2.0 * (std::abs(ux) * std::abs(uy) - cross.real());
}

struct UpsilonStats {
  double fraction = 0.0;       // fraction of sampled pairs with upsilon > threshold
  double threshold = 0.0;
  std::size_t pairs_sampled = 0;
  std::size_t pairs_above = 0;
  std::size_t stride_x = 1, stride_y = 1;  // the deterministic sampling plan
};

/// Fraction of strided node pairs with Upsilon above the threshold.  Strides
/// are chosen deterministically so that about max_pairs pairs are visited;
/// the plan is recorded in the output.
inline UpsilonStats upsilon_positive_measure(const FractionalParams& p,
                                             const MagneticPotential& A, const Field& u,
                                             double threshold,
                                             std::size_t max_pairs = 4'000'000) {
  if (threshold < 0.0) throw domain_error("upsilon_positive_measure: threshold must be >= 0");
  const std::size_t N = u.size();
  std::size_t sx = 1, sy = 1;
  auto planned = [&] { return ((N + sx - 1) / sx) * ((N + sy - 1) / sy); };
  while (planned() > max_pairs) {
    if (sx <= sy)
      ++sx;
    else
      ++sy;
  }
  UpsilonStats st;
  st.threshold = threshold;
  st.stride_x = sx;
  st.stride_y = sy;
  for (std::size_t i = 0; i < N; i += sx)
    for (std::size_t j = 0; j < N; j += sy) {
      if (i == j) continue;
      ++st.pairs_sampled;
      if (upsilon(p, A, u, i, j) > threshold) ++st.pairs_above;
    }
  st.fraction = st.pairs_sampled == 0
                    ? 0.0
                    : static_cast<double>(st.pairs_above) / static_cast<double>(st.pairs_sampled);
  return st;
}

}  // namespace fracmag
