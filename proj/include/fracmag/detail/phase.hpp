#pragma once

#include <variant>

#include "fracmag/potential.hpp"
#include "fracmag/vec3.hpp"

namespace fracmag::detail {

// Phase policies for the pair kernels.  theta(d, m) is the midpoint phase
// angle (x-y).A((x+y)/2) with d = x-y and m = (x+y)/2; the integrand carries
// e^{-i theta}.  PhaseZero marks the trig-free fast path.

struct PhaseZero {
  static constexpr bool trivial = true;
  double theta(Vec3, Vec3) const { return 0.0; }
};

struct PhaseAffine {
  static constexpr bool trivial = false;
  Mat3 M;
  Vec3 b;
  double theta(Vec3 d, Vec3 m) const { return dot(d, M * m + b); }
};

struct PhaseTabulated {
  static constexpr bool trivial = false;
  const TabulatedPotential* pot;
  double theta(Vec3 d, Vec3 m) const { return dot(d, eval_tabulated(*pot, m)); }
};

template <class F>
decltype(auto) with_phase(const MagneticPotential& A, F&& f) {
  return std::visit(
      [&](const auto& a) -> decltype(auto) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return f(PhaseZero{});
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return f(PhaseAffine{a.M, a.b});
        } else if constexpr (std::is_same_v<T, ConstantFieldPotential>) {
          return f(PhaseAffine{a.matrix(), Vec3{}});
        } else {
          return f(PhaseTabulated{&a});
        }
      },
      A);
}

}  // namespace fracmag::detail
