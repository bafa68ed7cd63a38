#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "fracmag/errors.hpp"
#include "fracmag/grid.hpp"
#include "fracmag/vec3.hpp"

namespace fracmag {

struct ZeroPotential {};

/// A(x) = M x + b.
struct LinearPotential {
  Mat3 M;
  Vec3 b;
};

/// A(x) = (b/2) (-x2, x1, 0), the standard potential of a constant magnetic
/// field of strength b along the third axis.
struct ConstantFieldPotential {
  double b = 0.0;

  Mat3 matrix() const {
    Mat3 m = Mat3::zero();
    m(0, 1) = -0.5 * b;
    m(1, 0) = 0.5 * b;
    return m;
  }
};

/// Vector samples on a grid, evaluated by trilinear interpolation.
struct TabulatedPotential {
  Grid grid;
  std::vector<Vec3> values;  // grid.node_count() entries, same flat order
};

using MagneticPotential =
    std::variant<ZeroPotential, LinearPotential, ConstantFieldPotential, TabulatedPotential>;

namespace detail {

inline Vec3 eval_tabulated(const TabulatedPotential& t, Vec3 x) {
  const Grid& g = t.grid;
  if (!g.contains(x)) throw out_of_box_error("tabulated potential evaluated outside its box");
  // Fractional lattice coordinates; clamp to the outermost node cells so
  // points between the last node and the box edge extrapolate the edge cell.
  auto frac = [&](double c, double gc) {
    double u = (c - gc) / g.h + 0.5 * (g.n - 1);
    return std::clamp(u, 0.0, static_cast<double>(g.n - 1));
  };
  const double fx = frac(x.x, g.center.x), fy = frac(x.y, g.center.y), fz = frac(x.z, g.center.z);
  const int i0 = std::min(static_cast<int>(fx), g.n - 2);
  const int j0 = std::min(static_cast<int>(fy), g.n - 2);
  const int k0 = std::min(static_cast<int>(fz), g.n - 2);
  const double tx = fx - i0, ty = fy - j0, tz = fz - k0;
  Vec3 out{};
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk) {
        const double w = (di ? tx : 1 - tx) * (dj ? ty : 1 - ty) * (dk ? tz : 1 - tz);
        out = out + w * t.values[g.flatten(i0 + di, j0 + dj, k0 + dk)];
      }
  return out;
}

}  // namespace detail

inline Vec3 eval_potential(const MagneticPotential& A, Vec3 x) {
  return std::visit(
      [&](const auto& a) -> Vec3 {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return {};
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return a.M * x + a.b;
        } else if constexpr (std::is_same_v<T, ConstantFieldPotential>) {
          return {-0.5 * a.b * x.y, 0.5 * a.b * x.x, 0.0};
        } else {
          return detail::eval_tabulated(a, x);
        }
      },
      A);
}

/// The translated-and-tilted potential x -> A(x + xi) + eta of the gauge
/// identity.  Closed-form kinds only; the result is reported in the simplest
/// kind that represents it exactly.
inline MagneticPotential shift_potential(const MagneticPotential& A, Vec3 xi, Vec3 eta) {
  return std::visit(
      [&](const auto& a) -> MagneticPotential {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          if (eta == Vec3{}) return ZeroPotential{};
          return LinearPotential{Mat3::zero(), eta};
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          const Vec3 off = a.M * xi + a.b + eta;
          return LinearPotential{a.M, off};
        } else if constexpr (std::is_same_v<T, ConstantFieldPotential>) {
          const Vec3 off = a.matrix() * xi + eta;
          if (off == Vec3{}) return a;
          return LinearPotential{a.matrix(), off};
        } else {
          throw unsupported_kind_error("shift_potential: tabulated potentials are not shiftable");
        }
      },
      A);
}

inline bool is_zero_potential(const MagneticPotential& A) {
  return std::holds_alternative<ZeroPotential>(A);
}

/// Supremum of |A| over a grid's bounding box (corner max for affine kinds,
/// sample max for tabulated).  Used by the far-field phase error bound.
inline double sup_norm_on_box(const MagneticPotential& A, const Grid& g) {
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, TabulatedPotential>) {
          double m = 0.0;
          for (const Vec3& v : a.values) m = std::max(m, norm(v));
          return m;
        } else {
          const Vec3 lo = g.box_min(), hi = g.box_max();
          double m = 0.0;
          for (int c = 0; c < 8; ++c) {
            const Vec3 corner{c & 1 ? hi.x : lo.x, c & 2 ? hi.y : lo.y, c & 4 ? hi.z : lo.z};
            m = std::max(m, norm(eval_potential(A, corner)));
          }
          return m;
        }
      },
      A);
}

}  // namespace fracmag
