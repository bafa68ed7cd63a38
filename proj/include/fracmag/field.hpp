#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "fracmag/errors.hpp"
#include "fracmag/grid.hpp"
#include "fracmag/vec3.hpp"

namespace fracmag {

using complex = std::complex<double>;

/// Complex scalar field sampled on a Grid (one value per node, flat order).
struct Field {
  Grid grid;
  std::vector<complex> values;

  static Field zeros(const Grid& g) { return Field{g, std::vector<complex>(g.node_count())}; }

  complex& operator[](std::size_t i) { return values[i]; }
  const complex& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  template <class F>
  static Field sample(const Grid& g, F&& f) {
    Field out = zeros(g);
    std::size_t flat = 0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) out.values[flat++] = f(g.node(i, j, k));
    return out;
  }

  bool all_finite() const {
    for (const complex& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
};

// --- generators -------------------------------------------------------------

/// exp(-|x-center|^2 / (2 width^2)), peak value 1 at the grid center.
struct GaussianGen {
  double width = 1.0;
};

/// Classic compactly supported bump, value 1 at the center, 0 for r >= radius.
struct BumpGen {
  Vec3 center{};
  double radius = 1.0;
};

/// d_s (eps / (eps^2 + |x-z|^2))^{(3-2s)/2}.
struct TalentiGen {
  Vec3 z{};
  double eps = 1.0;
  double d_s = 1.0;
  double s = 0.5;
};

/// Two bumps of the given radius at grid-center +- (separation/2) e1.
/// Supports are disjoint whenever radius < separation/2.
struct TwoBumpsGen {
  double separation = 4.0;
  double radius = 0.0;  // 0 -> separation/4
};

using BaseGenerator = std::variant<GaussianGen, BumpGen, TalentiGen, TwoBumpsGen>;

/// Multiplies a base generator by the plane-wave phase e^{i eta.x}.
struct PlaneWavePhaseGen {
  Vec3 eta{};
  BaseGenerator base;
};

using FieldGenerator =
    std::variant<GaussianGen, BumpGen, TalentiGen, TwoBumpsGen, PlaneWavePhaseGen>;

namespace detail {

inline double bump_value(Vec3 x, Vec3 c, double radius) {
  const double t2 = norm2(x - c) / (radius * radius);
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

inline double base_value(const BaseGenerator& gen, const Grid& g, Vec3 x) {
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, GaussianGen>) {
          return std::exp(-0.5 * norm2(x - g.center) / (a.width * a.width));
        } else if constexpr (std::is_same_v<T, BumpGen>) {
          return bump_value(x, a.center, a.radius);
        } else if constexpr (std::is_same_v<T, TalentiGen>) {
          const double q = a.eps / (a.eps * a.eps + norm2(x - a.z));
          return a.d_s * std::pow(q, 0.5 * (3.0 - 2.0 * a.s));
        } else {  // TwoBumpsGen
          const double r = a.radius > 0.0 ? a.radius : 0.25 * a.separation;
          const Vec3 off{0.5 * a.separation, 0.0, 0.0};
          return bump_value(x, g.center - off, r) + bump_value(x, g.center + off, r);
        }
      },
      gen);
}

inline void validate_generator(const BaseGenerator& gen) {
  std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, GaussianGen>) {
          if (!(a.width > 0.0)) throw domain_error("Gaussian generator: width must be positive");
        } else if constexpr (std::is_same_v<T, BumpGen>) {
          if (!(a.radius > 0.0)) throw domain_error("Bump generator: radius must be positive");
        } else if constexpr (std::is_same_v<T, TalentiGen>) {
          if (!(a.eps > 0.0)) throw domain_error("Talenti generator: eps must be positive");
          if (!(a.s > 0.0 && a.s < 1.0)) throw domain_error("Talenti generator: s in (0,1)");
        } else {
          if (!(a.separation > 0.0)) throw domain_error("TwoBumps generator: separation > 0");
          if (a.radius >= 0.5 * a.separation)
            throw domain_error("TwoBumps generator: radius must stay below separation/2");
        }
      },
      gen);
}

}  // namespace detail

inline Field make_field(const Grid& g, const FieldGenerator& gen) {
  return std::visit(
      [&](const auto& a) -> Field {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PlaneWavePhaseGen>) {
          detail::validate_generator(a.base);
          return Field::sample(g, [&](Vec3 x) {
            return std::polar(detail::base_value(a.base, g, x), dot(a.eta, x));
          });
        } else {
          detail::validate_generator(BaseGenerator{a});
          return Field::sample(
              g, [&](Vec3 x) { return complex(detail::base_value(BaseGenerator{a}, g, x), 0.0); });
        }
      },
      gen);
}

// --- deterministic random fields --------------------------------------------

namespace detail {

// splitmix64; fixed across platforms so seeded runs are reproducible.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Complex field with re/im uniform in [-1,1], deterministic in the seed.
inline Field make_random_field(const Grid& g, std::uint64_t seed) {
  std::uint64_t state = seed ^ 0x6a09e667f3bcc908ULL;
  Field out = Field::zeros(g);
  for (complex& v : out.values) {
    const double re = 2.0 * detail::uniform01(state) - 1.0;
    const double im = 2.0 * detail::uniform01(state) - 1.0;
    v = complex(re, im);
  }
  return out;
}

// --- small field utilities ---------------------------------------------------

inline double lp_mass(const Field& u, double p) {
  double acc = 0.0, c = 0.0;
  for (const complex& v : u.values) {
    const double t = std::pow(std::abs(v), p) - c;
    const double s = acc + t;
    c = (s - acc) - t;
    acc = s;
  }
  return acc * u.grid.cell_volume();
}

inline double l2_mass(const Field& u) { return lp_mass(u, 2.0); }

/// Largest |u| over nodes within h of the box boundary; oracle comparisons
/// require this to be negligible.
inline double boundary_mass(const Field& u) {
  const Grid& g = u.grid;
  double m = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const auto [i, j, k] = g.unflatten(f);
    if (i == 0 || j == 0 || k == 0 || i == g.n - 1 || j == g.n - 1 || k == g.n - 1)
      m = std::max(m, std::abs(u.values[f]));
  }
  return m;
}

}  // namespace fracmag
