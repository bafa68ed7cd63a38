#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "fracmag/detail/phase.hpp"
#include "fracmag/detail/quadrature.hpp"
#include "fracmag/errors.hpp"
#include "fracmag/field.hpp"
#include "fracmag/parallel.hpp"
#include "fracmag/params.hpp"
#include "fracmag/potential.hpp"

namespace fracmag {

enum class FarFieldRule { Exact, FastFar };

/// ZeroPadded counts pairs of the whole infinite lattice with u extended by
/// zero, i.e. the quadrature of the seminorm of u 1_box: exactly covariant
/// under lattice translations of interior-supported fields (gauge identities)
/// and the right object to compare against whole-space analytic values.
/// InBoxOnly restricts both pair points to the sampling box, the natural
/// companion of the set-localized norms.
enum class ExteriorRule { InBoxOnly, ZeroPadded };

/// CellAverage integrates the Riesz kernel exactly over cells near the
/// diagonal; Midpoint samples it at cell centers everywhere.
enum class DiagonalRule { CellAverage, Midpoint };

struct QuadPolicy {
  double r_cut = 0.0;  // 0 -> box half-width
  FarFieldRule far = FarFieldRule::Exact;
  ExteriorRule exterior = ExteriorRule::ZeroPadded;
  DiagonalRule diagonal = DiagonalRule::CellAverage;

  double resolved_r_cut(const Grid& g) const {
    return r_cut > 0.0 ? r_cut : 0.5 * g.extent();
  }
  void validate(const Grid& g) const {
    if (resolved_r_cut(g) < 2.0 * g.h)
      throw policy_error("QuadPolicy: r_cut must be at least 2h");
  }
  bool averaged() const { return diagonal == DiagonalRule::CellAverage; }
};

struct EnergyBreakdown {
  double l2 = 0.0;
  double gagliardo = 0.0;   // near + far + exterior
  double tail_bound = 0.0;  // exterior estimate, reported, never added
  double total = 0.0;       // l2 + gagliardo

  // quadrature diagnostics
  double gagliardo_near = 0.0;      // in-box pairs with |x-y| <= r_cut
  double gagliardo_far = 0.0;       // in-box pairs beyond r_cut
  double gagliardo_exterior = 0.0;  // zero-padded exterior pairs (ZeroPadded only)
  double fastfar_error_bound = 0.0; // certified bound on the FastFar phase error
};

struct DensityField {
  Grid grid;
  std::vector<double> mu;
};

namespace detail {

struct PairSums {
  double near = 0.0, far = 0.0, ext = 0.0, fastfar_err = 0.0;
};

// Symmetric sweep over unordered in-box pairs.  Accumulates, per fixed-size
// block of x nodes, the pairing term against near/far weights plus the
// exterior correction sum  (g(x)+g(y)) w  with g the diagonal density of the
// pairing.  Deterministic: blocks are fixed, combination order is fixed.
template <class Phase, bool Exterior, bool FastFar>
PairSums pair_sweep(const Grid& g, const WeightTable& W, const complex* u, const complex* v,
                    double r_cut, const Phase& ph, double a_sup) {
  const int n = g.n;
  const std::size_t N = g.node_count();
  const double h = g.h;
  const double rc2_cells = (r_cut / h) * (r_cut / h);

  std::vector<double> ax(n);
  for (int i = 0; i < n; ++i) ax[i] = g.axis_coord(i);

  constexpr std::size_t kBlock = 1024;
  const std::size_t nblocks = (N + kBlock - 1) / kBlock;
  std::vector<double> bnear(nblocks), bfar(nblocks), bext(nblocks), berr(nblocks);

  parallel_blocks(N, kBlock, [&](std::size_t blk, std::size_t x0, std::size_t x1) {
    KahanSum near_s, far_s, ext_s, err_s;
    for (std::size_t fx = x0; fx < x1; ++fx) {
      const int xi = static_cast<int>(fx / (static_cast<std::size_t>(n) * n));
      const int xj = static_cast<int>((fx / n) % n);
      const int xk = static_cast<int>(fx % n);
      const double uxr = u[fx].real(), uxi = u[fx].imag();
      const double vxr = v[fx].real(), vxi = v[fx].imag();
      const double gx = uxr * vxr + uxi * vxi;  // Re(u(x) conj(v(x)))
      const Vec3 px{g.center.x + ax[xi], g.center.y + ax[xj], g.center.z + ax[xk]};
      const int rowx = xi * n + xj;
      for (int yi = xi; yi < n; ++yi) {
        const double dy0 = yi == xi ? 0.0 : double(xi - yi) * (xi - yi);
        for (int yj = (yi == xi ? xj : 0); yj < n; ++yj) {
          const int rowy = yi * n + yj;
          const int k0 = rowy == rowx ? xk + 1 : 0;
          if (k0 >= n) continue;
          const std::size_t fy0 = static_cast<std::size_t>(rowy) * n;
          const double d2xy = dy0 + double(xj - yj) * (xj - yj);
          const double* wrow = W.row(xi - yi, xj - yj) + (n - 1 + xk);
          for (int k = k0; k < n; ++k) {
            const double w = wrow[-k + 0];  // offset dz = xk - k
            const std::size_t fy = fy0 + k;
            const double uyr = u[fy].real(), uyi = u[fy].imag();
            const double vyr = v[fy].real(), vyi = v[fy].imag();
            const double dzc = double(xk - k);
            const double r2c = d2xy + dzc * dzc;
            const bool is_far = r2c > rc2_cells;
            double term;
            if constexpr (Phase::trivial) {
              term = (uxr - uyr) * (vxr - vyr) + (uxi - uyi) * (vxi - vyi);
            } else {
              double c = 1.0, s = 0.0;
              bool dropped = false;
              if (FastFar && is_far) {
                dropped = true;
              } else {
                const Vec3 yv{g.center.x + ax[yi], g.center.y + ax[yj], g.center.z + ax[k]};
                const double th = ph.theta(px - yv, 0.5 * (px + yv));
                c = std::cos(th);
                s = std::sin(th);
              }
              // Re[(e^{-i th}u(x)-u(y)) conj(e^{-i th}v(x)-v(y))]
              term = gx + (uyr * vyr + uyi * vyi) -
                     (c * (uyr * vxr + uyi * vxi) - s * (uyi * vxr - uyr * vxi)) -
                     (c * (uxr * vyr + uxi * vyi) + s * (uxi * vyr - uxr * vyi));
              if (dropped) {
                const double r = std::sqrt(r2c) * h;
                const double au = std::sqrt(uxr * uxr + uxi * uxi) *
                                  std::sqrt(vyr * vyr + vyi * vyi);
                const double av = std::sqrt(uyr * uyr + uyi * uyi) *
                                  std::sqrt(vxr * vxr + vxi * vxi);
                err_s.add(std::min(2.0, r * a_sup) * (au + av) * w);
              }
            }
            if (is_far)
              far_s.add(term * w);
            else
              near_s.add(term * w);
            if constexpr (Exterior) {
              const double gy = uyr * vyr + uyi * vyi;
              ext_s.add((gx + gy) * w);
            }
          }
        }
      }
    }
    bnear[blk] = near_s.value();
    bfar[blk] = far_s.value();
    bext[blk] = ext_s.value();
    berr[blk] = err_s.value();
  });

  PairSums out;
  out.near = reduce_tree(bnear);
  out.far = reduce_tree(bfar);
  out.ext = reduce_tree(bext);
  out.fastfar_err = reduce_tree(berr);
  return out;
}

template <bool Exterior>
PairSums pair_sweep_dispatch(const Grid& g, const WeightTable& W, const complex* u,
                             const complex* v, double r_cut, const MagneticPotential& A,
                             FarFieldRule far) {
  const double a_sup = far == FarFieldRule::FastFar ? sup_norm_on_box(A, g) : 0.0;
  return with_phase(A, [&](const auto& ph) {
    if (far == FarFieldRule::FastFar)
      return pair_sweep<std::decay_t<decltype(ph)>, Exterior, true>(g, W, u, v, r_cut, ph, a_sup);
    return pair_sweep<std::decay_t<decltype(ph)>, Exterior, false>(g, W, u, v, r_cut, ph, a_sup);
  });
}

inline double real_l2_pairing(const Field& u, const Field& v) {
  KahanSum s;
  for (std::size_t i = 0; i < u.size(); ++i)
    s.add(u.values[i].real() * v.values[i].real() + u.values[i].imag() * v.values[i].imag());
  return s.value() * u.grid.cell_volume();
}

inline double exterior_tail_bound(const FractionalParams& p, const Field& u) {
  // c_s sum_x |u(x)|^2 (4 pi / 2s) dist(x, box)^ {-2s} h^3; bounds the pair
  // mass a field extending beyond the box could add against in-box nodes.
  KahanSum s;
  const Grid& g = u.grid;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double a2 = std::norm(u.values[f]);
    if (a2 == 0.0) continue;
    const double d = g.boundary_distance(g.node(f));
    s.add(a2 * std::pow(d, -2.0 * p.s));
  }
  return p.c_s * (4.0 * M_PI / (2.0 * p.s)) * s.value() * g.cell_volume();
}

}  // namespace detail

/// Magnetic Gagliardo energy of u by blocked pair summation.  gagliardo
/// carries the c_s/2 prefactor; the split into near/far/exterior parts and
/// the FastFar error bound are reported alongside.
inline EnergyBreakdown seminorm_sq(const FractionalParams& p, const MagneticPotential& A,
                                   const Field& u, const QuadPolicy& policy = {}) {
  const Grid& g = u.grid;
  policy.validate(g);
  const double rc = policy.resolved_r_cut(g);
  const auto W = detail::weight_table(g, p.kernel_exponent(), policy.averaged());
  const auto sums = detail::pair_sweep_dispatch<true>(g, *W, u.values.data(), u.values.data(),
                                                      rc, A, policy.far);
  const double h6 = std::pow(g.cell_volume(), 2);
  EnergyBreakdown out;
  out.l2 = detail::real_l2_pairing(u, u);
  // unordered pairs carry both orientations: c_s/2 * 2 = c_s
  out.gagliardo_near = p.c_s * sums.near * h6;
  out.gagliardo_far = p.c_s * sums.far * h6;
  if (policy.exterior == ExteriorRule::ZeroPadded) {
    double mass = 0.0;
    {
      KahanSum m;
      for (const complex& c : u.values) m.add(std::norm(c));
      mass = m.value();
    }
    out.gagliardo_exterior = p.c_s * (mass * W->w_all - sums.ext) * h6;
  }
  out.fastfar_error_bound = p.c_s * sums.fastfar_err * h6;
  out.gagliardo = out.gagliardo_near + out.gagliardo_far + out.gagliardo_exterior;
  out.tail_bound = detail::exterior_tail_bound(p, u);
  out.total = out.l2 + out.gagliardo;
  return out;
}

/// int_{E1}|u|^2 + (c_s/2) sum over the rectangle E1 x E2 of ordered in-box
/// pairs.  Masks are per-node flags; empty sets contribute zero.
inline double localized_norm_sq(const FractionalParams& p, const MagneticPotential& A,
                                const Field& u, std::span<const std::uint8_t> e1,
                                std::span<const std::uint8_t> e2,
                                const QuadPolicy& policy = {}) {
  const Grid& g = u.grid;
  policy.validate(g);
  if (e1.size() != u.size() || e2.size() != u.size())
    throw grid_mismatch_error("localized_norm_sq: mask size mismatch");
  const auto Wp = detail::weight_table(g, p.kernel_exponent(), policy.averaged());
  const detail::WeightTable& W = *Wp;

  std::vector<std::size_t> rows;
  rows.reserve(u.size());
  for (std::size_t f = 0; f < u.size(); ++f)
    if (e1[f]) rows.push_back(f);

  const int n = g.n;
  std::vector<double> ax(n);
  for (int i = 0; i < n; ++i) ax[i] = g.axis_coord(i);
  const complex* uv = u.values.data();

  constexpr std::size_t kBlock = 256;
  const std::size_t nblocks = rows.empty() ? 0 : (rows.size() + kBlock - 1) / kBlock;
  std::vector<double> bsum(std::max<std::size_t>(nblocks, 1), 0.0);

  detail::parallel_blocks(rows.size(), kBlock, [&](std::size_t blk, std::size_t r0,
                                                   std::size_t r1) {
    KahanSum acc;
    for (std::size_t r = r0; r < r1; ++r) {
      const std::size_t fx = rows[r];
      const auto [xi, xj, xk] = g.unflatten(fx);
      const double uxr = uv[fx].real(), uxi = uv[fx].imag();
      const double nx = uxr * uxr + uxi * uxi;
      const Vec3 px{g.center.x + ax[xi], g.center.y + ax[xj], g.center.z + ax[xk]};
      detail::with_phase(A, [&](const auto& ph) {
        for (int yi = 0; yi < n; ++yi)
          for (int yj = 0; yj < n; ++yj) {
            const double* wrow = W.row(xi - yi, xj - yj) + (n - 1 + xk);
            const std::size_t fy0 = (static_cast<std::size_t>(yi) * n + yj) * n;
            for (int k = 0; k < n; ++k) {
              const std::size_t fy = fy0 + k;
              if (!e2[fy] || fy == fx) continue;
              const double w = wrow[-k];
              const double uyr = uv[fy].real(), uyi = uv[fy].imag();
              double term;
              if constexpr (std::decay_t<decltype(ph)>::trivial) {
                const double dr = uxr - uyr, di = uxi - uyi;
                term = dr * dr + di * di;
              } else {
                const Vec3 yv{g.center.x + ax[yi], g.center.y + ax[yj], g.center.z + ax[k]};
                const double th = ph.theta(px - yv, 0.5 * (px + yv));
                const double c = std::cos(th), s = std::sin(th);
                term = nx + uyr * uyr + uyi * uyi -
                       2.0 * (c * (uxr * uyr + uxi * uyi) + s * (uxi * uyr - uxr * uyi));
              }
              acc.add(term * w);
            }
          }
      });
    }
    bsum[blk] = acc.value();
  });

  double l2 = 0.0;
  {
    KahanSum m;
    for (std::size_t f : rows) m.add(std::norm(uv[f]));
    l2 = m.value() * g.cell_volume();
  }
  const double pair = detail::reduce_tree(bsum);
  return l2 + 0.5 * p.c_s * pair * std::pow(g.cell_volume(), 2);
}

/// Per-node energy density mu(x) = |u(x)|^2 + sum_y (integrand) w h^3,
/// without the c_s/2 prefactor.
inline DensityField density(const FractionalParams& p, const MagneticPotential& A,
                            const Field& u, const QuadPolicy& policy = {}) {
  const Grid& g = u.grid;
  policy.validate(g);
  const auto Wp = detail::weight_table(g, p.kernel_exponent(), policy.averaged());
  const detail::WeightTable& W = *Wp;
  const int n = g.n;
  std::vector<double> ax(n);
  for (int i = 0; i < n; ++i) ax[i] = g.axis_coord(i);
  const complex* uv = u.values.data();
  const bool padded = policy.exterior == ExteriorRule::ZeroPadded;

  DensityField out{g, std::vector<double>(g.node_count())};
  detail::parallel_blocks(g.node_count(), 512, [&](std::size_t, std::size_t x0, std::size_t x1) {
    detail::with_phase(A, [&](const auto& ph) {
      for (std::size_t fx = x0; fx < x1; ++fx) {
        const auto [xi, xj, xk] = g.unflatten(fx);
        const double uxr = uv[fx].real(), uxi = uv[fx].imag();
        const double nx = uxr * uxr + uxi * uxi;
        const Vec3 px{g.center.x + ax[xi], g.center.y + ax[xj], g.center.z + ax[xk]};
        KahanSum acc, wsum;
        for (int yi = 0; yi < n; ++yi)
          for (int yj = 0; yj < n; ++yj) {
            const double* wrow = W.row(xi - yi, xj - yj) + (n - 1 + xk);
            const std::size_t fy0 = (static_cast<std::size_t>(yi) * n + yj) * n;
            for (int k = 0; k < n; ++k) {
              const std::size_t fy = fy0 + k;
              if (fy == fx) continue;
              const double w = wrow[-k];
              const double uyr = uv[fy].real(), uyi = uv[fy].imag();
              double term;
              if constexpr (std::decay_t<decltype(ph)>::trivial) {
                const double dr = uxr - uyr, di = uxi - uyi;
                term = dr * dr + di * di;
              } else {
                const Vec3 yv{g.center.x + ax[yi], g.center.y + ax[yj], g.center.z + ax[k]};
                const double th = ph.theta(px - yv, 0.5 * (px + yv));
                const double c = std::cos(th), s = std::sin(th);
                term = nx + uyr * uyr + uyi * uyi -
                       2.0 * (c * (uxr * uyr + uxi * uyi) + s * (uxi * uyr - uxr * uyi));
              }
              acc.add(term * w);
              if (padded) wsum.add(w);
            }
          }
        double val = acc.value();
        if (padded) val += nx * (W.w_all - wsum.value());
        out.mu[fx] = nx + val * g.cell_volume();
      }
    });
  });
  return out;
}

/// Q(R) = max over grid centers of the mu-mass of the ball of radius R.
inline std::vector<std::pair<double, double>> concentration_function(
    const DensityField& mu, std::span<const double> radii) {
  const Grid& g = mu.grid;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw domain_error("concentration_function: radii must be ascending");
  for (double r : radii)
    if (!(r > 0.0)) throw domain_error("concentration_function: radii must be positive");

  const std::size_t N = g.node_count();
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double R : radii) {
    const double R2 = R * R;
    std::vector<double> best((N + 511) / 512, 0.0);
    detail::parallel_blocks(N, 512, [&](std::size_t blk, std::size_t c0, std::size_t c1) {
      double local = 0.0;
      for (std::size_t fc = c0; fc < c1; ++fc) {
        const Vec3 xi = g.node(fc);
        KahanSum s;
        for (std::size_t f = 0; f < N; ++f)
          if (norm2(g.node(f) - xi) <= R2) s.add(mu.mu[f]);
        local = std::max(local, s.value());
      }
      best[blk] = local;
    });
    double q = 0.0;
    for (double b : best) q = std::max(q, b);
    out.emplace_back(R, q * g.cell_volume());
  }
  return out;
}

}  // namespace fracmag
