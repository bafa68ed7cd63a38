#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "fracmag/gagliardo.hpp"

namespace fracmag {

/// Radial cutoff: 1 on B_r(center), 0 outside B_2r(center), quintic ramp in
/// between (first and second derivatives vanish at both ends).  The ramp
/// value at |x-center| = 1.5 r is exactly 1/2 and the Lipschitz constant is
/// 15/(8r) <= 2/r.
struct CutoffField {
  Field phi;
  double lipschitz = 0.0;
  double r = 0.0;
  Vec3 center{};
};

inline CutoffField cutoff(double r, Vec3 center, const Grid& g) {
  if (!(r >= 2.0 * g.h)) throw domain_error("cutoff: need r >= 2h");
  Field phi = Field::sample(g, [&](Vec3 x) {
    const double t = (norm(x - center) - r) / r;
    if (t <= 0.0) return complex(1.0, 0.0);
    if (t >= 1.0) return complex(0.0, 0.0);
    const double sstep = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    return complex(1.0 - sstep, 0.0);
  });
  return CutoffField{std::move(phi), 15.0 / (8.0 * r), r, center};
}

struct SplitReport {
  Field u1, u2;
  double support_gap = 0.0;
  double e1 = 0.0, e2 = 0.0;  // ||u1||^2_{s,A}, ||u2||^2_{s,A}
  double remainder = 0.0;     // ||u - u1 - u2||_{s,A}
  double mass_defect = 0.0;   // |‖u‖_p^p - ‖u1‖_p^p - ‖u2‖_p^p|
  double total = 0.0;         // ||u||^2_{s,A}
};

namespace detail {

inline double support_distance(const Field& a, const Field& b) {
  std::vector<Vec3> sa, sb;
  for (std::size_t f = 0; f < a.size(); ++f)
    if (std::abs(a.values[f]) > 0.0) sa.push_back(a.grid.node(f));
  for (std::size_t f = 0; f < b.size(); ++f)
    if (std::abs(b.values[f]) > 0.0) sb.push_back(b.grid.node(f));
  if (sa.empty() || sb.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& x : sa)
    for (const Vec3& y : sb) best = std::min(best, norm2(x - y));
  return std::sqrt(best);
}

}  // namespace detail

/// Splits u into a piece carried by B_{2 R_bar}(xi) and a piece supported
/// outside B_{R_n/2}(xi) using the quintic cutoffs, and reports the energy
/// bookkeeping of the two pieces.  Requires R_n >= 4 R_bar so the supports
/// are disjoint by construction.
inline SplitReport dichotomy_split(const FractionalParams& p, const MagneticPotential& A,
                                   const Field& u, Vec3 xi, double r_bar, double r_n,
                                   double p_exp, const QuadPolicy& policy = {}) {
  if (!(r_n >= 4.0 * r_bar))
    throw domain_error("dichotomy_split: need R_n >= 4 R_bar for disjoint supports");
  const CutoffField phi1 = cutoff(r_bar, xi, u.grid);
  const CutoffField phi2 = cutoff(0.5 * r_n, xi, u.grid);

  SplitReport rep;
  rep.u1 = Field::zeros(u.grid);
  rep.u2 = Field::zeros(u.grid);
  Field rem = Field::zeros(u.grid);
  for (std::size_t f = 0; f < u.size(); ++f) {
    const double f1 = phi1.phi.values[f].real();
    const double f2 = 1.0 - phi2.phi.values[f].real();
    rep.u1.values[f] = f1 * u.values[f];
    rep.u2.values[f] = f2 * u.values[f];
    rem.values[f] = u.values[f] - rep.u1.values[f] - rep.u2.values[f];
  }
  rep.support_gap = detail::support_distance(rep.u1, rep.u2);
  rep.e1 = seminorm_sq(p, A, rep.u1, policy).total;
  rep.e2 = seminorm_sq(p, A, rep.u2, policy).total;
  rep.total = seminorm_sq(p, A, u, policy).total;
  rep.remainder = std::sqrt(std::max(0.0, seminorm_sq(p, A, rem, policy).total));
  rep.mass_defect =
      std::abs(lp_mass(u, p_exp) - lp_mass(rep.u1, p_exp) - lp_mass(rep.u2, p_exp));
  return rep;
}

struct CutoffEstimate {
  double lhs = 0.0;       // localized raw pair energy of phi*u over E1 x E2
  double rhs = 0.0;       // C min(mass E1, mass E2) + C raw pair energy of u
  double ratio = 0.0;
  double constant = 0.0;  // the C assembled from s and the Lipschitz constant
};

namespace detail {

inline double masked_l2(const Field& u, std::span<const std::uint8_t> mask) {
  KahanSum s;
  for (std::size_t f = 0; f < u.size(); ++f)
    if (mask[f]) s.add(std::norm(u.values[f]));
  return s.value() * u.grid.cell_volume();
}

inline double raw_pair_energy(const FractionalParams& p, const MagneticPotential& A,
                              const Field& u, std::span<const std::uint8_t> e1,
                              std::span<const std::uint8_t> e2, const QuadPolicy& policy) {
  const double loc = localized_norm_sq(p, A, u, e1, e2, policy);
  return (loc - masked_l2(u, e1)) * 2.0 / p.c_s;
}

}  // namespace detail

/// Checks the cutoff energy estimate: the localized pair energy of phi*u is
/// bounded by C min(local masses) + C times the pair energy of u, where C
/// comes from the kernel split at |x-y| = 1 and the Lipschitz constant of phi.
inline CutoffEstimate verify_cutoff_estimate(const FractionalParams& p,
                                             const MagneticPotential& A, const Field& u,
                                             const Field& phi, double lipschitz,
                                             std::span<const std::uint8_t> e1,
                                             std::span<const std::uint8_t> e2,
                                             const QuadPolicy& policy = {}) {
  if (!(phi.grid == u.grid)) throw grid_mismatch_error("verify_cutoff_estimate: grid mismatch");
  Field pu = u;
  for (std::size_t f = 0; f < u.size(); ++f) pu.values[f] *= phi.values[f].real();

  CutoffEstimate est;
  est.lhs = detail::raw_pair_energy(p, A, pu, e1, e2, policy);
  const double mass = std::min(detail::masked_l2(u, e1), detail::masked_l2(u, e2));
  const double gag = detail::raw_pair_energy(p, A, u, e1, e2, policy);
  // |phi(x)u(x)e^{-i..} - phi(y)u(y)|^2 <= 2 phi^2 |integrand(u)|^2
  //   + 2 |u|^2 |phi(x)-phi(y)|^2, and the second kernel integral splits at
  // |x-y| = 1 into 4pi L^2/(2-2s) + 4pi/(2s).
  const double K = 4.0 * M_PI * (lipschitz * lipschitz / (2.0 - 2.0 * p.s) + 1.0 / (2.0 * p.s));
  est.constant = 2.0 * std::max(1.0, K);
  est.rhs = est.constant * (mass + gag);
  est.ratio = est.rhs > 0.0 ? est.lhs / est.rhs : 0.0;
  return est;
}

struct GaugeDescriptor {
  Vec3 xi{};   // physical translation (whole cells)
  Vec3 eta{};  // phase tilt; pair with shift_potential(A, xi, eta)
};

/// v(x) = e^{i eta.x} u(x + xi) with periodic wrap; xi is a whole number of
/// cells so the translation is an exact lattice bijection.
inline std::pair<Field, GaugeDescriptor> gauge_transform(const Field& u,
                                                         std::array<int, 3> xi_cells,
                                                         Vec3 eta) {
  const Grid& g = u.grid;
  const int n = g.n;
  auto wrap = [n](int a) { return ((a % n) + n) % n; };
  Field v = Field::zeros(g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t src =
            g.flatten(wrap(i + xi_cells[0]), wrap(j + xi_cells[1]), wrap(k + xi_cells[2]));
        const std::size_t dst = g.flatten(i, j, k);
        v.values[dst] = std::polar(1.0, dot(eta, g.node(i, j, k))) * u.values[src];
      }
  const Vec3 xi{g.h * xi_cells[0], g.h * xi_cells[1], g.h * xi_cells[2]};
  return {std::move(v), GaugeDescriptor{xi, eta}};
}

struct VanishingDiagnostic {
  double q_r = 0.0;          // concentration function of mu at radius R
  double lp_mass_sup = 0.0;  // sup over centers of the local L^p mass
};

inline VanishingDiagnostic vanishing_diagnostic(const DensityField& mu, double R, double p_exp,
                                                const Field& u) {
  if (!(R >= mu.grid.h)) throw domain_error("vanishing_diagnostic: need R >= h");
  if (!(u.grid == mu.grid)) throw grid_mismatch_error("vanishing_diagnostic: grid mismatch");
  const double radii[1] = {R};
  VanishingDiagnostic out;
  out.q_r = concentration_function(mu, radii)[0].second;

  const Grid& g = u.grid;
  const std::size_t N = g.node_count();
  std::vector<double> w(N);
  for (std::size_t f = 0; f < N; ++f) w[f] = std::pow(std::abs(u.values[f]), p_exp);
  const double R2 = R * R;
  std::vector<double> best((N + 511) / 512, 0.0);
  detail::parallel_blocks(N, 512, [&](std::size_t blk, std::size_t c0, std::size_t c1) {
    double local = 0.0;
    for (std::size_t fc = c0; fc < c1; ++fc) {
      const Vec3 xc = g.node(fc);
      KahanSum s;
      for (std::size_t f = 0; f < N; ++f)
        if (norm2(g.node(f) - xc) <= R2) s.add(w[f]);
      local = std::max(local, s.value());
    }
    best[blk] = local;
  });
  for (double b : best) out.lp_mass_sup = std::max(out.lp_mass_sup, b);
  out.lp_mass_sup *= g.cell_volume();
  return out;
}

}  // namespace fracmag
