// Acceptance battery: runs numbered criteria and prints one PASS/FAIL line
// each.  Usage: fracmag_acceptance [criterion...]; no arguments runs all.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracmag/fracmag.hpp"

using namespace fracmag;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::map<int, std::pair<std::string, std::function<Outcome()>>>& registry() {
  static std::map<int, std::pair<std::string, std::function<Outcome()>>> r;
  return r;
}

struct Register {
  Register(int id, std::string name, std::function<Outcome()> fn) {
    registry()[id] = {std::move(name), std::move(fn)};
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. c_{1/2} = 1/pi^2
Register c1(1, "normalization constant c_{1/2} = 1/pi^2", [] {
  const double got = cs_constant(0.5);
  const double want = 1.0 / (M_PI * M_PI);
  const double rel = std::abs(got - want) / want;
  return Outcome{rel <= 1e-12, "rel err " + fmt(rel)};
});

// ---------------------------------------------------------------------------
// 2. Gaussian seminorm vs the analytic multiplier value 2 pi Gamma(s+3/2),
//    s=1/2: 2 pi; refinement 32 -> 48 shrinks the error by >= 1.4.
Register c2(2, "Gaussian Gagliardo energy -> 2 pi with first-order refinement", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  QuadPolicy q;
  q.exterior = ExteriorRule::ZeroPadded;  // compare against the whole-space value
  const double want = 2.0 * M_PI;
  double err[2];
  int idx = 0;
  for (int n : {32, 48}) {
    const Grid g = Grid::from_extent(n, 12.0);
    const Field u = make_field(g, GaussianGen{1.0});
    const double got = seminorm_sq(p, ZeroPotential{}, u, q).gagliardo;
    err[idx++] = std::abs(got - want) / want;
  }
  const double gain = err[0] / err[1];
  const bool pass = err[0] <= 0.05 && gain >= 1.4;
  return Outcome{pass, "rel err n=32: " + fmt(err[0]) + ", n=48: " + fmt(err[1]) +
                           ", refinement gain " + fmt(gain) + " (need <=0.05 and >=1.4)"};
});

// ---------------------------------------------------------------------------
// 3. Operator value at the origin for the Gaussian; PV vs SD agreement.
Register c3(3, "pointwise operator at the origin and PV vs SD agreement", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const double want = 1.5957691216057307;  // 2 sqrt(2)/sqrt(pi), rederived

  // odd grid puts a node exactly at the origin; zero padding + huge r_cut
  // keeps the whole-lattice tail of the integral
  const Grid g = Grid::from_extent(49, 12.25);
  const Field u = make_field(g, GaussianGen{1.0});
  OperatorPolicy pv;
  pv.exterior = ExteriorRule::ZeroPadded;
  const std::size_t origin = g.flatten(24, 24, 24);
  const double got = apply_operator_at(p, ZeroPotential{}, u, origin, pv).real();
  const double rel = std::abs(got - want) / want;

  // forms comparison on the magnetic kernel at interior nodes
  const Grid g2 = Grid::from_extent(24, 12.0);
  const Field u2 = make_field(g2, GaussianGen{1.0});
  const MagneticPotential A = ConstantFieldPotential{2.0};
  OperatorPolicy oppv, opsd;
  oppv.r_cut = opsd.r_cut = 3.0;
  opsd.form = OperatorForm::SymmetricDifference;
  const OperatorResult rv = apply_operator(p, A, u2, oppv);
  const OperatorResult rs = apply_operator(p, A, u2, opsd);
  double scale = 0.0, worst = 0.0;
  for (std::size_t f = 0; f < u2.size(); ++f)
    if (rv.interior[f]) scale = std::max(scale, std::abs(rv.out.values[f]));
  for (std::size_t f = 0; f < u2.size(); ++f)
    if (rv.interior[f])
      worst = std::max(worst, std::abs(rv.out.values[f] - rs.out.values[f]) / scale);

  const bool pass = rel <= 0.05 && worst <= 0.02;
  return Outcome{pass, "origin rel err " + fmt(rel) + " (<=0.05), PV-SD interior mismatch " +
                           fmt(worst) + " (<=0.02)"};
});

// ---------------------------------------------------------------------------
// 4. Pointwise diamagnetic inequality over every pair of a 16^3 grid.
Register c4(4, "pointwise diamagnetic inequality, 5 fields x 3 potentials", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(16, 8.0);
  const MagneticPotential pots[] = {
      MagneticPotential{ZeroPotential{}}, MagneticPotential{ConstantFieldPotential{2.0}},
      MagneticPotential{LinearPotential{Mat3{{0, 1, 0, -1, 0, 0.5, 0, 0, 0}}, {0.4, -0.2, 0}}}};
  double worst = 0.0;
  for (int fi = 0; fi < 5; ++fi) {
    const Field u = make_random_field(g, 100 + fi);
    for (const auto& A : pots) {
      detail::with_phase(A, [&](const auto& ph) {
        for (std::size_t i = 0; i < u.size(); ++i) {
          const Vec3 x = g.node(i);
          const double ai = std::abs(u.values[i]);
          for (std::size_t j = i + 1; j < u.size(); ++j) {
            const Vec3 y = g.node(j);
            const double theta = ph.theta(x - y, 0.5 * (x + y));
            const complex diff = std::polar(1.0, -theta) * u.values[i] - u.values[j];
            const double lhs = std::abs(ai - std::abs(u.values[j]));
            const double rhs = std::abs(diff);
            worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
          }
        }
      });
    }
  }
  return Outcome{worst <= 1e-12, "max relative violation " + fmt(worst) + " (<=1e-12)"};
});

// ---------------------------------------------------------------------------
// 5. Gauge identity for linear A with eta = -A(xi) on wrapped fields.
Register c5(5, "gauge identity ||v||_{s,A} = ||u||_{s,A} to 1e-10", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(24, 12.0);
  const MagneticPotential A =
      LinearPotential{Mat3{{0, 1.2, 0, -1.2, 0, 0, 0, 0.5, 0}}, {0.3, 0, -0.1}};
  const Field u = make_field(g, BumpGen{g.center, 3.5});
  if (boundary_mass(u) > 1e-12) return Outcome{false, "test field has boundary mass"};
  QuadPolicy q;  // zero-padded lattice: exact discrete change of variables
  double worst = 0.0;
  for (const std::array<int, 3> cells : {std::array<int, 3>{2, 0, 0}, {1, -2, 3}}) {
    const Vec3 xi{g.h * cells[0], g.h * cells[1], g.h * cells[2]};
    const Vec3 eta = -1.0 * eval_potential(A, xi);
    const auto [v, desc] = gauge_transform(u, cells, eta);
    const MagneticPotential As = shift_potential(A, desc.xi, desc.eta);
    const double a = seminorm_sq(p, A, u, q).total;
    const double b = seminorm_sq(p, As, v, q).total;
    worst = std::max(worst, std::abs(a - b) / a);
  }
  return Outcome{worst <= 1e-10, "max relative mismatch " + fmt(worst) + " (<=1e-10)"};
});

// ---------------------------------------------------------------------------
// 6. Scaling law M_A(lambda) = lambda^{2/p} M_A for the flow's levels.
Register c6(6, "minimization level scaling lambda^{2/p} within 2%", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(24, 12.0);
  MinimizeOptions opt;
  opt.tau = 0.25;
  opt.tol = 1e-7;
  opt.max_iter = 250;
  const Field u0 = make_field(g, GaussianGen{2.0});
  std::map<double, double> level;
  for (double lam : {0.5, 1.0, 2.0}) {
    const MinimizationResult r = minimize(p, ZeroPotential{}, u0, Constraint{3.0, lam}, opt);
    level[lam] = r.level;
  }
  double worst = 0.0;
  std::ostringstream os;
  for (double lam : {0.5, 2.0}) {
    const double got = level[lam] / level[1.0];
    const double want = std::pow(lam, 2.0 / 3.0);
    const double rel = std::abs(got - want) / want;
    worst = std::max(worst, rel);
    os << "lambda=" << lam << " ratio err " << fmt(rel) << "; ";
  }
  return Outcome{worst <= 0.02, os.str() + "(<=0.02)"};
});

// ---------------------------------------------------------------------------
// 7. sigma-curve: log-log slope over sigma = 1,1/2,1/4,1/8 in 2 +- 0.3 for
//    ConstantField(2); A = 0 curve constant to 1e-10.
Register c7(7, "sigma-curve slope 2 +- 0.3 and exact A=0 scale invariance", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(24, 12.0);
  const Field u = make_field(g, GaussianGen{1.0});
  const double sig[4] = {1.0, 0.5, 0.25, 0.125};
  QuadPolicy q;

  const auto zero_curve = sigma_scaling_curve(p, ZeroPotential{}, u, sig, q);
  double zero_dev = 0.0;
  for (const auto& [sv, val] : zero_curve)
    zero_dev = std::max(zero_dev, std::abs(val - zero_curve[0].second) / zero_curve[0].second);

  const double ref = seminorm_sq(p, ZeroPotential{}, u, q).gagliardo;
  const auto curve = sigma_scaling_curve(p, ConstantFieldPotential{2.0}, u, sig, q);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [sv, val] : curve) {
    const double lx = std::log(sv), ly = std::log(std::abs(val - ref));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  const bool pass = zero_dev <= 1e-10 && std::abs(slope - 2.0) <= 0.3;
  return Outcome{pass, "A=0 curve deviation " + fmt(zero_dev) + " (<=1e-10), slope " +
                           fmt(slope) + " (need 2 +- 0.3)"};
});

// ---------------------------------------------------------------------------
// 8. Talenti calibration: PDE ratio in [0.9,1.1] on interior nodes, and the
//    calibrated bubble is stationary under 50 critical-flow iterations.
Register c8(8, "Talenti calibration ratio window and critical-flow stationarity", [] {
  const FractionalParams pc = FractionalParams::critical(0.5);
  const TalentiCalibration cal = calibrate_talenti(pc, 96, 32.0);
  const bool ratio_ok = cal.d_s > 0.0 && cal.residual_max_interior <= 0.1;

  const Grid g = Grid::from_extent(28, 21.0);
  const Field bubble = make_field(g, TalentiGen{g.center, 2.0, cal.d_s, 0.5});
  MinimizeOptions opt;
  opt.tau = 0.05;
  opt.tol = 0.0;  // run all 50 iterations; stationarity is the criterion
  opt.max_iter = 50;
  const MinimizationResult r = critical_level(pc, ZeroPotential{}, bubble, opt);
  const double drift =
      std::abs(r.energy_trace.front() - r.energy_trace.back()) / r.energy_trace.front();
  const double tol = 1e-3;
  const bool pass = ratio_ok && drift < tol;
  return Outcome{pass, "d_s " + fmt(cal.d_s) + ", interior ratio err " +
                           fmt(cal.residual_max_interior) + " (<=0.1), 50-step energy drift " +
                           fmt(drift) + " (<" + fmt(tol) + ")"};
});

// ---------------------------------------------------------------------------
// 9. BBM-limit trend via the Fourier oracle.
Register c9(9, "Fourier-oracle seminorm matches 2 pi Gamma(s+3/2), trend to grad norm", [] {
  const FractionalParams dummy = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(48, 12.0);
  const Field u = make_field(g, GaussianGen{1.0});
  const double grad_sq = 8.352491995247562;  // (3/2) pi^{3/2}, rederived
  const double h3 = g.cell_volume();
  double worst = 0.0;
  double final_gap = 0.0;
  std::ostringstream os;
  double prev_gap = 1e300;
  bool monotone = true;
  for (double s : {0.9, 0.95, 0.99}) {
    const FractionalParams p = FractionalParams::make(s, 3.0);
    const Field lu = fourier_apply_s(p, u);
    KahanSum pair;
    for (std::size_t f = 0; f < u.size(); ++f)
      pair.add(lu.values[f].real() * u.values[f].real() +
               lu.values[f].imag() * u.values[f].imag());
    const double got = pair.value() * h3;
    const double want = 2.0 * M_PI * std::tgamma(s + 1.5);
    worst = std::max(worst, std::abs(got - want) / want);
    final_gap = std::abs(got - grad_sq) / grad_sq;
    monotone = monotone && final_gap < prev_gap;
    prev_gap = final_gap;
    os << "s=" << s << " rel " << fmt(std::abs(got - want) / want) << "; ";
  }
  (void)dummy;
  const bool pass = worst <= 0.01 && monotone && final_gap <= 0.01;
  // Note: with c_s inside the seminorm, [u]^2_{s,0} -> ||grad u||^2 directly
  // as s -> 1; conventions without c_s need the extra (1-s) factor.
  return Outcome{pass, os.str() + "gap to grad-norm at s=0.99: " + fmt(final_gap) +
                           " (<=0.01, monotone=" + (monotone ? "yes" : "no") + ")"};
});

// ---------------------------------------------------------------------------
// 10. Dichotomy splitter bookkeeping on annulus-free two-bump fields.
Register c10(10, "dichotomy split: exact bookkeeping and cross-term constant", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const MagneticPotential A = ConstantFieldPotential{1.0};
  const Grid g = Grid::from_extent(32, 32.0);  // h = 1
  const double h = g.h, rb = 3.0 * h;
  double worst_rem = 0.0, worst_mass = 0.0;
  std::vector<double> cs_measured;
  std::ostringstream os;
  for (double gap : {8.0 * h, 12.0 * h, 16.0 * h}) {
    const double D = gap + 2.0 * rb;
    const Vec3 xi = g.center - Vec3{0.5 * D, 0, 0};
    Field u = make_field(g, BumpGen{xi, rb});
    const Field far_bump = make_field(g, BumpGen{xi + Vec3{D, 0, 0}, rb});
    for (std::size_t f = 0; f < u.size(); ++f) u.values[f] += far_bump.values[f];
    // normalize so the mass identity is the paper's normalized statement
    const double m = lp_mass(u, 3.0);
    for (auto& v : u.values) v *= std::pow(1.0 / m, 1.0 / 3.0);

    const double r_bar = rb + 0.5 * h;
    const double r_n = 4.0 * r_bar;
    const SplitReport rep = dichotomy_split(p, A, u, xi, r_bar, r_n, 3.0);
    worst_rem = std::max(worst_rem, rep.remainder);
    worst_mass = std::max(worst_mass, rep.mass_defect);
    const double defect = std::abs(rep.e1 + rep.e2 - rep.total);
    cs_measured.push_back(defect * std::pow(rep.support_gap, p.s));
    os << "gap " << fmt(rep.support_gap) << ": defect " << fmt(defect) << ", C "
       << fmt(cs_measured.back()) << "; ";
  }
  double cmin = cs_measured[0], cmax = cs_measured[0], cmean = 0.0;
  for (double c : cs_measured) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    cmean += c / cs_measured.size();
  }
  const bool stable = (cmax - cmean) <= 0.2 * cmean && (cmean - cmin) <= 0.2 * cmean;
  const bool pass = worst_rem <= 1e-10 && worst_mass <= 1e-10 && stable;
  return Outcome{pass, os.str() + "remainder " + fmt(worst_rem) + ", mass defect " +
                           fmt(worst_mass) + ", C spread [" + fmt(cmin) + "," + fmt(cmax) +
                           "] about mean " + fmt(cmean) + " (need +-20%)"};
});

// ---------------------------------------------------------------------------
// 11. Nonexistence functional: the energy identity and positivity.
Register c11(11, "Upsilon identity, nonnegativity, and positive fraction", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(12, 8.0);
  const MagneticPotential A = ConstantFieldPotential{2.0};
  QuadPolicy q;

  const Field u = make_random_field(g, 7);
  Field mod = u;
  for (auto& v : mod.values) v = complex(std::abs(v), 0.0);

  const double lhs =
      seminorm_sq(p, A, u, q).gagliardo - seminorm_sq(p, ZeroPotential{}, mod, q).gagliardo;
  // brute-force (c_s/2) sum of Upsilon against the same kernel weights
  const auto W = detail::weight_table(g, p.kernel_exponent(), q.averaged());
  KahanSum acc;
  double min_ups = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [xi, xj, xk] = g.unflatten(i);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (i == j) continue;
      const auto [yi, yj, yk] = g.unflatten(j);
      const double ups = upsilon(p, A, u, i, j);
      min_ups = std::min(min_ups, ups / std::max(1e-300, std::abs(u.values[i]) *
                                                             std::abs(u.values[j])));
      acc.add(ups * W->at(xi - yi, xj - yj, xk - yk));
    }
  }
  const double rhs = 0.5 * p.c_s * acc.value() * std::pow(g.cell_volume(), 2);
  const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);

  const Field gauss = make_field(g, GaussianGen{1.0});
  const auto stats = upsilon_positive_measure(p, A, gauss, 1e-10);

  const bool pass = rel <= 1e-10 && min_ups >= -1e-12 && stats.fraction > 0.5;
  return Outcome{pass, "identity rel dev " + fmt(rel) + " (<=1e-10), min Upsilon/scale " +
                           fmt(min_ups) + " (>=-1e-12), positive fraction " +
                           fmt(stats.fraction) + " (>0.5)"};
});

// ---------------------------------------------------------------------------
// 12. Determinism: same config, seed and threads reproduce results bitwise;
//     the blocked reduction also makes them thread-count independent.
Register c12(12, "reruns are bit-identical (and thread-count independent)", [] {
  const FractionalParams p = FractionalParams::make(0.5, 3.0);
  const Grid g = Grid::from_extent(12, 8.0);
  Field u0 = make_random_field(g, 99);
  const Field gauss = make_field(g, GaussianGen{1.5});
  for (std::size_t f = 0; f < u0.size(); ++f)
    u0.values[f] = gauss.values[f] + 0.1 * u0.values[f];
  const MagneticPotential A = ConstantFieldPotential{1.0};
  MinimizeOptions opt;
  opt.tau = 0.2;
  opt.tol = 1e-6;
  opt.max_iter = 40;

  set_thread_count(2);
  const MinimizationResult r1 = minimize(p, A, u0, Constraint{3.0, 1.0}, opt);
  const MinimizationResult r2 = minimize(p, A, u0, Constraint{3.0, 1.0}, opt);
  set_thread_count(1);
  const MinimizationResult r3 = minimize(p, A, u0, Constraint{3.0, 1.0}, opt);
  set_thread_count(0);

  bool same_rerun = r1.level == r2.level && r1.iterations == r2.iterations;
  bool same_threads = r1.level == r3.level;
  for (std::size_t f = 0; f < r1.minimizer.size(); ++f) {
    same_rerun = same_rerun && r1.minimizer.values[f] == r2.minimizer.values[f];
    same_threads = same_threads && r1.minimizer.values[f] == r3.minimizer.values[f];
  }
  for (std::size_t i = 0; i < r1.energy_trace.size(); ++i)
    same_rerun = same_rerun && r1.energy_trace[i] == r2.energy_trace[i];
  return Outcome{same_rerun && same_threads,
                 std::string("rerun bitwise: ") + (same_rerun ? "yes" : "no") +
                     ", 1 vs 2 threads bitwise: " + (same_threads ? "yes" : "no")};
});

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty())
    for (const auto& [id, entry] : registry()) wanted.push_back(id);

  int failures = 0;
  for (int id : wanted) {
    const auto it = registry().find(id);
    if (it == registry().end()) {
      std::printf("[FAIL] criterion %d: unknown criterion id\n", id);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s — %s\n", o.pass ? "PASS" : "FAIL", id,
                it->second.first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
