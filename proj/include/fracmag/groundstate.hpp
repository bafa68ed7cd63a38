#pragma once

#include <cmath>
#include <functional>
#include <unordered_map>
#include <vector>

#include "fracmag/operator.hpp"

namespace fracmag {

/// L^p-sphere constraint: the discrete mass sum |u|^p h^3 is held at `mass`.
struct Constraint {
  double p = 3.0;
  double mass = 1.0;
};

struct MinimizeOptions {
  double tau = 0.25;       // initial gradient step; backtracking halves it
  int max_iter = 500;
  double tol = 1e-6;       // exit when the relative energy decrease drops below
  bool radial = false;     // project iterates onto the radial subspace
  QuadPolicy policy{};     // quadrature for energies and gradients
  int max_backtracks = 40;
};

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double constraint_residual = 0.0;
  double grad_norm = 0.0;
};

struct MinimizationResult {
  double level = 0.0;
  Field minimizer;
  double lagrange = 0.0;
  int iterations = 0;
  std::vector<double> energy_trace;
  std::vector<TraceRow> trace;
  double constraint_residual = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  // Set for critical-exponent runs: the infimum need not be attained and
  // iterates may concentrate; levels are reported, attainment is not claimed.
  bool critical_warning = false;
};

/// Spherical average about the grid center: nodes are binned by their exact
/// squared lattice radius, values replaced by the bin mean.  This is the
/// orthogonal projection onto radial fields in the discrete L^2 sense.
inline Field radial_average(const Field& u) {
  const Grid& g = u.grid;
  const int n = g.n;
  std::unordered_map<long long, int> shell_of;
  std::vector<int> shell(u.size());
  std::vector<long long> keys;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const auto [i, j, k] = g.unflatten(f);
    const long long a = 2 * i - (n - 1), b = 2 * j - (n - 1), c = 2 * k - (n - 1);
    const long long key = a * a + b * b + c * c;
    auto it = shell_of.find(key);
    if (it == shell_of.end()) {
      it = shell_of.emplace(key, static_cast<int>(keys.size())).first;
      keys.push_back(key);
    }
    shell[f] = it->second;
  }
  std::vector<KahanSum> re(keys.size()), im(keys.size());
  std::vector<int> count(keys.size(), 0);
  for (std::size_t f = 0; f < u.size(); ++f) {
    re[shell[f]].add(u.values[f].real());
    im[shell[f]].add(u.values[f].imag());
    ++count[shell[f]];
  }
  Field out = Field::zeros(g);
  for (std::size_t f = 0; f < u.size(); ++f) {
    const int s = shell[f];
    out.values[f] = complex(re[s].value() / count[s], im[s].value() / count[s]);
  }
  return out;
}

namespace detail {

inline void project_lp(Field& u, const Constraint& c) {
  const double m = lp_mass(u, c.p);
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::runtime_error("minimize: zero-field collapse during projection");
  const double f = std::pow(c.mass / m, 1.0 / c.p);
  for (complex& v : u.values) v *= f;
}

inline MinimizationResult gradient_flow(const FractionalParams& p, const MagneticPotential& A,
                                        const Field& u0, const Constraint& cons,
                                        const MinimizeOptions& opt, bool include_l2) {
  if (!(opt.tau > 0.0)) throw domain_error("minimize: tau must be positive");
  double l2_at_u0 = l2_mass(u0);
  if (!(l2_at_u0 > 0.0)) throw std::runtime_error("minimize: u0 must be nonzero");

  OperatorPolicy grad_policy;
  grad_policy.form = OperatorForm::PrincipalValue;
  grad_policy.r_cut = std::numeric_limits<double>::infinity();
  grad_policy.exterior = opt.policy.exterior;
  grad_policy.diagonal = opt.policy.diagonal;

  auto energy = [&](const Field& u) {
    const EnergyBreakdown e = seminorm_sq(p, A, u, opt.policy);
    return include_l2 ? e.total : e.gagliardo;
  };

  Field u = u0;
  if (opt.radial) u = radial_average(u);
  detail::project_lp(u, cons);

  MinimizationResult res;
  res.critical_warning = !include_l2;
  double E = energy(u);
  res.energy_trace.push_back(E);
  double tau = opt.tau;
  bool reached_tol = false;
  int iter = 0;

  const double h3 = u.grid.cell_volume();
  while (iter < opt.max_iter) {
    ++iter;
    const OperatorResult op = apply_operator(p, A, u, grad_policy);
    // Raw energy gradient 2((-Delta)^s_A u + u), minus its component along
    // the constraint direction |u|^{p-2} u.  The raw direction can fail to
    // descend after renormalization (the rescaling feeds energy back in);
    // the tangential part always descends, and it vanishes exactly at the
    // constrained stationary points.
    Field grad = Field::zeros(u.grid);
    KahanSum gn_dot, nn_dot;
    for (std::size_t f = 0; f < u.size(); ++f) {
      complex gv = 2.0 * op.out.values[f];
      if (include_l2) gv += 2.0 * u.values[f];
      grad.values[f] = gv;
      const complex nv = std::pow(std::abs(u.values[f]), cons.p - 2.0) * u.values[f];
      gn_dot.add(gv.real() * nv.real() + gv.imag() * nv.imag());
      nn_dot.add(std::norm(nv));
    }
    const double lam = nn_dot.value() > 0.0 ? gn_dot.value() / nn_dot.value() : 0.0;
    KahanSum gn2;
    for (std::size_t f = 0; f < u.size(); ++f) {
      const complex nv = std::pow(std::abs(u.values[f]), cons.p - 2.0) * u.values[f];
      grad.values[f] -= lam * nv;
      gn2.add(std::norm(grad.values[f]));
    }
    const double grad_norm = std::sqrt(gn2.value() * h3);

    bool accepted = false;
    Field best = u;
    double Ebest = E;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      Field trial = u;
      for (std::size_t f = 0; f < trial.size(); ++f)
        trial.values[f] -= tau * grad.values[f];
      if (opt.radial) trial = radial_average(trial);
      detail::project_lp(trial, cons);
      const double Et = energy(trial);
      if (Et <= E) {
        best = std::move(trial);
        Ebest = Et;
        accepted = true;
        // a clean first-try acceptance lets the step recover from earlier
        // halvings, up to a fixed multiple of the configured step
        if (bt == 0) tau = std::min(tau * 1.25, 16.0 * opt.tau);
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // no downhill step at line-search resolution: stationary for this flow
      reached_tol = true;
      break;
    }
    const double rel_dec = (E - Ebest) / std::max(std::abs(E), 1e-300);
    u = std::move(best);
    E = Ebest;
    res.energy_trace.push_back(E);
    const double cres = std::abs(lp_mass(u, cons.p) - cons.mass);
    res.trace.push_back(TraceRow{iter, E, cres, grad_norm});
    res.constraint_residual = cres;
    res.grad_norm = grad_norm;
    if (rel_dec < opt.tol) {
      reached_tol = true;
      break;
    }
  }

  res.level = E;
  res.minimizer = std::move(u);
  res.iterations = iter;
  res.converged = reached_tol;
  res.lagrange = res.level / cons.mass;
  return res;
}

}  // namespace detail

/// Projected gradient flow for M_A = inf ||u||_{s,A}^2 over the L^p sphere.
/// Monotone by construction; lagrange is level/mass by the stationarity
/// pairing ||u||_{s,A}^2 = lambda ||u||_p^p.
inline MinimizationResult minimize(const FractionalParams& p, const MagneticPotential& A,
                                   const Field& u0, const Constraint& cons,
                                   const MinimizeOptions& opt = {}) {
  if (!(cons.p > 2.0 && cons.p <= p.p_crit + 1e-12))
    throw domain_error("minimize: constraint exponent must lie in (2, 6/(3-2s)]");
  if (!(cons.mass > 0.0)) throw domain_error("minimize: target mass must be positive");
  return detail::gradient_flow(p, A, u0, cons, opt, /*include_l2=*/true);
}

/// Critical-exponent flow: minimizes the Gagliardo part only on the
/// L^{6/(3-2s)} unit sphere.  The result carries critical_warning: the
/// infimum may be unattained and iterates may concentrate.
inline MinimizationResult critical_level(const FractionalParams& p, const MagneticPotential& A,
                                         const Field& u0, const MinimizeOptions& opt = {}) {
  if (std::abs(p.p - p.p_crit) > 1e-9 * p.p_crit)
    throw domain_error("critical_level: params.p must equal the critical exponent");
  return detail::gradient_flow(p, A, u0, Constraint{p.p_crit, 1.0}, opt, /*include_l2=*/false);
}

/// w = lambda^{1/(p-2)} u turns the constrained minimizer into a solution of
/// the unconstrained equation (the multiplier is absorbed).
inline Field remove_multiplier(const MinimizationResult& r, const FractionalParams& p) {
  if (!(p.p > 2.0)) throw domain_error("remove_multiplier: requires p > 2");
  const double f = std::pow(r.lagrange, 1.0 / (p.p - 2.0));
  Field w = r.minimizer;
  for (complex& v : w.values) v *= f;
  return w;
}

/// Magnetic seminorm of the concentration rescaling
/// u_sigma(x) = sigma^{-(3-2s)/2} u(x/sigma), evaluated on the grid scaled by
/// sigma so the relative resolution is constant.  For A = 0 the curve is
/// exactly scale invariant.
inline std::vector<std::pair<double, double>> sigma_scaling_curve(
    const FractionalParams& p, const MagneticPotential& A, const Field& u,
    std::span<const double> sigmas, const QuadPolicy& policy = {}) {
  std::vector<std::pair<double, double>> out;
  out.reserve(sigmas.size());
  for (double s : sigmas) {
    if (!(s > 0.0 && s <= 1.0))
      throw domain_error("sigma_scaling_curve: sigma must lie in (0,1]");
    Grid gs = u.grid;
    gs.h = u.grid.h * s;
    gs.center = s * u.grid.center;
    Field us{gs, u.values};
    const double f = std::pow(s, -0.5 * (3.0 - 2.0 * p.s));
    for (complex& v : us.values) v *= f;
    out.emplace_back(s, seminorm_sq(p, A, us, policy).gagliardo);
  }
  return out;
}

}  // namespace fracmag
