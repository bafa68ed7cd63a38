// fracmag: batch driver for the fractional magnetic Laplacian toolkit.
// Every run writes a manifest first, then its outputs; identical config,
// seed and thread count reproduce outputs byte for byte.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracmag/fracmag.hpp"

namespace fs = std::filesystem;
using namespace fracmag;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct validation_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw validation_failure("bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

MagneticPotential parse_potential(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "zero") return ZeroPotential{};
  if (kind == "constant-field") {
    if (rest.empty()) throw validation_failure("potential: constant-field needs ':<b>'");
    return ConstantFieldPotential{std::stod(rest)};
  }
  if (kind == "linear") {
    const auto v = parse_csv_doubles(rest);
    if (v.size() != 9 && v.size() != 12)
      throw validation_failure("potential: linear needs 9 matrix entries [+3 offset]");
    Mat3 M;
    for (int i = 0; i < 9; ++i) M.m[i] = v[i];
    Vec3 b{};
    if (v.size() == 12) b = {v[9], v[10], v[11]};
    return LinearPotential{M, b};
  }
  throw validation_failure("potential: unknown kind '" + kind + "' (zero | constant-field:<b> | "
                           "linear:<9 or 12 numbers>)");
}

struct RunConfig {
  double s = 0.5;
  double p = 3.0;
  int n = 16;
  double extent = 8.0;
  std::vector<double> center{0.0, 0.0, 0.0};
  std::string potential = "zero";
  std::string field = "gaussian:1";
  std::string out_dir = "fracmag-out";
  int threads = 0;
  std::uint64_t seed = 1;
  std::string exterior = "padded";
  std::string diagonal = "cell-average";
  std::string far = "exact";
  double r_cut = 0.0;

  Grid grid() const {
    if (center.size() != 3) throw validation_failure("--center needs three components");
    return Grid::from_extent(n, extent, Vec3{center[0], center[1], center[2]});
  }
  FractionalParams params() const { return FractionalParams::make(s, p); }
  MagneticPotential pot() const { return parse_potential(potential); }

  QuadPolicy quad_policy() const {
    QuadPolicy q;
    q.r_cut = r_cut;
    if (far == "exact")
      q.far = FarFieldRule::Exact;
    else if (far == "fast-far")
      q.far = FarFieldRule::FastFar;
    else
      throw validation_failure("--far must be exact | fast-far");
    if (exterior == "inbox")
      q.exterior = ExteriorRule::InBoxOnly;
    else if (exterior == "padded")
      q.exterior = ExteriorRule::ZeroPadded;
    else
      throw validation_failure("--exterior must be inbox | padded");
    if (diagonal == "cell-average")
      q.diagonal = DiagonalRule::CellAverage;
    else if (diagonal == "midpoint")
      q.diagonal = DiagonalRule::Midpoint;
    else
      throw validation_failure("--diagonal must be cell-average | midpoint");
    return q;
  }
};

Field build_field(const RunConfig& cfg, const Grid& g) {
  const std::string& spec = cfg.field;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "file") {
    if (rest.empty()) throw validation_failure("--field file needs ':<path>'");
    auto snap = read_fmag1(rest);
    return std::move(snap.field);
  }
  if (kind == "random") return make_random_field(g, cfg.seed);
  if (kind == "gaussian") {
    const double w = rest.empty() ? g.extent() / 6.0 : std::stod(rest);
    return make_field(g, GaussianGen{w});
  }
  if (kind == "bump") {
    const auto v = parse_csv_doubles(rest);
    if (v.empty()) throw validation_failure("--field bump needs ':<radius>[,cx,cy,cz]'");
    Vec3 c = g.center;
    if (v.size() == 4) c = {v[1], v[2], v[3]};
    return make_field(g, BumpGen{c, v[0]});
  }
  if (kind == "talenti") {
    const auto v = parse_csv_doubles(rest);
    if (v.size() != 2) throw validation_failure("--field talenti needs ':<eps>,<d_s>'");
    return make_field(g, TalentiGen{g.center, v[0], v[1], cfg.s});
  }
  if (kind == "two-bumps") {
    const auto v = parse_csv_doubles(rest);
    if (v.empty()) throw validation_failure("--field two-bumps needs ':<sep>[,<radius>]'");
    return make_field(g, TwoBumpsGen{v[0], v.size() > 1 ? v[1] : 0.0});
  }
  throw validation_failure("--field: unknown kind '" + kind + "'");
}

json policy_json(const QuadPolicy& q, const Grid& g) {
  return json{{"r_cut", q.resolved_r_cut(g)},
              {"far", q.far == FarFieldRule::Exact ? "exact" : "fast-far"},
              {"exterior", q.exterior == ExteriorRule::InBoxOnly ? "inbox" : "padded"},
              {"diagonal",
               q.diagonal == DiagonalRule::CellAverage ? "cell-average" : "midpoint"}};
}

fs::path prepare_out_dir(const RunConfig& cfg, const std::string& command,
                         const json& options) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  json manifest{{"command", command},
                {"params", {{"s", cfg.s}, {"p", cfg.p}}},
                {"grid", to_json(cfg.grid())},
                {"potential", cfg.potential},
                {"field", cfg.field},
                {"threads", thread_count()},
                {"seed", cfg.seed},
                {"options", options}};
  write_json(dir / "manifest.json", manifest);
  return dir;
}

void write_field_outputs(const fs::path& dir, const std::string& stem, const Field& f,
                         const RunConfig& cfg, const json& extra_meta = json::object()) {
  write_fmag1(dir / (stem + ".fmag"), f, cfg.s, cfg.p);
  json meta{{"grid", to_json(f.grid)},
            {"params", {{"s", cfg.s}, {"p", cfg.p}}},
            {"potential", cfg.potential},
            {"generator", cfg.field}};
  for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) meta[it.key()] = it.value();
  write_json(dir / (stem + ".fmag.json"), meta);
}

// --- verify suites ------------------------------------------------------------

json run_verify_suite(const RunConfig& cfg, const std::string& suite, int field_count,
                      double& violation, double& bound) {
  const Grid g = cfg.grid();
  const FractionalParams p = cfg.params();
  const MagneticPotential A = cfg.pot();
  json detail = json::array();
  violation = 0.0;

  if (suite == "diamagnetic") {
    bound = 1e-12;
    for (int fidx = 0; fidx < field_count; ++fidx) {
      const Field u = make_random_field(g, cfg.seed + fidx);
      double worst = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j) {
          const auto ks = kernel_sample(p, A, g.node(i), g.node(j));
          const double lhs = std::abs(std::abs(u.values[i]) - std::abs(u.values[j]));
          const double rhs = std::abs(ks.phase * u.values[i] - u.values[j]);
          worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
        }
      detail.push_back(json{{"field", fidx}, {"max_violation", worst}});
      violation = std::max(violation, worst);
    }
  } else if (suite == "upsilon") {
    bound = 1e-12;
    for (int fidx = 0; fidx < field_count; ++fidx) {
      const Field u = make_random_field(g, cfg.seed + fidx);
      double worst = 0.0;
      const auto stats = upsilon_positive_measure(p, A, u, 0.0);
      for (std::size_t i = 0; i < u.size(); i += 3)
        for (std::size_t j = i + 1; j < u.size(); j += 5) {
          const double ups = upsilon(p, A, u, i, j);
          const double scale = std::abs(u.values[i]) * std::abs(u.values[j]);
          worst = std::max(worst, -ups / std::max(scale, 1e-300));
        }
      detail.push_back(json{{"field", fidx},
                            {"max_negativity", worst},
                            {"positive_fraction", stats.fraction}});
      violation = std::max(violation, worst);
    }
  } else if (suite == "gauge") {
    bound = 1e-10;
    QuadPolicy q = cfg.quad_policy();
    q.exterior = ExteriorRule::ZeroPadded;  // translation-exact quadrature
    for (int fidx = 0; fidx < field_count; ++fidx) {
      const Field u = make_field(g, BumpGen{g.center, 0.3 * g.extent()});
      const std::array<int, 3> cells{1 + fidx, -1, 2};
      const Vec3 xi{g.h * cells[0], g.h * cells[1], g.h * cells[2]};
      const Vec3 eta = -1.0 * eval_potential(A, xi);
      const auto [v, desc] = gauge_transform(u, cells, eta);
      const MagneticPotential Aeta = shift_potential(A, desc.xi, desc.eta);
      const double a = seminorm_sq(p, A, u, q).total;
      const double b = seminorm_sq(p, Aeta, v, q).total;
      const double rel = std::abs(a - b) / std::max(a, 1e-300);
      detail.push_back(json{{"shift", fidx}, {"rel_mismatch", rel}});
      violation = std::max(violation, rel);
    }
  } else if (suite == "cutoff") {
    bound = 1.0;
    const Field u = make_field(g, GaussianGen{g.extent() / 6.0});
    const CutoffField phi = cutoff(std::max(2.0 * g.h, g.extent() / 8.0), g.center, g);
    std::vector<std::uint8_t> all(g.node_count(), 1);
    const auto est = verify_cutoff_estimate(p, A, u, phi.phi, phi.lipschitz, all, all);
    detail.push_back(json{{"lhs", est.lhs}, {"rhs", est.rhs}, {"C", est.constant}});
    violation = est.ratio;
  } else {
    throw validation_failure("--suite must be diamagnetic | upsilon | gauge | cutoff");
  }
  return detail;
}

// --- plotdata -----------------------------------------------------------------

void emit_plotdata(const std::string& kind, const fs::path& input, const fs::path& output) {
  if (!fs::exists(input)) throw numerical_failure("plotdata: input does not exist: " + input.string());
  if (fs::is_regular_file(input) && fs::file_size(input) == 0)
    throw numerical_failure("plotdata: empty result file: " + input.string());
  std::ofstream out;
  auto open_out = [&] {
    out.open(output, std::ios::trunc);
    if (!out) throw numerical_failure("plotdata: cannot open output " + output.string());
  };

  if (kind == "trace") {
    std::ifstream in(input);
    std::string header;
    if (!std::getline(in, header) || header != "iter,energy,constraint_residual,grad_norm")
      throw numerical_failure("plotdata: " + input.string() +
                              " offset 0: expected trace header");
    open_out();
    out << header << "\n";
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (parse_csv_doubles(line).size() != 4)
        throw numerical_failure("plotdata: " + input.string() + " line " +
                                std::to_string(lineno) + ": expected 4 columns");
      out << line << "\n";
    }
  } else if (kind == "sigma-curve") {
    const json j = read_json(input);
    if (!j.contains("curve")) throw numerical_failure("plotdata: no 'curve' in " + input.string());
    open_out();
    out << "sigma,seminorm_sq,nonmagnetic_ref\n";
    const double ref = j.value("nonmagnetic_ref", 0.0);
    char line[128];
    for (const auto& row : j["curve"]) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", row[0].get<double>(),
                    row[1].get<double>(), ref);
      out << line;
    }
  } else if (kind == "concentration") {
    const json j = read_json(input);
    if (!j.contains("concentration"))
      throw numerical_failure("plotdata: no 'concentration' in " + input.string());
    open_out();
    out << "radius,mass\n";
    char line[96];
    for (const auto& row : j["concentration"]) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g\n", row[0].get<double>(),
                    row[1].get<double>());
      out << line;
    }
  } else if (kind == "radial-profile") {
    const auto snap = read_fmag1(input);
    const Grid& g = snap.field.grid;
    std::map<long long, std::pair<double, int>> shells;
    for (std::size_t f = 0; f < snap.field.size(); ++f) {
      const auto [i, j2, k] = g.unflatten(f);
      const long long a = 2 * i - (g.n - 1), b = 2 * j2 - (g.n - 1), c = 2 * k - (g.n - 1);
      auto& slot = shells[a * a + b * b + c * c];
      slot.first += std::abs(snap.field.values[f]);
      slot.second += 1;
    }
    open_out();
    out << "r,mean_abs\n";
    char line[96];
    for (const auto& [key, slot] : shells) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g\n", 0.5 * g.h * std::sqrt(double(key)),
                    slot.first / slot.second);
      out << line;
    }
  } else {
    throw validation_failure("--kind must be trace | sigma-curve | concentration | radial-profile");
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"fractional magnetic Laplacian toolkit"};
  app.set_config("--config");
  app.add_option("--s", cfg.s, "fractional exponent in (0,1)");
  app.add_option("--p", cfg.p, "Lebesgue exponent in (2, 6/(3-2s)]");
  app.add_option("--n", cfg.n, "grid nodes per axis");
  app.add_option("--L", cfg.extent, "box extent (n h)");
  app.add_option("--center", cfg.center, "box center")->expected(3);
  app.add_option("--potential", cfg.potential,
                 "zero | constant-field:<b> | linear:<9 or 12 csv>");
  app.add_option("--field", cfg.field,
                 "gaussian:<w> | bump:<r>[,c] | talenti:<eps>,<d> | two-bumps:<sep>[,<r>] | "
                 "random | file:<path>");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  app.add_option("--seed", cfg.seed, "seed for deterministic random fields");
  app.add_option("--exterior", cfg.exterior, "inbox | padded");
  app.add_option("--diagonal", cfg.diagonal, "cell-average | midpoint");
  app.add_option("--far", cfg.far, "exact | fast-far");
  app.add_option("--rcut", cfg.r_cut, "near/far split radius (0 = box half-width)");

  auto* cmd_seminorm = app.add_subcommand("seminorm", "magnetic Gagliardo energy of a field");

  auto* cmd_apply = app.add_subcommand("apply", "apply the operator pointwise");
  std::string form = "pv";
  double op_eps = 0.0, op_rcut = 0.0;
  cmd_apply->add_option("--form", form, "pv | sd");
  cmd_apply->add_option("--epsilon", op_eps, "inner exclusion radius (0 = h/2)");
  cmd_apply->add_option("--op-rcut", op_rcut, "outer cutoff (0 = unbounded)");

  auto* cmd_minimize = app.add_subcommand("minimize", "constrained ground-state flow");
  double mass = 1.0, tau = 0.25, tol = 1e-6;
  int max_iter = 500;
  bool radial = false;
  cmd_minimize->add_option("--mass", mass, "L^p mass target");
  cmd_minimize->add_option("--tau", tau, "initial step");
  cmd_minimize->add_option("--tol", tol, "relative energy decrease tolerance");
  cmd_minimize->add_option("--max-iter", max_iter, "iteration cap");
  cmd_minimize->add_flag("--radial", radial, "project onto radial fields");

  auto* cmd_critical = app.add_subcommand("critical", "critical-exponent flow (no L2 term)");
  cmd_critical->add_option("--tau", tau, "initial step");
  cmd_critical->add_option("--tol", tol, "relative energy decrease tolerance");
  cmd_critical->add_option("--max-iter", max_iter, "iteration cap");

  auto* cmd_sigma = app.add_subcommand("sigma-curve", "seminorm of concentration rescalings");
  std::string sigmas = "1,0.5,0.25,0.125";
  cmd_sigma->add_option("--sigmas", sigmas, "comma separated sigma values in (0,1]");

  auto* cmd_split = app.add_subcommand("split", "dichotomy splitter");
  double r_bar = 0.0, r_n = 0.0;
  std::vector<double> xi_vec{0.0, 0.0, 0.0};
  cmd_split->add_option("--rbar", r_bar, "inner cutoff radius")->required();
  cmd_split->add_option("--rn", r_n, "outer radius (>= 4 rbar)")->required();
  cmd_split->add_option("--xi", xi_vec, "split center")->expected(3);

  auto* cmd_verify = app.add_subcommand("verify", "inequality/identity verification suites");
  std::string suite;
  int vfields = 5;
  cmd_verify->add_option("--suite", suite, "diamagnetic | upsilon | gauge | cutoff")->required();
  cmd_verify->add_option("--fields", vfields, "number of random fields");

  auto* cmd_calibrate = app.add_subcommand("calibrate", "Talenti bubble calibration");
  int cal_n = 96;
  double cal_L = 32.0;
  cmd_calibrate->add_option("--cal-n", cal_n, "calibration grid nodes");
  cmd_calibrate->add_option("--cal-L", cal_L, "calibration box extent");

  auto* cmd_plot = app.add_subcommand("plotdata", "tidy CSV from result files");
  std::string kind, input, output = "plot.csv";
  cmd_plot->add_option("--kind", kind, "trace | sigma-curve | concentration | radial-profile")
      ->required();
  cmd_plot->add_option("--input", input, "result file")->required();
  cmd_plot->add_option("--output", output, "CSV path");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (const char* env = std::getenv("FRACMAG_THREADS")) cfg.threads = std::atoi(env);
    set_thread_count(cfg.threads);

    if (cmd_plot->parsed()) {
      emit_plotdata(kind, input, output);
      return 0;
    }

    const Grid g = cfg.grid();
    const FractionalParams p = cfg.params();

    if (cmd_seminorm->parsed()) {
      const QuadPolicy q = cfg.quad_policy();
      const fs::path dir = prepare_out_dir(cfg, "seminorm", policy_json(q, g));
      const Field u = build_field(cfg, g);
      const EnergyBreakdown e = seminorm_sq(p, cfg.pot(), u, q);
      write_json(dir / "energy.json", to_json(e));
      write_field_outputs(dir, "field", u, cfg);
    } else if (cmd_apply->parsed()) {
      OperatorPolicy op;
      if (form == "pv")
        op.form = OperatorForm::PrincipalValue;
      else if (form == "sd")
        op.form = OperatorForm::SymmetricDifference;
      else
        throw validation_failure("--form must be pv | sd");
      op.epsilon = op_eps;
      if (op_rcut > 0.0) op.r_cut = op_rcut;
      op.exterior = cfg.quad_policy().exterior;
      op.diagonal = cfg.quad_policy().diagonal;
      const fs::path dir = prepare_out_dir(
          cfg, "apply",
          json{{"form", form}, {"epsilon", op.resolved_epsilon(g)}, {"r_cut", op.r_cut}});
      const Field u = build_field(cfg, g);
      const OperatorResult r = apply_operator(p, cfg.pot(), u, op);
      write_field_outputs(dir, "out", r.out, cfg);
      Field mask = Field::zeros(g);
      for (std::size_t f = 0; f < mask.size(); ++f)
        mask.values[f] = complex(r.interior[f] ? 1.0 : 0.0, 0.0);
      write_field_outputs(dir, "interior", mask, cfg);
    } else if (cmd_minimize->parsed() || cmd_critical->parsed()) {
      MinimizeOptions opt;
      opt.tau = tau;
      opt.tol = tol;
      opt.max_iter = max_iter;
      opt.radial = radial;
      opt.policy = cfg.quad_policy();
      const bool critical = cmd_critical->parsed();
      const fs::path dir = prepare_out_dir(
          cfg, critical ? "critical" : "minimize",
          json{{"mass", mass},
               {"tau", tau},
               {"tol", tol},
               {"max_iter", max_iter},
               {"radial", radial},
               {"policy", policy_json(opt.policy, g)}});
      const Field u0 = build_field(cfg, g);
      const MinimizationResult r =
          critical ? critical_level(FractionalParams::critical(cfg.s), cfg.pot(), u0, opt)
                   : minimize(p, cfg.pot(), u0, Constraint{cfg.p, mass}, opt);
      json rj = to_json(r);
      if (critical) {
        const DensityField mu = density(FractionalParams::critical(cfg.s), cfg.pot(),
                                        r.minimizer, opt.policy);
        const double radii[3] = {g.extent() / 8.0, g.extent() / 4.0, g.extent() / 2.0};
        json conc = json::array();
        for (const auto& [rad, qv] : concentration_function(mu, radii))
          conc.push_back(json::array({rad, qv}));
        rj["concentration"] = conc;
      }
      write_json(dir / "result.json", rj);
      write_trace_csv(dir / "trace.csv", r.trace);
      write_field_outputs(dir, "minimizer", r.minimizer, cfg);
      if (!r.converged) {
        std::cerr << "flow did not meet tol within max_iter\n";
        return kExitNumerical;
      }
    } else if (cmd_sigma->parsed()) {
      const QuadPolicy q = cfg.quad_policy();
      const fs::path dir =
          prepare_out_dir(cfg, "sigma-curve", json{{"sigmas", sigmas},
                                                   {"policy", policy_json(q, g)}});
      const Field u = build_field(cfg, g);
      const auto sig = parse_csv_doubles(sigmas);
      const auto curve = sigma_scaling_curve(p, cfg.pot(), u, sig, q);
      const double ref = seminorm_sq(p, ZeroPotential{}, u, q).gagliardo;
      json cj = json::array();
      for (const auto& [sv, val] : curve) cj.push_back(json::array({sv, val}));
      write_json(dir / "sigma_curve.json", json{{"curve", cj}, {"nonmagnetic_ref", ref}});
    } else if (cmd_split->parsed()) {
      const QuadPolicy q = cfg.quad_policy();
      const fs::path dir = prepare_out_dir(
          cfg, "split",
          json{{"rbar", r_bar}, {"rn", r_n}, {"xi", xi_vec}, {"policy", policy_json(q, g)}});
      const Field u = build_field(cfg, g);
      const SplitReport rep = dichotomy_split(p, cfg.pot(), u, {xi_vec[0], xi_vec[1], xi_vec[2]},
                                              r_bar, r_n, cfg.p, q);
      write_json(dir / "split.json", to_json(rep));
      write_field_outputs(dir, "u1", rep.u1, cfg);
      write_field_outputs(dir, "u2", rep.u2, cfg);
    } else if (cmd_verify->parsed()) {
      const fs::path dir = prepare_out_dir(cfg, "verify",
                                           json{{"suite", suite}, {"fields", vfields}});
      double violation = 0.0, bound = 0.0;
      const json detail = run_verify_suite(cfg, suite, vfields, violation, bound);
      const bool pass = violation <= bound;
      write_json(dir / "report.json", json{{"suite", suite},
                                           {"max_violation", violation},
                                           {"bound", bound},
                                           {"pass", pass},
                                           {"detail", detail}});
      if (!pass) {
        std::cerr << "verify: suite '" << suite << "' violation " << violation << " exceeds "
                  << bound << "\n";
        return kExitNumerical;
      }
    } else if (cmd_calibrate->parsed()) {
      const fs::path dir = prepare_out_dir(cfg, "calibrate",
                                           json{{"cal_n", cal_n}, {"cal_L", cal_L}});
      const TalentiCalibration c = calibrate_talenti(p, cal_n, cal_L);
      write_json(dir / "calibration.json", to_json(c));
    }
    return 0;
  } catch (const validation_failure& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const policy_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const grid_mismatch_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const unsupported_kind_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const numerical_failure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const calibration_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
