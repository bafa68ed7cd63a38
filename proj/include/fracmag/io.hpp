#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fracmag/cc_lab.hpp"
#include "fracmag/field.hpp"
#include "fracmag/gagliardo.hpp"
#include "fracmag/groundstate.hpp"
#include "fracmag/kernel.hpp"
#include "fracmag/operator.hpp"

namespace fracmag {

using json = nlohmann::json;

// --- FMAG1 field snapshots ----------------------------------------------------
//
// Layout (little endian):
//   bytes 0..7   magic "FMAG1\0\0\0"
//   u64          n
//   f64          h
//   f64 x3       center
//   f64          s
//   f64          p
//   f64 x 2 n^3  interleaved (re, im), row-major x,y,z

namespace detail {

inline constexpr char kMagic[8] = {'F', 'M', 'A', 'G', '1', 0, 0, 0};

inline void put_u64(std::string& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& b, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(b, bits);
}
inline std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i]))
                                   << (8 * i);
  return v;
}
inline double get_f64(const char* p) {
  const std::uint64_t bits = get_u64(p);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

struct FieldSnapshot {
  Field field;
  double s = 0.0;
  double p = 0.0;
};

inline void write_fmag1(const std::filesystem::path& path, const Field& u, double s, double p) {
  std::string buf;
  buf.reserve(64 + 16 * u.size());
  buf.append(detail::kMagic, 8);
  detail::put_u64(buf, static_cast<std::uint64_t>(u.grid.n));
  detail::put_f64(buf, u.grid.h);
  detail::put_f64(buf, u.grid.center.x);
  detail::put_f64(buf, u.grid.center.y);
  detail::put_f64(buf, u.grid.center.z);
  detail::put_f64(buf, s);
  detail::put_f64(buf, p);
  for (const complex& v : u.values) {
    detail::put_f64(buf, v.real());
    detail::put_f64(buf, v.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("write_fmag1: cannot open " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw io_error("write_fmag1: short write to " + path.string());
}

inline FieldSnapshot read_fmag1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_fmag1: cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 64 || std::memcmp(buf.data(), detail::kMagic, 8) != 0)
    throw io_error("read_fmag1: bad magic in " + path.string());
  const char* p = buf.data() + 8;
  const std::uint64_t n = detail::get_u64(p);
  p += 8;
  const double h = detail::get_f64(p);
  p += 8;
  Vec3 center{detail::get_f64(p), detail::get_f64(p + 8), detail::get_f64(p + 16)};
  p += 24;
  const double s = detail::get_f64(p);
  p += 8;
  const double pp = detail::get_f64(p);
  p += 8;
  if (n < 4 || n > 4096) throw io_error("read_fmag1: implausible n");
  const Grid g = Grid::make(static_cast<int>(n), h, center);
  if (buf.size() != 64 + 16 * g.node_count())
    throw io_error("read_fmag1: size mismatch in " + path.string());
  Field f = Field::zeros(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.values[i] = complex(detail::get_f64(p), detail::get_f64(p + 8));
    p += 16;
  }
  return FieldSnapshot{std::move(f), s, pp};
}

inline void write_density_fmag1(const std::filesystem::path& path, const DensityField& mu,
                                double s, double p) {
  Field f = Field::zeros(mu.grid);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = complex(mu.mu[i], 0.0);
  write_fmag1(path, f, s, p);
}

// --- JSON ----------------------------------------------------------------------

inline json to_json(const Grid& g) {
  return json{{"n", g.n}, {"h", g.h}, {"center", {g.center.x, g.center.y, g.center.z}}};
}

inline json to_json(const FractionalParams& p) {
  return json{{"s", p.s}, {"p", p.p}, {"c_s", p.c_s}, {"p_crit", p.p_crit}};
}

inline json to_json(const EnergyBreakdown& e) {
  return json{{"l2", e.l2},
              {"gagliardo", e.gagliardo},
              {"tail_bound", e.tail_bound},
              {"total", e.total},
              {"gagliardo_near", e.gagliardo_near},
              {"gagliardo_far", e.gagliardo_far},
              {"gagliardo_exterior", e.gagliardo_exterior},
              {"fastfar_error_bound", e.fastfar_error_bound}};
}

inline json to_json(const MagneticPotential& A) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return json{{"kind", "zero"}};
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return json{{"kind", "linear"}, {"matrix", a.M.m}, {"offset", {a.b.x, a.b.y, a.b.z}}};
        } else if constexpr (std::is_same_v<T, ConstantFieldPotential>) {
          return json{{"kind", "constant-field"}, {"b", a.b}};
        } else {
          return json{{"kind", "tabulated"}, {"n", a.grid.n}};
        }
      },
      A);
}

inline json to_json(const TalentiCalibration& c) {
  return json{{"d_s", c.d_s},
              {"residual_wrms", c.residual_wrms},
              {"residual_max_interior", c.residual_max_interior},
              {"grid", {{"n", c.n}, {"L", c.box_extent}}},
              {"fit_nodes", c.fit_nodes}};
}

inline json to_json(const UpsilonStats& u) {
  return json{{"fraction", u.fraction},
              {"threshold", u.threshold},
              {"pairs_sampled", u.pairs_sampled},
              {"pairs_above", u.pairs_above},
              {"stride_x", u.stride_x},
              {"stride_y", u.stride_y}};
}

inline json to_json(const SplitReport& r) {
  return json{{"support_gap", r.support_gap}, {"e1", r.e1},
              {"e2", r.e2},                   {"remainder", r.remainder},
              {"mass_defect", r.mass_defect}, {"total", r.total}};
}

inline json to_json(const MinimizationResult& r) {
  return json{{"level", r.level},
              {"lagrange", r.lagrange},
              {"iterations", r.iterations},
              {"constraint_residual", r.constraint_residual},
              {"grad_norm", r.grad_norm},
              {"converged", r.converged},
              {"critical_warning", r.critical_warning}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("write_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("read_json: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw io_error("read_json: parse failure in " + path.string() + ": " + e.what());
  }
  return j;
}

// --- trace CSV -------------------------------------------------------------------

inline void write_trace_csv(const std::filesystem::path& path,
                            const std::vector<TraceRow>& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("write_trace_csv: cannot open " + path.string());
  out << "iter,energy,constraint_residual,grad_norm\n";
  char line[160];
  for (const TraceRow& r : trace) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g\n", r.iter, r.energy,
                  r.constraint_residual, r.grad_norm);
    out << line;
  }
}

}  // namespace fracmag
