#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "fracmag/grid.hpp"

namespace fracmag::detail {

// 16-point Gauss-Legendre rule on [-1/2, 1/2], computed once by Newton
// iteration on P_16.
struct GaussRule {
  std::array<double, 16> x{}, w{};
};

inline const GaussRule& gauss16() {
  static const GaussRule rule = [] {
    GaussRule r;
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) break;
      }
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      r.x[i] = 0.5 * t;
      r.w[i] = 0.5 * 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return r;
  }();
  return rule;
}

/// Average of |d + w|^{-q} over the unit cell w in [-1/2,1/2]^3 (lattice
/// units).  Exact cell integration of the Riesz kernel; used for offsets
/// near the diagonal where the midpoint rule underestimates badly.
inline double cell_averaged_kernel(int dx, int dy, int dz, double q) {
  const GaussRule& g = gauss16();
  double acc = 0.0;
  for (int a = 0; a < 16; ++a) {
    const double xa = dx + g.x[a];
    for (int b = 0; b < 16; ++b) {
      const double yb = dy + g.x[b];
      const double wab = g.w[a] * g.w[b];
      double inner = 0.0;
      for (int c = 0; c < 16; ++c) {
        const double zc = dz + g.x[c];
        const double r2 = xa * xa + yb * yb + zc * zc;
        inner += g.w[c] * std::pow(r2, -0.5 * q);
      }
      acc += wab * inner;
    }
  }
  return acc;
}

/// Offsets with |d|_inf <= this radius use cell-averaged weights.
inline constexpr int kAveragedRadius = 3;

inline double unit_lattice_weight(int dx, int dy, int dz, double q, bool averaged) {
  if (dx == 0 && dy == 0 && dz == 0) return 0.0;
  if (averaged && std::abs(dx) <= kAveragedRadius && std::abs(dy) <= kAveragedRadius &&
      std::abs(dz) <= kAveragedRadius)
    return cell_averaged_kernel(dx, dy, dz, q);
  const double r2 = double(dx) * dx + double(dy) * dy + double(dz) * dz;
  return std::pow(r2, -0.5 * q);
}

/// Sum of unit-lattice weights over 0 < |d| <= K; K = +inf gives the full
/// lattice constant.  Offsets are enumerated up to radius 60, the remainder
/// is the integral tail 4 pi K0^{3-q} / (q-3) (midpoint sum and integral
/// agree to O(K0^-2) there).
inline double lattice_sum(double q, double K, bool averaged) {
  constexpr int K0 = 60;
  struct Key {
    std::int64_t qbits;
    std::int64_t kbits;
    bool averaged;
    bool operator<(const Key& o) const {
      return std::tie(qbits, kbits, averaged) < std::tie(o.qbits, o.kbits, o.averaged);
    }
  };
  static std::map<Key, double> cache;
  static std::mutex mtx;
  Key key{};
  std::memcpy(&key.qbits, &q, 8);
  std::memcpy(&key.kbits, &K, 8);
  key.averaged = averaged;
  {
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const double Kenum = std::min<double>(K, K0);
  const int kmax = static_cast<int>(std::floor(Kenum));
  const double K2 = Kenum * Kenum;
  double acc = 0.0, comp = 0.0;
  for (int dx = -kmax; dx <= kmax; ++dx)
    for (int dy = -kmax; dy <= kmax; ++dy)
      for (int dz = -kmax; dz <= kmax; ++dz) {
        const double r2 = double(dx) * dx + double(dy) * dy + double(dz) * dz;
        if (r2 == 0.0 || r2 > K2) continue;
        const double t = unit_lattice_weight(dx, dy, dz, q, averaged) - comp;
        const double s = acc + t;
        comp = (s - acc) - t;
        acc = s;
      }
  if (K > K0) {
    // integral tail over K0 < |y| <= K
    const double a = 4.0 * M_PI / (q - 3.0);
    acc += a * (std::pow(double(K0), 3.0 - q) -
                (std::isfinite(K) ? std::pow(K, 3.0 - q) : 0.0));
  }
  std::lock_guard<std::mutex> lk(mtx);
  cache.emplace(key, acc);
  return acc;
}

/// Physical kernel weights |x-y|^{-q} for every lattice offset of an n-point
/// grid, cell-averaged near the diagonal when `averaged` is set.  w_all is
/// the sum over the whole infinite lattice (used for zero-padded exterior
/// terms).  Indexing: offset (dx,dy,dz) in [-(n-1), n-1]^3.
struct WeightTable {
  int n = 0;
  double h = 0.0;
  double q = 0.0;
  bool averaged = true;
  std::vector<double> w;  // (2n-1)^3
  double w_all = 0.0;

  int stride() const { return 2 * n - 1; }
  std::size_t index(int dx, int dy, int dz) const {
    const int m = stride();
    return (static_cast<std::size_t>(dx + n - 1) * m + (dy + n - 1)) * m + (dz + n - 1);
  }
  double at(int dx, int dy, int dz) const { return w[index(dx, dy, dz)]; }
  /// Start of the dz range: row(dx,dy)[dz + n - 1] is the weight at offset
  /// (dx,dy,dz).
  const double* row(int dx, int dy) const { return &w[index(dx, dy, -(n - 1))]; }
};

inline std::shared_ptr<const WeightTable> weight_table(const Grid& g, double q, bool averaged) {
  struct Key {
    int n;
    std::int64_t hbits, qbits;
    bool averaged;
    bool operator<(const Key& o) const {
      return std::tie(n, hbits, qbits, averaged) < std::tie(o.n, o.hbits, o.qbits, o.averaged);
    }
  };
  static std::map<Key, std::shared_ptr<const WeightTable>> cache;
  static std::mutex mtx;
  Key key{g.n, 0, 0, averaged};
  std::memcpy(&key.hbits, &g.h, 8);
  std::memcpy(&key.qbits, &q, 8);
  {
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  auto tab = std::make_shared<WeightTable>();
  tab->n = g.n;
  tab->h = g.h;
  tab->q = q;
  tab->averaged = averaged;
  const int m = 2 * g.n - 1;
  tab->w.resize(static_cast<std::size_t>(m) * m * m);
  const double hq = std::pow(g.h, -q);
  std::size_t idx = 0;
  for (int dx = -(g.n - 1); dx <= g.n - 1; ++dx)
    for (int dy = -(g.n - 1); dy <= g.n - 1; ++dy)
      for (int dz = -(g.n - 1); dz <= g.n - 1; ++dz)
        tab->w[idx++] = hq * unit_lattice_weight(dx, dy, dz, q, averaged);
  tab->w_all = hq * lattice_sum(q, std::numeric_limits<double>::infinity(), averaged);

  std::lock_guard<std::mutex> lk(mtx);
  if (cache.size() > 8) cache.clear();
  cache.emplace(key, tab);
  return tab;
}

/// Sum of physical weights over the lattice ball eps < |x-y| <= R around any
/// node (position independent).  Used by the operator's zero-padded form.
inline double lattice_ball_weight(const Grid& g, double q, bool averaged, double r_cut) {
  const double K = std::isfinite(r_cut) ? r_cut / g.h : std::numeric_limits<double>::infinity();
  return std::pow(g.h, -q) * lattice_sum(q, K, averaged);
}

}  // namespace fracmag::detail
