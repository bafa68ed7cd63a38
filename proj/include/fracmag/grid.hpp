#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "fracmag/errors.hpp"
#include "fracmag/vec3.hpp"

namespace fracmag {

/// Uniform cubic lattice of n^3 nodes with spacing h, centered at `center`.
/// Node (i,j,k) sits at center + h*(i-(n-1)/2, j-(n-1)/2, k-(n-1)/2); the
/// sampling box spans extent() = n*h per axis, so every node is at least
/// h/2 away from the box boundary.  Flat indices are row-major in (x,y,z).
struct Grid {
  int n = 0;
  double h = 0.0;
  Vec3 center{};

  static Grid make(int n, double h, Vec3 center = {}) {
    if (n < 4) throw domain_error("Grid: need n >= 4");
    if (!(h > 0.0)) throw domain_error("Grid: need h > 0");
    return Grid{n, h, center};
  }
  static Grid from_extent(int n, double extent, Vec3 center = {}) {
    if (n < 4) throw domain_error("Grid: need n >= 4");
    return make(n, extent / n, center);
  }

  double extent() const { return n * h; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(n) * n * n;
  }

  double axis_coord(int i) const { return h * (i - 0.5 * (n - 1)); }

  Vec3 node(int i, int j, int k) const {
    return {center.x + axis_coord(i), center.y + axis_coord(j), center.z + axis_coord(k)};
  }
  Vec3 node(std::size_t flat) const {
    const auto [i, j, k] = unflatten(flat);
    return node(i, j, k);
  }

  std::size_t flatten(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  std::array<int, 3> unflatten(std::size_t flat) const {
    const int k = static_cast<int>(flat % n);
    const int j = static_cast<int>((flat / n) % n);
    const int i = static_cast<int>(flat / (static_cast<std::size_t>(n) * n));
    return {i, j, k};
  }

  Vec3 box_min() const { return center - 0.5 * extent() * Vec3{1, 1, 1}; }
  Vec3 box_max() const { return center + 0.5 * extent() * Vec3{1, 1, 1}; }

  bool contains(Vec3 x) const {
    const Vec3 lo = box_min(), hi = box_max();
    return x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y && x.z >= lo.z &&
           x.z <= hi.z;
  }

  /// Distance from a node to the boundary of the sampling box (>= h/2).
  double boundary_distance(Vec3 x) const {
    const Vec3 lo = box_min(), hi = box_max();
    double d = hi.x - x.x;
    d = std::min(d, x.x - lo.x);
    d = std::min(d, hi.y - x.y);
    d = std::min(d, x.y - lo.y);
    d = std::min(d, hi.z - x.z);
    d = std::min(d, x.z - lo.z);
    return d;
  }

  double cell_volume() const { return h * h * h; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n == b.n && a.h == b.h && a.center == b.center;
  }
};

}  // namespace fracmag
