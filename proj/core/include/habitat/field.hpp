#pragma once

#include <cstddef>
#include <vector>

#include "habitat/kernel.hpp"

namespace habitat {

enum class Frame { Moving, Fixed };

/// Uniform grid on [-x_max, x_max] with n points, dx = 2 x_max / (n - 1).
struct Grid {
  double x_max = 60.0;
  int n = 2048;
  double dx = 0.0;

  static Grid make(double x_max, int n);
  double x(int i) const { return -x_max + dx * static_cast<double>(i); }
  int index_at(double x) const;  // nearest grid index, clamped

  /// Truncation invariants: x_max >= patch_edge + 10/tail_mu and the kernel
  /// resolved by the grid (n >= 4 x_max / support_radius, dx <= support/8).
  /// Returns a list of violated conditions, empty when valid.
  std::vector<std::string> check(const Kernel& kernel, double patch_edge) const;
};

struct Field {
  Grid grid;
  std::vector<double> values;
  Frame frame = Frame::Moving;
  double time = 0.0;

  static Field constant(const Grid& grid, double value, Frame frame = Frame::Moving);

  std::size_t size() const { return values.size(); }
  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;
  /// Linear interpolation at x, zero outside the grid.
  double interpolate(double x) const;
};

double max_abs_diff(const Field& a, const Field& b);

}  // namespace habitat
