#include "habitat/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace habitat {

Grid Grid::make(double x_max, int n) {
  if (!(x_max > 0.0) || n < 2) {
    throw std::invalid_argument("Grid::make: need x_max > 0 and n >= 2");
  }
  Grid g;
  g.x_max = x_max;
  g.n = n;
  g.dx = 2.0 * x_max / static_cast<double>(n - 1);
  return g;
}

int Grid::index_at(double xq) const {
  const double t = (xq + x_max) / dx;
  const int i = static_cast<int>(std::lround(t));
  return std::clamp(i, 0, n - 1);
}

std::vector<std::string> Grid::check(const Kernel& kernel, double patch_edge) const {
  std::vector<std::string> issues;
  const double margin = 10.0 / kernel.tail_mu;
  if (x_max < patch_edge + margin) {
    issues.push_back("grid: x_max=" + std::to_string(x_max) +
                     " < patch edge + 10/tail_mu = " +
                     std::to_string(patch_edge + margin));
  }
  if (n < 4.0 * x_max / kernel.support_radius) {
    issues.push_back("grid: n=" + std::to_string(n) +
                     " < 4 x_max / support_radius");
  }
  if (dx > kernel.support_radius / 8.0) {
    issues.push_back("grid: dx=" + std::to_string(dx) +
                     " > support_radius/8 = " +
                     std::to_string(kernel.support_radius / 8.0));
  }
  return issues;
}

Field Field::constant(const Grid& grid, double value, Frame frame) {
  Field f;
  f.grid = grid;
  f.values.assign(static_cast<std::size_t>(grid.n), value);
  f.frame = frame;
  return f;
}

double Field::max() const {
  return *std::max_element(values.begin(), values.end());
}

double Field::min() const {
  return *std::min_element(values.begin(), values.end());
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Field::interpolate(double x) const {
  if (x <= -grid.x_max || x >= grid.x_max) {
    if (x == -grid.x_max) return values.front();
    if (x == grid.x_max) return values.back();
    return 0.0;
  }
  const double t = (x + grid.x_max) / grid.dx;
  const int i = static_cast<int>(std::floor(t));
  const double w = t - static_cast<double>(i);
  if (i + 1 >= grid.n) return values.back();
  return (1.0 - w) * values[static_cast<std::size_t>(i)] +
         w * values[static_cast<std::size_t>(i) + 1];
}

double max_abs_diff(const Field& a, const Field& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("max_abs_diff: size mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

}  // namespace habitat
