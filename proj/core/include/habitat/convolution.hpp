#pragma once

#include <complex>
#include <span>
#include <vector>

#include "habitat/field.hpp"
#include "habitat/kernel.hpp"

namespace habitat {

/// Discrete convolution against the dispersal kernel on a uniform grid with
/// zero extension outside the window. The quadrature table is composite
/// Simpson over [-W dx, W dx], rescaled so the weight sum equals the exact
/// kernel mass of the window (keeps row sums <= 1 and constants reproduced in
/// the interior to round-off).
///
/// Immutable after construction; apply() is pure and safe to share across
/// threads.
class ConvolutionOperator {
 public:
  static ConvolutionOperator build(const Kernel& kernel, double dx, int n_points);

  /// out_i = sum_j w_j in_{i+j}, zero extension. Direct summation: error
  /// stays relative to the local magnitude, so exponential tails keep their
  /// shape far below the sup norm. Default path for the solvers.
  void apply(std::span<const double> in, std::span<double> out) const;
  /// Same operator via FFT with zero padding, O(N log N). Round-off here is
  /// absolute (~1e-16 * sup norm); agrees with apply() to 1e-12.
  void apply_fft(std::span<const double> in, std::span<double> out) const;
  /// Alias of the direct path kept for symmetry with apply_fft.
  void apply_dense(std::span<const double> in, std::span<double> out) const;

  Field convolve(const Field& field) const;

  const Kernel& kernel() const { return kernel_; }
  double dx() const { return dx_; }
  int n_points() const { return n_points_; }
  int window() const { return window_; }
  double window_mass() const { return window_mass_; }
  std::span<const double> weights() const { return weights_; }

 private:
  Kernel kernel_;
  double dx_ = 0.0;
  int n_points_ = 0;
  int window_ = 0;                // weights span offsets [-window_, window_]
  double window_mass_ = 0.0;      // exact kernel mass over the window
  std::vector<double> weights_;   // 2*window_+1 entries
  std::size_t padded_ = 0;
  std::vector<std::complex<double>> kernel_fft_;
};

/// Wrapped (circular) convolution over one period, used by the periodic
/// spectral machinery. Requires the period to exceed twice the kernel support
/// so the wrap is exact.
class PeriodicConvolution {
 public:
  static PeriodicConvolution build(const Kernel& kernel, double period, int m);

  void apply(std::span<const double> in, std::span<double> out) const;

  int m() const { return m_; }
  double h() const { return h_; }
  double window_mass() const { return window_mass_; }

 private:
  double h_ = 0.0;
  int m_ = 0;
  int window_ = 0;
  double window_mass_ = 0.0;
  std::vector<double> weights_;
};

}  // namespace habitat
