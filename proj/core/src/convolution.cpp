#include "habitat/convolution.hpp"

#include <cmath>
#include <stdexcept>

#include "habitat/fft.hpp"

namespace habitat {

namespace {

// Composite-Simpson quadrature table for \int k(z) v(. + z) dz over
// [-W dx, W dx], rescaled to the exact window mass.
std::vector<double> build_weights(const Kernel& kernel, double dx, int window,
                                  double window_mass) {
  const int count = 2 * window + 1;
  std::vector<double> w(static_cast<std::size_t>(count));
  double raw_sum = 0.0;
  for (int j = -window; j <= window; ++j) {
    double coeff;
    if (j == -window || j == window) {
      coeff = 1.0 / 3.0;
    } else if ((j + window) % 2 == 1) {
      coeff = 4.0 / 3.0;
    } else {
      coeff = 2.0 / 3.0;
    }
    const double value = coeff * kernel_eval(kernel, dx * static_cast<double>(j)) * dx;
    w[static_cast<std::size_t>(j + window)] = value;
    raw_sum += value;
  }
  if (!(raw_sum > 0.0)) {
    throw std::invalid_argument("ConvolutionOperator: kernel not resolved by grid");
  }
  const double scale = window_mass / raw_sum;
  for (double& x : w) x *= scale;
  return w;
}

}  // namespace

ConvolutionOperator ConvolutionOperator::build(const Kernel& kernel, double dx,
                                               int n_points) {
  if (!(dx > 0.0) || n_points < 1) {
    throw std::invalid_argument("ConvolutionOperator: bad grid parameters");
  }
  ConvolutionOperator op;
  op.kernel_ = kernel;
  op.dx_ = dx;
  op.n_points_ = n_points;
  op.window_ = static_cast<int>(std::ceil(kernel.support_radius / dx));
  op.window_mass_ =
      kernel_window_mass(kernel, dx * static_cast<double>(op.window_));
  op.weights_ = build_weights(kernel, dx, op.window_, op.window_mass_);

  // Circular-correlation layout: weight for offset j sits at index (-j mod P),
  // so IFFT(FFT(v) * kernel_fft) yields sum_j w_j v_{i+j} for i in [0, N).
  op.padded_ = detail::next_pow2(static_cast<std::size_t>(n_points) +
                                 2 * static_cast<std::size_t>(op.window_) + 2);
  std::vector<std::complex<double>> placed(op.padded_, {0.0, 0.0});
  for (int j = -op.window_; j <= op.window_; ++j) {
    const std::size_t idx =
        static_cast<std::size_t>((static_cast<long>(op.padded_) - j) %
                                 static_cast<long>(op.padded_));
    placed[idx] += op.weights_[static_cast<std::size_t>(j + op.window_)];
  }
  detail::fft_inplace(placed, false);
  op.kernel_fft_ = std::move(placed);
  return op;
}

void ConvolutionOperator::apply(std::span<const double> in,
                                std::span<double> out) const {
  if (in.size() != static_cast<std::size_t>(n_points_) || out.size() != in.size()) {
    throw std::invalid_argument("ConvolutionOperator: size mismatch");
  }
  const int n = n_points_;
  for (int i = 0; i < n; ++i) {
    const int j_lo = std::max(-window_, -i);
    const int j_hi = std::min(window_, n - 1 - i);
    double acc = 0.0;
    const double* w = weights_.data() + (j_lo + window_);
    const double* v = in.data() + (i + j_lo);
    for (int j = j_lo; j <= j_hi; ++j) acc += *w++ * *v++;
    out[static_cast<std::size_t>(i)] = acc;
  }
}

void ConvolutionOperator::apply_dense(std::span<const double> in,
                                      std::span<double> out) const {
  apply(in, out);
}

void ConvolutionOperator::apply_fft(std::span<const double> in,
                                    std::span<double> out) const {
  if (in.size() != static_cast<std::size_t>(n_points_) || out.size() != in.size()) {
    throw std::invalid_argument("ConvolutionOperator: size mismatch");
  }
  std::vector<std::complex<double>> buf(padded_, {0.0, 0.0});
  for (std::size_t i = 0; i < in.size(); ++i) buf[i] = in[i];
  detail::fft_inplace(buf, false);
  for (std::size_t i = 0; i < padded_; ++i) buf[i] *= kernel_fft_[i];
  detail::fft_inplace(buf, true);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
}

Field ConvolutionOperator::convolve(const Field& field) const {
  if (field.size() != static_cast<std::size_t>(n_points_)) {
    throw std::invalid_argument("ConvolutionOperator::convolve: field length mismatch");
  }
  Field out = field;
  apply(field.values, out.values);
  return out;
}

PeriodicConvolution PeriodicConvolution::build(const Kernel& kernel,
                                               double period, int m) {
  if (!(period > 0.0) || m < 3) {
    throw std::invalid_argument("PeriodicConvolution: bad parameters");
  }
  if (period <= 2.0 * kernel.support_radius) {
    throw std::invalid_argument(
        "PeriodicConvolution: period must exceed twice the kernel support");
  }
  PeriodicConvolution op;
  op.m_ = m;
  op.h_ = period / static_cast<double>(m);
  op.window_ = static_cast<int>(std::ceil(kernel.support_radius / op.h_));
  op.window_mass_ =
      kernel_window_mass(kernel, op.h_ * static_cast<double>(op.window_));
  op.weights_ = build_weights(kernel, op.h_, op.window_, op.window_mass_);
  return op;
}

void PeriodicConvolution::apply(std::span<const double> in,
                                std::span<double> out) const {
  if (in.size() != static_cast<std::size_t>(m_) || out.size() != in.size()) {
    throw std::invalid_argument("PeriodicConvolution: size mismatch");
  }
  const int m = m_;
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = -window_; j <= window_; ++j) {
      int idx = (i + j) % m;
      if (idx < 0) idx += m;
      acc += weights_[static_cast<std::size_t>(j + window_)] *
             in[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
}

}  // namespace habitat
