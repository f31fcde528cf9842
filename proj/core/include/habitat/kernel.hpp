#pragma once

#include <functional>
#include <string>

namespace habitat {

enum class KernelFamily { Gaussian, CompactBump };

/// Symmetric dispersal kernel with a certified exponential tail bound:
/// k(z) < exp(-tail_mu*|z|) for |z| > tail_M. support_radius is the numeric
/// truncation radius (k < 1e-16 outside; exact for CompactBump).
struct Kernel {
  KernelFamily family = KernelFamily::Gaussian;
  double param = 1.0;  // sigma for Gaussian, radius for CompactBump
  double tail_mu = 0.0;
  double tail_M = 0.0;
  double support_radius = 0.0;

  static Kernel gaussian(double sigma);
  static Kernel compact_bump(double radius);

  double operator()(double z) const;
  std::string family_name() const;
};

double kernel_eval(const Kernel& kernel, double z);

/// Exponential moment \int e^{mu z} k(z) dz. Gaussian uses the closed form
/// exp(mu^2 sigma^2 / 2); CompactBump integrates adaptively to 1e-12 relative
/// tolerance. Throws for |mu| > mu_max or when the Gaussian exponent would
/// overflow (mu^2 sigma^2 / 2 > 700).
double moment_generating(const Kernel& kernel, double mu, double mu_max = 50.0);

/// Mass of the kernel over [-half_width, half_width], evaluated from the
/// closed-form antiderivative of each family.
double kernel_window_mass(const Kernel& kernel, double half_width);

namespace detail {
// Adaptive Simpson quadrature, relative tolerance on the whole integral.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol);
}  // namespace detail

}  // namespace habitat
