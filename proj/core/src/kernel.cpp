#include "habitat/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace habitat {

namespace {

constexpr double kTruncationLevel = 1e-16;

double gaussian_density(double z, double sigma) {
  const double t = z / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double bump_density(double z, double radius) {
  if (std::abs(z) >= radius) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * z / radius);
  return c * c / radius;
}

}  // namespace

Kernel Kernel::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("Kernel::gaussian: sigma must be positive");
  Kernel k;
  k.family = KernelFamily::Gaussian;
  k.param = sigma;
  // k(R) = 1e-16  =>  R = sigma * sqrt(-2 ln(1e-16 sigma sqrt(2 pi)))
  const double log_arg = kTruncationLevel * sigma * std::sqrt(2.0 * std::numbers::pi);
  if (log_arg >= 1.0) throw std::invalid_argument("Kernel::gaussian: sigma too large");
  k.support_radius = sigma * std::sqrt(-2.0 * std::log(log_arg));
  // Tail certificate: mu = 1/(2 sigma); M is the largest root of
  // ln k(z) = -mu z (quadratic in z), or sigma/2 when the density is below
  // the bound everywhere.
  k.tail_mu = 0.5 / sigma;
  const double ln_norm = std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  const double disc = 0.25 - 2.0 * ln_norm;
  double m = 0.5 * sigma;
  if (disc > 0.0) m = std::max(m, sigma * (0.5 + std::sqrt(disc)));
  k.tail_M = m;
  return k;
}

Kernel Kernel::compact_bump(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("Kernel::compact_bump: radius must be positive");
  Kernel k;
  k.family = KernelFamily::CompactBump;
  k.param = radius;
  k.support_radius = radius;
  // Vanishes outside [-R, R], so any positive rate certifies the tail.
  k.tail_mu = 1.0;
  k.tail_M = radius;
  return k;
}

double Kernel::operator()(double z) const {
  return kernel_eval(*this, z);
}

std::string Kernel::family_name() const {
  return family == KernelFamily::Gaussian ? "gaussian" : "bump";
}

double kernel_eval(const Kernel& kernel, double z) {
  if (std::abs(z) > kernel.support_radius) return 0.0;
  switch (kernel.family) {
    case KernelFamily::Gaussian:
      return gaussian_density(z, kernel.param);
    case KernelFamily::CompactBump:
      return bump_density(z, kernel.param);
  }
  return 0.0;
}

double moment_generating(const Kernel& kernel, double mu, double mu_max) {
  if (std::abs(mu) > mu_max) {
    throw std::invalid_argument("moment_generating: |mu| exceeds mu_max");
  }
  switch (kernel.family) {
    case KernelFamily::Gaussian: {
      const double expo = 0.5 * mu * mu * kernel.param * kernel.param;
      if (expo > 700.0) {
        throw std::overflow_error("moment_generating: Gaussian exponent overflow");
      }
      return std::exp(expo);
    }
    case KernelFamily::CompactBump: {
      const double radius = kernel.param;
      return detail::adaptive_simpson(
          [&](double z) { return std::exp(mu * z) * bump_density(z, radius); },
          -radius, radius, 1e-12);
    }
  }
  return 1.0;
}

double kernel_window_mass(const Kernel& kernel, double half_width) {
  if (half_width <= 0.0) return 0.0;
  switch (kernel.family) {
    case KernelFamily::Gaussian:
      return std::erf(half_width / (kernel.param * std::sqrt(2.0)));
    case KernelFamily::CompactBump: {
      const double radius = kernel.param;
      if (half_width >= radius) return 1.0;
      const double a = half_width / radius;
      return a + std::sin(std::numbers::pi * a) / std::numbers::pi;
    }
  }
  return 0.0;
}

namespace detail {

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole,
                     double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace detail

}  // namespace habitat
