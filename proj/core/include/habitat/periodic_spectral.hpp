#pragma once

#include <span>
#include <vector>

#include "habitat/convolution.hpp"
#include "habitat/growth.hpp"
#include "habitat/kernel.hpp"

namespace habitat {

/// Sampled p-periodic coefficient a(xi) on one period [-p/2, p/2), cell-linear
/// between nodes. All integrals of a used by the periodic machinery (the mean,
/// the lambda_T eigenfunction exponent, the resolvent cell factors) follow the
/// same piecewise-linear convention, so the machinery is internally exact.
struct PeriodicCoefficient {
  double p = 0.0;
  int m = 0;
  double h = 0.0;
  std::vector<double> a;
  double abar = 0.0;
  double a_max_abs = 0.0;

  /// Periodized f(.,0); requires p > 2 (L + L0).
  static PeriodicCoefficient from_growth(const GrowthModel& growth, double p,
                                         double target_h);
  static PeriodicCoefficient constant(double a0, double p, int m);

  double node(int j) const { return -0.5 * p + h * static_cast<double>(j); }
};

struct LambdaT {
  double value = 0.0;                // -1 + abar
  std::vector<double> eigenfunction; // e^{(abar xi - \int_0^xi a)/c} at nodes
  double residual = 0.0;
};

/// Eigenpair of the local part T = c d/dxi - I + a(.); the c > 0 branch of the
/// periodic theory (c = 0 is handled by the direct operator iteration).
LambdaT lambda_T(const PeriodicCoefficient& coef, double c);

/// (alpha I - T)^{-1} w via the explicit exponential integral, evaluated with
/// an exact per-period recursion (the weight contracts by
/// e^{-(alpha+1-abar) p / c} per period). Requires alpha > lambda_T.
std::vector<double> resolvent_apply(const PeriodicCoefficient& coef, double c,
                                    double alpha, std::span<const double> w);

/// Spectral radius of K (alpha I - T)^{-1} by power iteration on positive
/// periodic fields.
double spectral_radius_map(const PeriodicCoefficient& coef, double c,
                           double alpha, const PeriodicConvolution& conv);

struct PeriodicEigen {
  double lambda_p = 0.0;
  std::vector<double> eigenfunction;
  bool converged = false;
  long rho_evaluations = 0;
};

/// Principal periodic eigenvalue: for c > 0 solves rho(alpha) = 1 by bisection
/// above lambda_T; for c = 0 power-iterates the periodic operator directly.
PeriodicEigen periodic_principal_eigenvalue(const PeriodicCoefficient& coef,
                                            double c,
                                            const PeriodicConvolution& conv);

struct PeriodizationResult {
  std::vector<double> p_values;
  std::vector<double> lambda_sequence;
  double limit = 0.0;
  bool monotone_ok = true;
  double worst_increase = 0.0;
};

/// lambda_p over p, 2p, 4p, ... with a fixed cell width; the sequence must be
/// non-increasing (up to 1e-8) and bounded below by -q.
PeriodizationResult periodization_limit(double c, const GrowthModel& growth,
                                        const Kernel& kernel, double base_p,
                                        int doublings, double target_h);

}  // namespace habitat
