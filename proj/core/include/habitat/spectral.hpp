#pragma once

#include <array>
#include <span>
#include <vector>

#include "habitat/convolution.hpp"
#include "habitat/field.hpp"
#include "habitat/growth.hpp"

namespace habitat {

/// Roots mu_-(lambda) < 0 < mu_+(lambda) of the characteristic function
/// g(mu; lambda) = c mu + \int e^{mu z} k(z) dz - 1 - q - lambda.
struct CharacteristicRoots {
  double lambda = 0.0;
  double mu_minus = 0.0;
  double mu_plus = 0.0;
  std::array<double, 2> residuals{0.0, 0.0};
};

CharacteristicRoots characteristic_roots(double c, double q, const Kernel& kernel,
                                         double lambda, double mu_max = 50.0);

struct SpreadingSpeed {
  double c_star = 0.0;
  double mu_star = 0.0;
};

/// Minimizes (\int e^{-mu z} k - 1 + r)/mu over mu > 0 (bracket scan plus
/// golden-section refinement to 1e-10 in mu).
SpreadingSpeed spreading_speed(const Kernel& kernel, double r);

enum class BoundaryMode { ZeroExtension, PeriodicWrap };
enum class EigenMethod { OperatorEig, GrowthRate, Both };

/// Discretization of L(c) = c D_upwind + K - I + diag(f(.,0)). ZeroExtension
/// is the truncated whole-line problem; PeriodicWrap keeps the operator
/// translation invariant (used for constant-coefficient identities).
class LinearizedOperator {
 public:
  LinearizedOperator(double c, const ConvolutionOperator& conv, const Grid& grid,
                     const GrowthModel& growth,
                     BoundaryMode mode = BoundaryMode::ZeroExtension);

  void apply(std::span<const double> in, std::span<double> out) const;
  double row_norm_bound() const;

  double c() const { return c_; }
  const Grid& grid() const { return grid_; }
  BoundaryMode mode() const { return mode_; }
  std::span<const double> coefficient() const { return a_; }
  const GrowthModel& growth() const { return growth_; }
  const ConvolutionOperator& conv() const { return *conv_; }

 private:
  double c_ = 0.0;
  const ConvolutionOperator* conv_ = nullptr;
  Grid grid_;
  GrowthModel growth_;
  BoundaryMode mode_ = BoundaryMode::ZeroExtension;
  std::vector<double> a_;
  double max_abs_a_ = 0.0;
};

struct SpectralReport {
  double c = 0.0;
  double L = 0.0;
  double lambda_cl = 0.0;
  Field eigenfunction;  // positive, sup-norm 1
  EigenMethod method = EigenMethod::OperatorEig;
  double cross_method_gap = 0.0;
  std::array<double, 2> tail_exponents{0.0, 0.0};  // fitted (right, left) log-slopes
  bool converged = false;
  long iterations = 0;
  double eigen_residual = 0.0;
  /// Distance to the next spectral mode, read off the power iteration's own
  /// contraction rate. Drives the growth-rate method's run length.
  double gap_estimate = 0.0;
};

/// Principal eigenvalue by power iteration on I + dt L with
/// dt = 0.5/(1 + q + r + ||L||_row); stops when the Rayleigh quotient moves
/// by less than 1e-12. Non-convergence within max_iters is reported via the
/// converged flag, never silently.
SpectralReport principal_eigenvalue_operator(
    double c, const GrowthModel& growth, const Grid& grid,
    const ConvolutionOperator& conv,
    BoundaryMode mode = BoundaryMode::ZeroExtension, long max_iters = 1000000);

struct GrowthRateResult {
  double lambda = 0.0;
  double r_squared = 0.0;
  bool converged = false;  // R^2 >= 0.999 over the fitted window
  std::vector<std::pair<double, double>> trace;  // (t, accumulated log norm)
};

/// Asymptotic growth rate of the linearized evolution from v0 = 1 with
/// per-unit-time renormalization; least-squares slope over the final half of
/// a run of length 200/max(0.01, expected_gap). dt_override = 0 takes 0.9 of
/// the CFL bound; pass a smaller step when the RK4 propagator bias
/// (lambda dt)^4/120 per unit time matters.
GrowthRateResult principal_eigenvalue_growthrate(
    double c, const GrowthModel& growth, const Grid& grid,
    const ConvolutionOperator& conv, double expected_gap = 1.0,
    BoundaryMode mode = BoundaryMode::ZeroExtension, double dt_override = 0.0);

/// Debug path: dense assembly and a general eigensolver; returns the largest
/// real part over the full spectrum. Intended for small grids.
double principal_eigenvalue_dense(const LinearizedOperator& op);

struct TailCheck {
  bool applicable = false;
  bool pass = false;
  double right_slope = 0.0;
  double left_slope = 0.0;
  double right_bound = 0.0;  // mu_-(lambda) + 5% |mu_-|
  double left_bound = 0.0;   // mu_+(lambda) - 5% mu_+
};

/// Verifies the eigenfunction decay exponents against mu_-+(lambda(c,L)):
/// right slope <= mu_- + 5%|mu_-|, left slope >= mu_+ - 5% mu_+.
TailCheck eigen_tail_check(const SpectralReport& report,
                           const CharacteristicRoots& roots,
                           const GrowthModel& growth);

struct SlopeFit {
  double slope = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least-squares slope of log(values) over grid points with x in [lo, hi];
/// entries below 1e-300 are skipped.
SlopeFit fit_log_slope(const Field& field, double lo, double hi);

}  // namespace habitat
