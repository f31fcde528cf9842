#pragma once

#include <vector>

#include "habitat/convolution.hpp"
#include "habitat/field.hpp"
#include "habitat/growth.hpp"

namespace habitat {

/// Explicit RK4 stepping parameters. dt = 0 requests 0.9 of the CFL bound
/// dt <= min(0.5 dx / max(c, dx), 0.25 / (1 + max(r, q))).
struct EvolveSettings {
  double dt = 0.0;
  double t_max = 400.0;
  double steady_tol = 1e-10;
  int record_stride = 50;

  static double cfl_bound(const Grid& grid, double c, const GrowthModel& growth);
  double resolved_dt(const Grid& grid, double c, const GrowthModel& growth) const;
};

enum class Termination { SteadyReached, TMaxReached, Extinct };

struct Trajectory {
  std::vector<Field> snapshots;  // recorded every record_stride steps + final
  Termination reason = Termination::TMaxReached;
};

/// One explicit RK4 step of v_t = c v_xi + (K*v - v) + f(xi, v) v with
/// 3-point one-sided (right-biased for c > 0) upwind advection and zero
/// extension outside the grid. The result is clipped to nonnegative values.
Field step_moving_frame(const Field& field, double c,
                        const ConvolutionOperator& conv,
                        const GrowthModel& growth, double dt);

Trajectory evolve(const Field& initial, double c, const ConvolutionOperator& conv,
                  const GrowthModel& growth, const EvolveSettings& settings);

/// Fixed-frame integration of u_t = (K*u - u) + f(x - c t, u) u.
Trajectory simulate_fixed_frame(const Field& initial, double c,
                                const ConvolutionOperator& conv,
                                const GrowthModel& growth,
                                const EvolveSettings& settings);

struct SteadyState {
  Termination reason = Termination::TMaxReached;
  Field profile;
  bool positive = false;
  double final_max = 0.0;
  double extrapolated_max = 0.0;  // geometric extrapolation of probe sup-norms
  double patch_min = 0.0;
  double extrapolated_patch_min = 0.0;
  double residual = 0.0;  // sup-norm of the discrete stationary equation
  bool monotone_ok = true;
  double monotone_violation = 0.0;
  std::vector<double> probe_sup;  // sup-norm at the unit-time probes
};

/// Monotone iteration from u = M (any M with f(.,M) <= 0; default 2). The
/// trajectory is checked to be pointwise non-increasing between probes up to
/// 1e-10 slack; when t_max is hit the probe sequence is extrapolated
/// geometrically to decide positivity (documented in the returned fields).
SteadyState steady_state_from_above(double c, const ConvolutionOperator& conv,
                                    const GrowthModel& growth,
                                    const EvolveSettings& settings,
                                    const Grid& grid, double M = 2.0);

struct ComparisonReport {
  double max_violation = 0.0;  // max over steps of max_xi (lower - upper)+
  bool pass = false;
};

/// Co-evolves an ordered pair and reports the worst ordering violation.
ComparisonReport comparison_audit(const Field& lower, const Field& upper,
                                  double c, const ConvolutionOperator& conv,
                                  const GrowthModel& growth,
                                  const EvolveSettings& settings);

enum class Side { Right, Left };

/// Closed-form exponential super-solution of the constant-mortality tail
/// problem: two-mode combination of e^{mu_- .} and e^{mu_+ .} interpolating
/// the level M at both ends of the window of width tau.
struct TailSupersolution {
  double M = 0.0;
  double R = 0.0;
  double tau = 0.0;
  double mu_minus = 0.0;
  double mu_plus = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  Side side = Side::Right;

  double operator()(double xi) const;
};

TailSupersolution tail_supersolution(double M, double R, double tau, Side side,
                                     double mu_minus, double mu_plus);

/// sup over the grid of |c v' + K*v - v + f(xi, v) v| for the moving-frame
/// discretization.
double stationary_residual(const Field& field, double c,
                           const ConvolutionOperator& conv,
                           const GrowthModel& growth);

}  // namespace habitat
