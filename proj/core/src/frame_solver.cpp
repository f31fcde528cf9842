#include "habitat/frame_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace habitat {

namespace {

constexpr double kExtinctionLevel = 1e-8;
constexpr double kClipFloor = -1e-12;
constexpr double kMonotoneSlack = 1e-10;
constexpr double kPositiveLevel = 1e-6;

// 3-point one-sided upwind derivative, right-biased for c > 0, zero ghosts.
void upwind_derivative(std::span<const double> v, double dx, std::span<double> out) {
  const std::size_t n = v.size();
  const double inv2dx = 0.5 / dx;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    out[i] = (-3.0 * v[i] + 4.0 * v[i + 1] - v[i + 2]) * inv2dx;
  }
  if (n >= 2) out[n - 2] = (-3.0 * v[n - 2] + 4.0 * v[n - 1]) * inv2dx;
  if (n >= 1) out[n - 1] = -3.0 * v[n - 1] * inv2dx;
}

class Stepper {
 public:
  Stepper(const Grid& grid, double c, const ConvolutionOperator& conv,
          const GrowthModel& growth, bool moving_frame)
      : grid_(grid),
        c_(c),
        conv_(conv),
        growth_(growth),
        moving_frame_(moving_frame),
        n_(static_cast<std::size_t>(grid.n)),
        conv_buf_(n_),
        deriv_buf_(n_),
        k1_(n_), k2_(n_), k3_(n_), k4_(n_), stage_(n_) {
    if (c < 0.0) throw std::invalid_argument("solver: c must be nonnegative");
  }

  // rate of change at time t (t only matters in the fixed frame)
  void rhs(std::span<const double> v, double t, std::span<double> out) {
    conv_.apply(v, conv_buf_);
    if (moving_frame_ && c_ > 0.0) {
      upwind_derivative(v, grid_.dx, deriv_buf_);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double x = grid_.x(static_cast<int>(i));
      const double growth_x = moving_frame_ ? x : x - c_ * t;
      double acc = conv_buf_[i] - v[i] + growth_.eval(growth_x, v[i]) * v[i];
      if (moving_frame_ && c_ > 0.0) acc += c_ * deriv_buf_[i];
      out[i] = acc;
    }
  }

  void step(Field& field, double dt) {
    const double t = field.time;
    auto& v = field.values;
    rhs(v, t, k1_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = v[i] + 0.5 * dt * k1_[i];
    rhs(stage_, t + 0.5 * dt, k2_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = v[i] + 0.5 * dt * k2_[i];
    rhs(stage_, t + 0.5 * dt, k3_);
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = v[i] + dt * k3_[i];
    rhs(stage_, t + dt, k4_);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double x = v[i] + w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
      if (!std::isfinite(x)) {
        throw std::runtime_error("solver: NaN/Inf at t=" + std::to_string(t) +
                                 " xi=" + std::to_string(grid_.x(static_cast<int>(i))));
      }
      if (x < 0.0) x = 0.0;
      v[i] = x;
    }
    field.time = t + dt;
  }

 private:
  Grid grid_;
  double c_;
  const ConvolutionOperator& conv_;
  GrowthModel growth_;
  bool moving_frame_;
  std::size_t n_;
  std::vector<double> conv_buf_, deriv_buf_, k1_, k2_, k3_, k4_, stage_;
};

// Aitken-style limit of a geometrically converging probe sequence.
double geometric_limit(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n < 3) return n ? s.back() : 0.0;
  const double d1 = s[n - 2] - s[n - 3];
  const double d2 = s[n - 1] - s[n - 2];
  if (d1 == 0.0) return s.back();
  const double rho = d2 / d1;
  if (!(rho > 0.0) || !(rho < 1.0)) return s.back();
  return s[n - 1] + d2 * rho / (1.0 - rho);
}

double patch_minimum(const Field& field, double L) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < field.grid.n; ++i) {
    if (std::abs(field.grid.x(i)) <= L) {
      m = std::min(m, field.values[static_cast<std::size_t>(i)]);
    }
  }
  return std::isfinite(m) ? m : 0.0;
}

Trajectory run(const Field& initial, double c, const ConvolutionOperator& conv,
               const GrowthModel& growth, const EvolveSettings& settings,
               bool moving_frame) {
  if (initial.size() != static_cast<std::size_t>(conv.n_points())) {
    throw std::invalid_argument("evolve: field length does not match operator");
  }
  if (initial.min() < 0.0) {
    throw std::invalid_argument("evolve: initial data must be nonnegative");
  }
  const double dt = settings.resolved_dt(initial.grid, c, growth);
  const long probe_stride = std::max(1L, std::lround(1.0 / dt));
  const double probe_delta = dt * static_cast<double>(probe_stride);
  const long n_steps = static_cast<long>(std::ceil(settings.t_max / dt));

  Stepper stepper(initial.grid, c, conv, growth, moving_frame);
  Trajectory traj;
  Field v = initial;
  v.frame = moving_frame ? Frame::Moving : Frame::Fixed;
  traj.snapshots.push_back(v);
  if (v.max_abs() < kExtinctionLevel) {
    traj.reason = Termination::Extinct;
    return traj;
  }
  Field probe_prev = v;
  traj.reason = Termination::TMaxReached;
  for (long k = 1; k <= n_steps; ++k) {
    stepper.step(v, dt);
    if (settings.record_stride > 0 && k % settings.record_stride == 0) {
      traj.snapshots.push_back(v);
    }
    if (v.max_abs() < kExtinctionLevel) {
      traj.reason = Termination::Extinct;
      break;
    }
    if (k % probe_stride == 0) {
      if (max_abs_diff(v, probe_prev) < settings.steady_tol * probe_delta) {
        traj.reason = Termination::SteadyReached;
        break;
      }
      probe_prev = v;
    }
  }
  if (traj.snapshots.back().time != v.time) traj.snapshots.push_back(v);
  return traj;
}

}  // namespace

double EvolveSettings::cfl_bound(const Grid& grid, double c,
                                 const GrowthModel& growth) {
  const double advective = 0.5 * grid.dx / std::max(c, grid.dx);
  const double reactive = 0.25 / (1.0 + std::max(growth.r, growth.q));
  return std::min(advective, reactive);
}

double EvolveSettings::resolved_dt(const Grid& grid, double c,
                                   const GrowthModel& growth) const {
  const double bound = cfl_bound(grid, c, growth);
  if (dt <= 0.0) return 0.9 * bound;
  if (dt > bound) {
    throw std::invalid_argument("EvolveSettings: dt=" + std::to_string(dt) +
                                " violates the CFL bound " + std::to_string(bound));
  }
  return dt;
}

Field step_moving_frame(const Field& field, double c,
                        const ConvolutionOperator& conv,
                        const GrowthModel& growth, double dt) {
  if (field.frame != Frame::Moving) {
    throw std::invalid_argument("step_moving_frame: field must be in the moving frame");
  }
  const double bound = EvolveSettings::cfl_bound(field.grid, c, growth);
  if (dt > bound) {
    throw std::invalid_argument("step_moving_frame: dt violates the CFL bound");
  }
  Stepper stepper(field.grid, c, conv, growth, /*moving_frame=*/true);
  Field out = field;
  stepper.step(out, dt);
  return out;
}

Trajectory evolve(const Field& initial, double c, const ConvolutionOperator& conv,
                  const GrowthModel& growth, const EvolveSettings& settings) {
  return run(initial, c, conv, growth, settings, /*moving_frame=*/true);
}

Trajectory simulate_fixed_frame(const Field& initial, double c,
                                const ConvolutionOperator& conv,
                                const GrowthModel& growth,
                                const EvolveSettings& settings) {
  return run(initial, c, conv, growth, settings, /*moving_frame=*/false);
}

SteadyState steady_state_from_above(double c, const ConvolutionOperator& conv,
                                    const GrowthModel& growth,
                                    const EvolveSettings& settings,
                                    const Grid& grid, double M) {
  if (!(M >= 1.0)) {
    throw std::invalid_argument("steady_state_from_above: need M >= 1 so f(.,M) <= 0");
  }
  const double dt = settings.resolved_dt(grid, c, growth);
  const long probe_stride = std::max(1L, std::lround(1.0 / dt));
  const double probe_delta = dt * static_cast<double>(probe_stride);
  const long n_steps = static_cast<long>(std::ceil(settings.t_max / dt));

  Stepper stepper(grid, c, conv, growth, /*moving_frame=*/true);
  Field v = Field::constant(grid, M);
  Field probe_prev = v;
  std::vector<double> sup_seq{v.max()};
  std::vector<double> patch_seq{patch_minimum(v, growth.L)};

  SteadyState out;
  out.reason = Termination::TMaxReached;
  for (long k = 1; k <= n_steps; ++k) {
    stepper.step(v, dt);
    if (v.max_abs() < kExtinctionLevel) {
      out.reason = Termination::Extinct;
      break;
    }
    if (k % probe_stride == 0) {
      double worst = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        worst = std::max(worst, v.values[i] - probe_prev.values[i]);
      }
      out.monotone_violation = std::max(out.monotone_violation, worst);
      sup_seq.push_back(v.max());
      patch_seq.push_back(patch_minimum(v, growth.L));
      if (max_abs_diff(v, probe_prev) < settings.steady_tol * probe_delta) {
        out.reason = Termination::SteadyReached;
        probe_prev = v;
        break;
      }
      probe_prev = v;
    }
  }
  out.monotone_ok = out.monotone_violation <= kMonotoneSlack;
  out.profile = v;
  out.final_max = v.max();
  out.patch_min = patch_minimum(v, growth.L);
  out.probe_sup = sup_seq;
  if (out.reason == Termination::TMaxReached) {
    out.extrapolated_max = geometric_limit(sup_seq);
    out.extrapolated_patch_min = geometric_limit(patch_seq);
    // A drifting decay rate leaves the extrapolation a residue of up to a few
    // percent of the current amplitude, so a genuine plateau must also be a
    // sizable fraction of where the iteration currently sits.
    out.positive = out.extrapolated_max >= kPositiveLevel &&
                   out.extrapolated_max >= 0.12 * out.final_max;
  } else if (out.reason == Termination::Extinct) {
    out.extrapolated_max = 0.0;
    out.extrapolated_patch_min = 0.0;
    out.positive = false;
  } else {
    out.extrapolated_max = out.final_max;
    out.extrapolated_patch_min = out.patch_min;
    out.positive = out.extrapolated_max >= kPositiveLevel;
  }
  out.residual = stationary_residual(out.profile, c, conv, growth);
  return out;
}

ComparisonReport comparison_audit(const Field& lower, const Field& upper,
                                  double c, const ConvolutionOperator& conv,
                                  const GrowthModel& growth,
                                  const EvolveSettings& settings) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("comparison_audit: size mismatch");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower.values[i] > upper.values[i]) {
      throw std::invalid_argument("comparison_audit: initial pair is not ordered");
    }
  }
  const double dt = settings.resolved_dt(lower.grid, c, growth);
  const long n_steps = static_cast<long>(std::ceil(settings.t_max / dt));
  Stepper s1(lower.grid, c, conv, growth, true);
  Stepper s2(lower.grid, c, conv, growth, true);
  Field v1 = lower;
  Field v2 = upper;
  ComparisonReport report;
  for (long k = 0; k < n_steps; ++k) {
    s1.step(v1, dt);
    s2.step(v2, dt);
    for (std::size_t i = 0; i < v1.size(); ++i) {
      report.max_violation = std::max(report.max_violation, v1.values[i] - v2.values[i]);
    }
  }
  report.pass = report.max_violation < 1e-8;
  return report;
}

double TailSupersolution::operator()(double xi) const {
  return k1 * std::exp(mu_minus * (xi - R)) + k2 * std::exp(mu_plus * (xi - R));
}

TailSupersolution tail_supersolution(double M, double R, double tau, Side side,
                                     double mu_minus, double mu_plus) {
  if (!(mu_minus < 0.0) || !(mu_plus > 0.0)) {
    throw std::invalid_argument("tail_supersolution: need mu_minus < 0 < mu_plus");
  }
  if (!(tau > 0.0) || !(M > 0.0)) {
    throw std::invalid_argument("tail_supersolution: need tau > 0 and M > 0");
  }
  TailSupersolution psi;
  psi.M = M;
  psi.R = R;
  psi.tau = tau;
  psi.mu_minus = mu_minus;
  psi.mu_plus = mu_plus;
  psi.side = side;
  if (side == Side::Right) {
    const double denom = std::exp(mu_plus * tau) - std::exp(mu_minus * tau);
    if (denom == 0.0) throw std::invalid_argument("tail_supersolution: degenerate roots");
    psi.k1 = M * (std::exp(mu_plus * tau) - 1.0) / denom;
    psi.k2 = M * (1.0 - std::exp(mu_minus * tau)) / denom;
  } else {
    const double denom = std::exp(-mu_minus * tau) - std::exp(-mu_plus * tau);
    if (denom == 0.0) throw std::invalid_argument("tail_supersolution: degenerate roots");
    psi.k1 = M * (1.0 - std::exp(-mu_plus * tau)) / denom;
    psi.k2 = M * (std::exp(-mu_minus * tau) - 1.0) / denom;
  }
  return psi;
}

double stationary_residual(const Field& field, double c,
                           const ConvolutionOperator& conv,
                           const GrowthModel& growth) {
  const std::size_t n = field.size();
  std::vector<double> conv_buf(n), deriv(n, 0.0);
  conv.apply(field.values, conv_buf);
  if (c > 0.0) upwind_derivative(field.values, field.grid.dx, deriv);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = field.grid.x(static_cast<int>(i));
    const double v = field.values[i];
    const double res = c * deriv[i] + conv_buf[i] - v + growth.eval(x, v) * v;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace habitat
