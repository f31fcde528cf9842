#include "habitat/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "habitat/frame_solver.hpp"

namespace habitat {

namespace {

double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& g, double lo, double hi,
                   double g_tol) {
  double glo = g(lo);
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::abs(gm) < g_tol) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return mid;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += e * e;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace

CharacteristicRoots characteristic_roots(double c, double q, const Kernel& kernel,
                                         double lambda, double mu_max) {
  if (c < 0.0) throw std::invalid_argument("characteristic_roots: c must be >= 0");
  if (!(lambda > -q)) {
    throw std::invalid_argument("characteristic_roots: need lambda > -q");
  }
  auto g = [&](double mu) {
    return c * mu + moment_generating(kernel, mu, mu_max) - 1.0 - q - lambda;
  };
  auto expand = [&](double direction) {
    double b = direction;
    while (true) {
      if (std::abs(b) > mu_max) {
        throw std::domain_error("characteristic_roots: bracket exceeds mu_max");
      }
      double gb;
      try {
        gb = g(b);
      } catch (const std::overflow_error&) {
        throw std::domain_error("characteristic_roots: bracket exceeds mu_max");
      }
      if (gb > 0.0) return b;
      b *= 2.0;
    }
  };
  const double hi = expand(1.0);
  const double lo = expand(-1.0);
  CharacteristicRoots roots;
  roots.lambda = lambda;
  roots.mu_plus = bisect_root(g, 0.0, hi, 1e-12);
  roots.mu_minus = bisect_root(g, lo, 0.0, 1e-12);
  if (roots.mu_minus > roots.mu_plus) std::swap(roots.mu_minus, roots.mu_plus);
  roots.residuals = {std::abs(g(roots.mu_minus)), std::abs(g(roots.mu_plus))};
  return roots;
}

SpreadingSpeed spreading_speed(const Kernel& kernel, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("spreading_speed: r must be positive");
  auto h = [&](double mu) -> double {
    try {
      return (moment_generating(kernel, mu) - 1.0 + r) / mu;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // Scan a doubling ladder for a bracket around the minimum.
  double prev_mu = 1e-3;
  double prev_h = h(prev_mu);
  double best_mu = prev_mu;
  double lo = prev_mu;
  double hi = 0.0;
  for (int k = 1; k < 64; ++k) {
    const double mu = 1e-3 * std::pow(2.0, k);
    const double hv = h(mu);
    if (hv > prev_h) {
      hi = mu;
      break;
    }
    lo = best_mu;
    best_mu = mu;
    prev_h = hv;
  }
  if (hi == 0.0) throw std::runtime_error("spreading_speed: no bracket found");
  SpreadingSpeed out;
  out.mu_star = golden_section_min(h, lo, hi, 1e-10);
  out.c_star = h(out.mu_star);
  return out;
}

LinearizedOperator::LinearizedOperator(double c, const ConvolutionOperator& conv,
                                       const Grid& grid, const GrowthModel& growth,
                                       BoundaryMode mode)
    : c_(c), conv_(&conv), grid_(grid), growth_(growth), mode_(mode) {
  if (c < 0.0) throw std::invalid_argument("LinearizedOperator: c must be >= 0");
  if (grid.n != conv.n_points()) {
    throw std::invalid_argument("LinearizedOperator: grid/operator size mismatch");
  }
  a_.resize(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    a_[static_cast<std::size_t>(i)] = growth.linearized(grid.x(i));
    max_abs_a_ = std::max(max_abs_a_, std::abs(a_[static_cast<std::size_t>(i)]));
  }
}

void LinearizedOperator::apply(std::span<const double> in,
                               std::span<double> out) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n);
  if (in.size() != n || out.size() != n) {
    throw std::invalid_argument("LinearizedOperator::apply: size mismatch");
  }
  std::vector<double> conv_buf(n);
  if (mode_ == BoundaryMode::ZeroExtension) {
    conv_->apply(in, conv_buf);
  } else {
    // wrapped convolution with the same quadrature table
    const auto w = conv_->weights();
    const int window = conv_->window();
    const int m = grid_.n;
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = -window; j <= window; ++j) {
        int idx = (i + j) % m;
        if (idx < 0) idx += m;
        acc += w[static_cast<std::size_t>(j + window)] *
               in[static_cast<std::size_t>(idx)];
      }
      conv_buf[static_cast<std::size_t>(i)] = acc;
    }
  }
  const double inv2dx = 0.5 / grid_.dx;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = conv_buf[i] - in[i] + a_[i] * in[i];
    if (c_ > 0.0) {
      double vp1 = 0.0, vp2 = 0.0;
      if (mode_ == BoundaryMode::ZeroExtension) {
        if (i + 1 < n) vp1 = in[i + 1];
        if (i + 2 < n) vp2 = in[i + 2];
      } else {
        vp1 = in[(i + 1) % n];
        vp2 = in[(i + 2) % n];
      }
      acc += c_ * (-3.0 * in[i] + 4.0 * vp1 - vp2) * inv2dx;
    }
    out[i] = acc;
  }
}

double LinearizedOperator::row_norm_bound() const {
  double bound = conv_->window_mass() + 1.0 + max_abs_a_;
  if (c_ > 0.0) bound += 4.0 * c_ / grid_.dx;
  return bound;
}

SpectralReport principal_eigenvalue_operator(double c, const GrowthModel& growth,
                                             const Grid& grid,
                                             const ConvolutionOperator& conv,
                                             BoundaryMode mode, long max_iters) {
  LinearizedOperator op(c, conv, grid, growth, mode);
  const std::size_t n = static_cast<std::size_t>(grid.n);
  const double dt =
      0.5 / (1.0 + growth.q + growth.r + op.row_norm_bound());

  std::vector<double> w(n, 1.0), lw(n);
  double lambda_prev = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  long iter = 0;
  bool converged = false;
  double gap_estimate = 0.0;
  constexpr int kRateWindow = 512;
  std::vector<double> residual_ring(kRateWindow, 0.0);
  long stall_count = 0;
  for (; iter < max_iters; ++iter) {
    op.apply(w, lw);
    double num = 0.0, den = 0.0, w_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += w[i] * lw[i];
      den += w[i] * w[i];
      w_norm = std::max(w_norm, std::abs(w[i]));
    }
    lambda = num / den;
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      residual = std::max(residual, std::abs(lw[i] - lambda * w[i]));
    }
    // Contraction rate of the residual gives the distance to the next mode.
    const double old_residual = residual_ring[iter % kRateWindow];
    residual_ring[iter % kRateWindow] = residual;
    if (iter >= kRateWindow && old_residual > 0.0 && residual < old_residual) {
      const double rate = std::pow(residual / old_residual, 1.0 / kRateWindow);
      gap_estimate = (1.0 - rate) / dt;
    }
    // The Rayleigh quotient settles before the iterate does, so also require
    // a small eigen-residual before declaring convergence. Near-degenerate
    // instances (wide patches) can stall with an accurate lambda but a slowly
    // converging vector; after a long stall we return what we have and leave
    // the converged flag to the residual.
    const double res_scale = std::max(1.0, std::abs(lambda)) * w_norm;
    if (std::isfinite(lambda_prev) && std::abs(lambda - lambda_prev) < 1e-12) {
      if (residual <= 1e-7 * res_scale) {
        converged = true;
        break;
      }
      if (++stall_count > 20000) {
        converged = residual <= 1e-6 * res_scale;
        break;
      }
    } else {
      stall_count = 0;
    }
    lambda_prev = lambda;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += dt * lw[i];
      norm = std::max(norm, std::abs(w[i]));
    }
    if (norm == 0.0) throw std::runtime_error("power iteration collapsed to zero");
    for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
  }

  SpectralReport report;
  report.c = c;
  report.L = growth.L;
  report.lambda_cl = lambda;
  report.method = EigenMethod::OperatorEig;
  report.converged = converged;
  report.iterations = iter;
  report.gap_estimate = gap_estimate > 0.0 ? gap_estimate : growth.q + lambda;
  // normalize to a positive sup-norm-1 eigenfunction
  double sum = 0.0;
  for (double x : w) sum += x;
  if (sum < 0.0) {
    for (double& x : w) x = -x;
  }
  double norm = 0.0;
  for (double x : w) norm = std::max(norm, std::abs(x));
  for (double& x : w) x /= norm;
  report.eigenfunction.grid = grid;
  report.eigenfunction.values = w;
  op.apply(report.eigenfunction.values, lw);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res = std::max(res, std::abs(lw[i] - lambda * report.eigenfunction.values[i]));
  }
  report.eigen_residual = res;
  if (growth.transition == Transition::CosineSine) {
    const double edge = growth.patch_edge();
    const SlopeFit right =
        fit_log_slope(report.eigenfunction, edge + 5.0, grid.x_max - 5.0);
    const SlopeFit left =
        fit_log_slope(report.eigenfunction, -grid.x_max + 5.0, -(edge + 5.0));
    report.tail_exponents = {right.slope, left.slope};
  } else {
    report.tail_exponents = {std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN()};
  }
  return report;
}

GrowthRateResult principal_eigenvalue_growthrate(double c, const GrowthModel& growth,
                                                 const Grid& grid,
                                                 const ConvolutionOperator& conv,
                                                 double expected_gap,
                                                 BoundaryMode mode,
                                                 double dt_override) {
  LinearizedOperator op(c, conv, grid, growth, mode);
  const std::size_t n = static_cast<std::size_t>(grid.n);
  const double t_max = 200.0 / std::max(0.01, expected_gap);
  const double dt_bound = EvolveSettings::cfl_bound(grid, c, growth);
  if (dt_override > dt_bound) {
    throw std::invalid_argument("growthrate: dt_override violates the CFL bound");
  }
  const double dt = dt_override > 0.0 ? dt_override : 0.9 * dt_bound;
  const long probe_stride = std::max(1L, std::lround(1.0 / dt));
  const long n_steps = static_cast<long>(std::ceil(t_max / dt));

  std::vector<double> v(n, 1.0), k1(n), k2(n), k3(n), k4(n), stage(n);
  double log_accum = 0.0;
  GrowthRateResult out;
  out.trace.emplace_back(0.0, 0.0);
  for (long k = 1; k <= n_steps; ++k) {
    op.apply(v, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = v[i] + 0.5 * dt * k1[i];
    op.apply(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = v[i] + 0.5 * dt * k2[i];
    op.apply(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = v[i] + dt * k3[i];
    op.apply(stage, k4);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (k % probe_stride == 0) {
      double norm = 0.0;
      for (double x : v) norm = std::max(norm, std::abs(x));
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::runtime_error("growth-rate evolution collapsed or diverged");
      }
      log_accum += std::log(norm);
      for (double& x : v) x /= norm;
      out.trace.emplace_back(dt * static_cast<double>(k), log_accum);
    }
  }
  // least-squares slope over the final half of the accumulated log norm
  const std::size_t total = out.trace.size();
  const std::size_t start = total / 2;
  std::vector<double> ts, ys;
  for (std::size_t i = start; i < total; ++i) {
    ts.push_back(out.trace[i].first);
    ys.push_back(out.trace[i].second);
  }
  const LinearFit fit = least_squares(ts, ys);
  out.lambda = fit.slope;
  out.r_squared = fit.r_squared;
  out.converged = fit.r_squared >= 0.999;
  return out;
}

double principal_eigenvalue_dense(const LinearizedOperator& op) {
  const int n = op.grid().n;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> unit(static_cast<std::size_t>(n), 0.0);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    unit[static_cast<std::size_t>(j)] = 1.0;
    op.apply(unit, col);
    for (int i = 0; i < n; ++i) mat(i, j) = col[static_cast<std::size_t>(i)];
    unit[static_cast<std::size_t>(j)] = 0.0;
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, /*computeEigenvectors=*/false);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    best = std::max(best, solver.eigenvalues()[i].real());
  }
  return best;
}

TailCheck eigen_tail_check(const SpectralReport& report,
                           const CharacteristicRoots& roots,
                           const GrowthModel& growth) {
  TailCheck check;
  if (growth.transition == Transition::Homogeneous) {
    return check;  // flat eigenfunction, nothing to fit
  }
  if (!(report.lambda_cl > -growth.q)) {
    throw std::invalid_argument("eigen_tail_check: lambda must exceed -q");
  }
  const Grid& grid = report.eigenfunction.grid;
  const double edge = growth.patch_edge();
  const SlopeFit right =
      fit_log_slope(report.eigenfunction, edge + 5.0, grid.x_max - 5.0);
  const SlopeFit left =
      fit_log_slope(report.eigenfunction, -grid.x_max + 5.0, -(edge + 5.0));
  if (right.points < 10 || left.points < 10) {
    throw std::invalid_argument("eigen_tail_check: fit window too short");
  }
  check.applicable = true;
  check.right_slope = right.slope;
  check.left_slope = left.slope;
  check.right_bound = roots.mu_minus + 0.05 * std::abs(roots.mu_minus);
  check.left_bound = roots.mu_plus - 0.05 * roots.mu_plus;
  check.pass = check.right_slope <= check.right_bound &&
               check.left_slope >= check.left_bound;
  return check;
}

SlopeFit fit_log_slope(const Field& field, double lo, double hi) {
  std::vector<double> xs, ys;
  for (int i = 0; i < field.grid.n; ++i) {
    const double x = field.grid.x(i);
    if (x < lo || x > hi) continue;
    const double v = field.values[static_cast<std::size_t>(i)];
    if (!(v > 1e-300)) continue;
    xs.push_back(x);
    ys.push_back(std::log(v));
  }
  SlopeFit out;
  out.points = static_cast<int>(xs.size());
  if (out.points < 2) return out;
  const LinearFit fit = least_squares(xs, ys);
  out.slope = fit.slope;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace habitat
