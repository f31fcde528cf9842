#include "habitat/periodic_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace habitat {

namespace {

constexpr double kInnerTol = 1e-12;   // power iteration, two orders inside the
constexpr double kAlphaTol = 1e-10;   // rho(alpha)=1 bisection tolerance
constexpr long kMaxPowerIters = 200000;

// 4-point Gauss-Legendre on [0, 1].
constexpr double kGaussX[4] = {0.06943184420297371, 0.33000947820757187,
                               0.6699905217924281, 0.9305681557970262};
constexpr double kGaussW[4] = {0.17392742256872693, 0.32607257743127307,
                               0.32607257743127307, 0.17392742256872693};

// Per-cell factors of the resolvent integral with the cell-linear coefficient:
// E_l contracts across cell l, C_l = q0_l w_l + q1_l w_{l+1} is the source
// contribution with w interpolated linearly.
struct ResolventTables {
  std::vector<double> E, q0, q1;
  double D = 0.0;  // full-period contraction
};

ResolventTables make_tables(const PeriodicCoefficient& coef, double c,
                            double alpha) {
  const int m = coef.m;
  const double h = coef.h;
  ResolventTables t;
  t.E.resize(static_cast<std::size_t>(m));
  t.q0.resize(static_cast<std::size_t>(m));
  t.q1.resize(static_cast<std::size_t>(m));
  double log_d = 0.0;
  for (int l = 0; l < m; ++l) {
    const double a0 = coef.a[static_cast<std::size_t>(l)];
    const double a1 = coef.a[static_cast<std::size_t>((l + 1) % m)];
    // g(s) = (alpha + 1) s - [a0 s + (a1 - a0) s^2 / (2h)], s in [0, h]
    const double g_end = (alpha + 1.0) * h - 0.5 * (a0 + a1) * h;
    if (g_end / c < -600.0) {
      throw std::runtime_error("resolvent_apply: exponential factor overflow");
    }
    t.E[static_cast<std::size_t>(l)] = std::exp(-g_end / c);
    log_d -= g_end / c;
    double q0 = 0.0, q1 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double s = kGaussX[k] * h;
      const double g = (alpha + 1.0) * s - (a0 * s + (a1 - a0) * s * s / (2.0 * h));
      const double weight = kGaussW[k] * h * std::exp(-g / c) / c;
      q0 += weight * (1.0 - kGaussX[k]);
      q1 += weight * kGaussX[k];
    }
    t.q0[static_cast<std::size_t>(l)] = q0;
    t.q1[static_cast<std::size_t>(l)] = q1;
  }
  t.D = std::exp(log_d);
  return t;
}

std::vector<double> apply_tables(const ResolventTables& t,
                                 std::span<const double> w) {
  const int m = static_cast<int>(t.E.size());
  // I_j accumulates one full period starting at node j; the doubled backward
  // sweep T_k = C_k + E_k T_{k+1} yields I_j = T_j - D T_{j+m}.
  std::vector<double> cell(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) {
    cell[static_cast<std::size_t>(l)] =
        t.q0[static_cast<std::size_t>(l)] * w[static_cast<std::size_t>(l)] +
        t.q1[static_cast<std::size_t>(l)] * w[static_cast<std::size_t>((l + 1) % m)];
  }
  std::vector<double> sweep(static_cast<std::size_t>(2 * m + 1), 0.0);
  for (int k = 2 * m - 1; k >= 0; --k) {
    const int l = k % m;
    sweep[static_cast<std::size_t>(k)] =
        cell[static_cast<std::size_t>(l)] +
        t.E[static_cast<std::size_t>(l)] * sweep[static_cast<std::size_t>(k + 1)];
  }
  std::vector<double> out(static_cast<std::size_t>(m));
  const double denom = 1.0 - t.D;
  for (int j = 0; j < m; ++j) {
    out[static_cast<std::size_t>(j)] =
        (sweep[static_cast<std::size_t>(j)] -
         t.D * sweep[static_cast<std::size_t>(j + m)]) /
        denom;
  }
  return out;
}

double sup_norm(std::span<const double> v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

double rho_with_tables(const ResolventTables& tables,
                       const PeriodicConvolution& conv, int m,
                       std::vector<double>* eigvec = nullptr) {
  std::vector<double> v(static_cast<std::size_t>(m), 1.0);
  std::vector<double> z(static_cast<std::size_t>(m));
  double rho_prev = -1.0;
  for (long iter = 0; iter < kMaxPowerIters; ++iter) {
    std::vector<double> u = apply_tables(tables, v);
    conv.apply(u, z);
    const double rho = sup_norm(z);
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      throw std::runtime_error("spectral_radius_map: iteration collapsed");
    }
    for (double& x : z) x /= rho;
    v.swap(z);
    if (rho_prev >= 0.0 && std::abs(rho - rho_prev) < kInnerTol * std::max(1.0, rho)) {
      if (eigvec) *eigvec = v;
      return rho;
    }
    rho_prev = rho;
  }
  throw std::runtime_error("spectral_radius_map: power iteration did not converge");
}

}  // namespace

PeriodicCoefficient PeriodicCoefficient::from_growth(const GrowthModel& growth,
                                                     double p, double target_h) {
  growth.validate();
  if (!(p > 2.0 * growth.patch_edge())) {
    throw std::invalid_argument("PeriodicCoefficient: need p > 2 (L + L0)");
  }
  if (!(target_h > 0.0)) {
    throw std::invalid_argument("PeriodicCoefficient: target_h must be positive");
  }
  PeriodicCoefficient coef;
  coef.p = p;
  // Even node count keeps xi = 0 on the lattice, so period doublings sample
  // the coefficient on nested grids and the lambda_p chain stays monotone.
  int m = std::max(8, static_cast<int>(std::lround(p / target_h)));
  if (m % 2 == 1) ++m;
  coef.m = m;
  coef.h = p / static_cast<double>(coef.m);
  coef.a.resize(static_cast<std::size_t>(coef.m));
  double sum = 0.0;
  for (int j = 0; j < coef.m; ++j) {
    const double value = growth.linearized(coef.node(j));
    coef.a[static_cast<std::size_t>(j)] = value;
    sum += value;
    coef.a_max_abs = std::max(coef.a_max_abs, std::abs(value));
  }
  coef.abar = sum / static_cast<double>(coef.m);
  return coef;
}

PeriodicCoefficient PeriodicCoefficient::constant(double a0, double p, int m) {
  if (!(p > 0.0) || m < 3) {
    throw std::invalid_argument("PeriodicCoefficient: bad parameters");
  }
  PeriodicCoefficient coef;
  coef.p = p;
  coef.m = m;
  coef.h = p / static_cast<double>(m);
  coef.a.assign(static_cast<std::size_t>(m), a0);
  coef.abar = a0;
  coef.a_max_abs = std::abs(a0);
  return coef;
}

LambdaT lambda_T(const PeriodicCoefficient& coef, double c) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("lambda_T: defined for c > 0 (use the direct operator at c = 0)");
  }
  LambdaT out;
  out.value = -1.0 + coef.abar;
  const int m = coef.m;
  out.eigenfunction.resize(static_cast<std::size_t>(m));
  // Exponent (abar xi - \int a)/c with the cumulative trapezoid integral; the
  // base point only scales the eigenfunction and drops out on normalization.
  std::vector<double> expo(static_cast<std::size_t>(m), 0.0);
  double cum = 0.0;
  double max_expo = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    if (j > 0) {
      cum += 0.5 * coef.h *
             (coef.a[static_cast<std::size_t>(j - 1)] + coef.a[static_cast<std::size_t>(j)]);
    }
    const double e = (coef.abar * (coef.node(j) - coef.node(0)) - cum) / c;
    expo[static_cast<std::size_t>(j)] = e;
    max_expo = std::max(max_expo, e);
  }
  for (int j = 0; j < m; ++j) {
    out.eigenfunction[static_cast<std::size_t>(j)] =
        std::exp(expo[static_cast<std::size_t>(j)] - max_expo);
  }
  // T phi - lambda_T phi with the analytic derivative phi' = phi (abar - a)/c.
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    const double phi = out.eigenfunction[static_cast<std::size_t>(j)];
    const double dphi = phi * (coef.abar - coef.a[static_cast<std::size_t>(j)]) / c;
    const double res = c * dphi - phi + coef.a[static_cast<std::size_t>(j)] * phi -
                       out.value * phi;
    worst = std::max(worst, std::abs(res));
  }
  out.residual = worst;
  return out;
}

std::vector<double> resolvent_apply(const PeriodicCoefficient& coef, double c,
                                    double alpha, std::span<const double> w) {
  if (!(c > 0.0)) throw std::invalid_argument("resolvent_apply: need c > 0");
  if (!(alpha > -1.0 + coef.abar)) {
    throw std::invalid_argument("resolvent_apply: need alpha > lambda_T");
  }
  if (w.size() != static_cast<std::size_t>(coef.m)) {
    throw std::invalid_argument("resolvent_apply: field length mismatch");
  }
  const ResolventTables tables = make_tables(coef, c, alpha);
  return apply_tables(tables, w);
}

double spectral_radius_map(const PeriodicCoefficient& coef, double c,
                           double alpha, const PeriodicConvolution& conv) {
  if (!(c > 0.0)) throw std::invalid_argument("spectral_radius_map: need c > 0");
  if (!(alpha > -1.0 + coef.abar)) {
    throw std::invalid_argument("spectral_radius_map: need alpha > lambda_T");
  }
  if (conv.m() != coef.m) {
    throw std::invalid_argument("spectral_radius_map: grid mismatch");
  }
  const ResolventTables tables = make_tables(coef, c, alpha);
  return rho_with_tables(tables, conv, coef.m);
}

PeriodicEigen periodic_principal_eigenvalue(const PeriodicCoefficient& coef,
                                            double c,
                                            const PeriodicConvolution& conv) {
  if (c < 0.0) throw std::invalid_argument("periodic_principal_eigenvalue: c >= 0");
  if (conv.m() != coef.m) {
    throw std::invalid_argument("periodic_principal_eigenvalue: grid mismatch");
  }
  PeriodicEigen out;
  const int m = coef.m;

  if (c == 0.0) {
    // direct power iteration on I + dt (K - I + a)
    const double dt = 0.5 / (1.0 + conv.window_mass() + 1.0 + coef.a_max_abs);
    std::vector<double> v(static_cast<std::size_t>(m), 1.0);
    std::vector<double> lv(static_cast<std::size_t>(m));
    double lambda_prev = std::numeric_limits<double>::quiet_NaN();
    for (long iter = 0; iter < kMaxPowerIters; ++iter) {
      conv.apply(v, lv);
      for (int i = 0; i < m; ++i) {
        lv[static_cast<std::size_t>(i)] +=
            (-1.0 + coef.a[static_cast<std::size_t>(i)]) * v[static_cast<std::size_t>(i)];
      }
      double num = 0.0, den = 0.0;
      for (int i = 0; i < m; ++i) {
        num += v[static_cast<std::size_t>(i)] * lv[static_cast<std::size_t>(i)];
        den += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
      }
      const double lambda = num / den;
      if (std::isfinite(lambda_prev) && std::abs(lambda - lambda_prev) < kInnerTol) {
        out.lambda_p = lambda;
        out.converged = true;
        break;
      }
      lambda_prev = lambda;
      double norm = 0.0;
      for (int i = 0; i < m; ++i) {
        v[static_cast<std::size_t>(i)] += dt * lv[static_cast<std::size_t>(i)];
        norm = std::max(norm, std::abs(v[static_cast<std::size_t>(i)]));
      }
      for (double& x : v) x /= norm;
    }
    if (!out.converged) {
      throw std::runtime_error("periodic_principal_eigenvalue: c=0 iteration did not converge");
    }
    const double norm = sup_norm(v);
    for (double& x : v) x /= norm;
    out.eigenfunction = std::move(v);
    return out;
  }

  const double lt = -1.0 + coef.abar;
  const double eps = 1e-6 * (1.0 + std::abs(lt));
  auto rho_at = [&](double alpha, std::vector<double>* vec = nullptr) {
    const ResolventTables tables = make_tables(coef, c, alpha);
    ++out.rho_evaluations;
    return rho_with_tables(tables, conv, m, vec);
  };

  double lo = lt + eps;
  const double rho_lo = rho_at(lo);
  if (!(rho_lo > 1.0)) {
    throw std::runtime_error(
        "periodic_principal_eigenvalue: bracket failure, rho(lambda_T+eps)=" +
        std::to_string(rho_lo) + " <= 1 (coefficient too close to constant)");
  }
  double step = std::max(1.0, 2.0 * eps);
  double hi = lt + step;
  int guard = 0;
  while (rho_at(hi) >= 1.0) {
    step *= 2.0;
    hi = lt + step;
    if (++guard > 60) {
      throw std::runtime_error("periodic_principal_eigenvalue: no upper bracket for rho=1");
    }
  }
  while (hi - lo > kAlphaTol) {
    const double mid = 0.5 * (lo + hi);
    if (rho_at(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.lambda_p = 0.5 * (lo + hi);
  std::vector<double> psi;
  rho_at(out.lambda_p, &psi);
  out.eigenfunction = resolvent_apply(coef, c, out.lambda_p, psi);
  const double norm = sup_norm(out.eigenfunction);
  for (double& x : out.eigenfunction) x /= norm;
  out.converged = true;
  return out;
}

PeriodizationResult periodization_limit(double c, const GrowthModel& growth,
                                        const Kernel& kernel, double base_p,
                                        int doublings, double target_h) {
  growth.validate();
  if (doublings < 0) throw std::invalid_argument("periodization_limit: doublings >= 0");
  if (!(base_p > 2.0 * kernel.support_radius + 2.0 * growth.patch_edge())) {
    throw std::invalid_argument(
        "periodization_limit: need base_p > 2 support_radius + 2 (L + L0)");
  }
  PeriodizationResult out;
  int m0 = std::max(8, static_cast<int>(std::lround(base_p / target_h)));
  if (m0 % 2 == 1) ++m0;
  for (int k = 0; k <= doublings; ++k) {
    const double p = base_p * std::pow(2.0, k);
    const int m = m0 << k;
    const PeriodicCoefficient coef =
        PeriodicCoefficient::from_growth(growth, p, p / m);
    if (coef.m != m) {
      throw std::logic_error("periodization_limit: node count drifted");
    }
    const PeriodicConvolution conv = PeriodicConvolution::build(kernel, p, coef.m);
    const PeriodicEigen eig = periodic_principal_eigenvalue(coef, c, conv);
    out.p_values.push_back(p);
    out.lambda_sequence.push_back(eig.lambda_p);
  }
  for (std::size_t i = 1; i < out.lambda_sequence.size(); ++i) {
    const double increase = out.lambda_sequence[i] - out.lambda_sequence[i - 1];
    out.worst_increase = std::max(out.worst_increase, increase);
  }
  out.monotone_ok = out.worst_increase <= 1e-8;
  out.limit = out.lambda_sequence.back();
  return out;
}

}  // namespace habitat
