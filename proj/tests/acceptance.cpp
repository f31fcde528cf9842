// Acceptance suite: runs every release criterion at desk scale and prints one
// pass/fail line per criterion. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "habitat/analysis.hpp"
#include "habitat/config.hpp"
#include "habitat/convolution.hpp"
#include "habitat/field.hpp"
#include "habitat/frame_solver.hpp"
#include "habitat/growth.hpp"
#include "habitat/io.hpp"
#include "habitat/kernel.hpp"
#include "habitat/periodic_spectral.hpp"
#include "habitat/spectral.hpp"

using namespace habitat;

namespace {

struct Criterion {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Default desk-scale instance: Gaussian sigma 1, r = q = 1, L0 = 1,
// grid n = 2048 on [-60, 60].
struct Desk {
  Kernel kernel = Kernel::gaussian(1.0);
  Grid grid = Grid::make(60.0, 2048);
  ConvolutionOperator conv = ConvolutionOperator::build(kernel, grid.dx, grid.n);
  double c_star = spreading_speed(kernel, 1.0).c_star;

  GrowthModel growth(double L) const {
    GrowthModel g;
    g.r = 1.0;
    g.q = 1.0;
    g.L = L;
    g.L0 = 1.0;
    return g;
  }

  ProblemSetup setup() const {
    ProblemSetup s;
    s.kernel = kernel;
    s.r = 1.0;
    s.q = 1.0;
    s.L0 = 1.0;
    s.grid = grid;
    s.settings.t_max = 150.0;
    return s;
  }
};

Criterion criterion_spreading_speed(const Desk& desk) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpreadingSpeed speed = spreading_speed(desk.kernel, 1.0);
  const double elapsed = seconds_since(t0);
  const double err_c = std::abs(speed.c_star - std::exp(0.5));
  const double err_mu = std::abs(speed.mu_star - 1.0);
  Criterion out;
  out.pass = err_c < 1e-8 && err_mu < 1e-8 && elapsed < 0.1;
  out.detail = "|c*-e^(1/2)|=" + fmt(err_c) + " |mu*-1|=" + fmt(err_mu) +
               " runtime=" + fmt(elapsed) + "s";
  return out;
}

Criterion criterion_characteristic_roots(const Desk& desk) {
  const CharacteristicRoots base = characteristic_roots(0.0, 1.0, desk.kernel, 0.0);
  const double expected = std::sqrt(2.0 * std::log(2.0));
  const double err = std::max(std::abs(base.mu_plus - expected),
                              std::abs(base.mu_minus + expected));
  double worst_residual = std::max(base.residuals[0], base.residuals[1]);
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> c_dist(0.0, 2.0);
  std::uniform_real_distribution<double> q_dist(0.3, 2.0);
  std::uniform_real_distribution<double> s_dist(0.6, 1.6);
  for (int k = 0; k < 50; ++k) {
    const double c = c_dist(rng);
    const double q = q_dist(rng);
    const Kernel kernel = k % 4 == 0 ? Kernel::compact_bump(s_dist(rng))
                                     : Kernel::gaussian(s_dist(rng));
    std::uniform_real_distribution<double> l_dist(-q + 0.05, 2.0);
    const CharacteristicRoots roots = characteristic_roots(c, q, kernel, l_dist(rng));
    worst_residual = std::max(worst_residual,
                              std::max(roots.residuals[0], roots.residuals[1]));
  }
  Criterion out;
  out.pass = err < 1e-8 && worst_residual < 1e-10;
  out.detail = "|mu-sqrt(2ln2)|=" + fmt(err) +
               " worst |g| over 50 random instances=" + fmt(worst_residual);
  return out;
}

Criterion criterion_constant_coefficient_identities(const Desk& desk) {
  GrowthModel hom = desk.growth(10.0);
  hom.transition = Transition::Homogeneous;
  const SpectralReport op_report = principal_eigenvalue_operator(
      0.5, hom, desk.grid, desk.conv, BoundaryMode::PeriodicWrap);
  const GrowthRateResult gr = principal_eigenvalue_growthrate(
      0.5, hom, desk.grid, desk.conv, 2.0, BoundaryMode::PeriodicWrap, 0.05);
  const double err_op = std::abs(op_report.lambda_cl - hom.r);
  const double err_gr = std::abs(gr.lambda - hom.r);

  const double a0 = 0.3;
  const int m = 512;
  const double p = 24.0;
  const PeriodicCoefficient coef = PeriodicCoefficient::constant(a0, p, m);
  const PeriodicConvolution pconv = PeriodicConvolution::build(desk.kernel, p, m);
  const LambdaT lt = lambda_T(coef, 0.8);
  const PeriodicEigen eig = periodic_principal_eigenvalue(coef, 0.8, pconv);
  const double err_lt = std::abs(lt.value - (-1.0 + a0));
  const double err_lp = std::abs(eig.lambda_p - a0);

  Criterion out;
  out.pass = err_op < 1e-6 && err_gr < 1e-6 && err_lt < 1e-8 && err_lp < 1e-8;
  out.detail = "|lambda_op-r|=" + fmt(err_op) + " |lambda_gr-r|=" + fmt(err_gr) +
               " |lambda_T+1-a0|=" + fmt(err_lt) + " |lambda_p-a0|=" + fmt(err_lp);
  return out;
}

Criterion criterion_cross_method_agreement(const Desk& desk) {
  // The growth-rate transient dies at the spectral gap, which the operator
  // method measures for free; its estimate sets each cell's run length.
  const Grid grid = Grid::make(40.0, 1024);
  const ConvolutionOperator conv =
      ConvolutionOperator::build(desk.kernel, grid.dx, grid.n);
  const std::vector<double> c_values{0.0, 0.25 * desk.c_star, 0.5 * desk.c_star,
                                     0.75 * desk.c_star};
  const std::vector<double> L_values{1.5, 3.0, 4.5, 6.0};
  double worst = 0.0;
  for (double c : c_values) {
    for (double L : L_values) {
      const GrowthModel growth = desk.growth(L);
      const SpectralReport op_report =
          principal_eigenvalue_operator(c, growth, grid, conv);
      const double gap = std::clamp(
          std::min(op_report.lambda_cl + growth.q, op_report.gap_estimate), 0.1,
          5.0);
      const GrowthRateResult gr =
          principal_eigenvalue_growthrate(c, growth, grid, conv, gap);
      worst = std::max(worst, std::abs(gr.lambda - op_report.lambda_cl));
    }
  }
  Criterion out;
  out.pass = worst < 1e-3;
  out.detail = "worst |lambda_op - lambda_gr| over 4x4 grid=" + fmt(worst);
  return out;
}

Criterion criterion_periodization_squeeze(const Desk& desk) {
  const double c = 0.5;
  const double L = 10.0;
  const GrowthModel growth = desk.growth(L);
  const double base_p =
      2.0 * desk.kernel.support_radius + 2.0 * growth.patch_edge() + 5.0;
  const PeriodizationResult seq =
      periodization_limit(c, growth, desk.kernel, base_p, 3, desk.grid.dx);
  const double whole_line =
      principal_eigenvalue_operator(c, growth, desk.grid, desk.conv).lambda_cl;
  const double gap = std::abs(seq.limit - whole_line);
  Criterion out;
  out.pass = seq.monotone_ok && gap < 1e-3;
  out.detail = "worst increase=" + fmt(seq.worst_increase) +
               " |limit-lambda(c,L)|=" + fmt(gap) + " over p in {" +
               fmt(seq.p_values.front()) + ".." + fmt(seq.p_values.back()) + "}";
  return out;
}

Criterion criterion_sign_dichotomy(const Desk& desk) {
  const double c = 1.1 * desk.c_star;
  // From u = 1 the carrying-capacity plateau inside the patch retreats as a
  // front at speed c - c*, so the extinction horizon scales with L/(c - c*).
  const double front_speed = c - desk.c_star;
  Criterion out;
  out.pass = true;
  std::ostringstream detail;
  for (double L : {5.0, 20.0, 50.0}) {
    const double x_max = std::max(60.0, L + 30.0);
    const int n = static_cast<int>(std::lround(2.0 * x_max / 0.117));
    const Grid grid = Grid::make(x_max, n);
    const ConvolutionOperator conv =
        ConvolutionOperator::build(desk.kernel, grid.dx, grid.n);
    const GrowthModel growth = desk.growth(L);
    const double lambda =
        principal_eigenvalue_operator(c, growth, grid, conv).lambda_cl;
    EvolveSettings settings;
    settings.t_max = 100.0 + 2.6 * L / front_speed;
    settings.record_stride = 1 << 20;  // keep only the endpoints
    const SteadyState steady =
        steady_state_from_above(c, conv, growth, settings, grid);
    const Trajectory decay =
        evolve(Field::constant(grid, 1.0), c, conv, growth, settings);
    const double final_norm = decay.snapshots.back().max();
    const bool ok = lambda < 0.0 && !steady.positive && final_norm < 1e-4;
    out.pass = out.pass && ok;
    detail << " L=" << L << ": lambda=" << fmt(lambda)
           << " steady=" << (steady.positive ? "Positive" : "Trivial")
           << " final_norm=" << fmt(final_norm) << ";";
  }
  out.detail = "c=1.1c*:" + detail.str();
  return out;
}

Criterion criterion_threshold_consistency(const Desk& desk) {
  // Both bisections share this grid, so the threshold comparison is
  // discretization-consistent; the coarse grid keeps the adaptively extended
  // near-threshold probes affordable and its bias enters the reported slack.
  ProblemSetup setup = desk.setup();
  setup.grid = Grid::make(30.0, 512);
  setup.settings.t_max = 150.0;
  const ConvolutionOperator conv =
      ConvolutionOperator::build(desk.kernel, setup.grid.dx, setup.grid.n);
  Criterion out;
  out.pass = true;
  std::ostringstream detail;
  for (double fraction : {0.25, 0.5, 0.75}) {
    const double c = fraction * desk.c_star;
    const ThresholdResult by_lambda = critical_patch_size(c, setup, {0.05, 6.0});
    const ThresholdResult by_steady = steady_state_threshold(c, setup, {0.05, 6.0});
    if (!by_lambda.found || !by_steady.found) {
      out.pass = false;
      detail << " c=" << fmt(c) << ": threshold not bracketed;";
      continue;
    }
    // grid-induced slack: eigenvalue shift between n and 2n, mapped through
    // the local slope dlambda/dL at the crossing
    const Grid fine = Grid::make(setup.grid.x_max, 2 * setup.grid.n - 1);
    const ConvolutionOperator conv_fine =
        ConvolutionOperator::build(desk.kernel, fine.dx, fine.n);
    const GrowthModel at_cross = desk.growth(by_lambda.L_crossing);
    const double lambda_coarse =
        principal_eigenvalue_operator(c, at_cross, setup.grid, conv).lambda_cl;
    const double lambda_fine =
        principal_eigenvalue_operator(c, at_cross, fine, conv_fine).lambda_cl;
    const double lo = principal_eigenvalue_operator(
                          c, desk.growth(by_lambda.L_crossing - 0.1), setup.grid,
                          conv)
                          .lambda_cl;
    const double hi = principal_eigenvalue_operator(
                          c, desk.growth(by_lambda.L_crossing + 0.1), setup.grid,
                          conv)
                          .lambda_cl;
    const double slope = (hi - lo) / 0.2;
    const double slack =
        slope > 0.0 ? std::abs(lambda_fine - lambda_coarse) / slope : 0.0;
    const double gap = std::abs(by_lambda.L_crossing - by_steady.L_crossing);
    const bool ok = gap <= 2e-3 + 2.0 * slack;
    out.pass = out.pass && ok;
    detail << " c=" << fmt(c) << ": L**=" << fmt(by_lambda.L_crossing)
           << " L*=" << fmt(by_steady.L_crossing) << " gap=" << fmt(gap)
           << " slack=" << fmt(slack) << ";";
  }
  out.detail = detail.str();
  return out;
}

Criterion criterion_tail_bounds(const Desk& desk) {
  const double c = 0.5;
  const GrowthModel growth = desk.growth(15.0);
  EvolveSettings settings;
  settings.t_max = 200.0;
  const SteadyState steady =
      steady_state_from_above(c, desk.conv, growth, settings, desk.grid);
  Criterion out;
  if (!steady.positive) {
    out.detail = "instance unexpectedly not persistent";
    return out;
  }
  const WaveTailReport wave =
      wave_tail_audit(steady.profile, c, growth, desk.kernel, desk.conv);
  const SpectralReport eig =
      principal_eigenvalue_operator(c, growth, desk.grid, desk.conv);
  const CharacteristicRoots roots =
      characteristic_roots(c, growth.q, desk.kernel, eig.lambda_cl);
  const TailCheck eig_tails = eigen_tail_check(eig, roots, growth);
  out.pass = wave.pass && wave.supersolution_ok && eig_tails.applicable &&
             eig_tails.pass;
  out.detail = "wave slopes (" + fmt(wave.right_slope) + "," + fmt(wave.left_slope) +
               ") bounds (" + fmt(wave.right_bound) + "," + fmt(wave.left_bound) +
               ") psi-domination=" + (wave.supersolution_ok ? "ok" : "violated") +
               " eigen slopes (" + fmt(eig_tails.right_slope) + "," +
               fmt(eig_tails.left_slope) + ")";
  return out;
}

Criterion criterion_comparison_campaign() {
  ProblemSetup setup;
  setup.kernel = Kernel::gaussian(1.0);
  setup.grid = Grid::make(40.0, 1024);
  const ComparisonCampaignResult result =
      comparison_campaign(setup, 0.5, 5.0, 100, 20240817, 10.0);
  Criterion out;
  out.pass = result.pass;
  out.detail = "100 ordered pairs, worst violation=" + fmt(result.worst_violation);
  return out;
}

Criterion criterion_uniqueness(const Desk& desk) {
  ProblemSetup setup = desk.setup();
  setup.settings.t_max = 250.0;
  const UniquenessReport report = uniqueness_audit(0.0, 20.0, setup);
  Criterion out;
  out.pass = report.pass;
  out.detail = "max pairwise gap=" + fmt(report.max_gap) +
               (report.mixed_outcomes ? " (mixed outcomes!)" : "");
  return out;
}

Criterion criterion_monotonicity(const Desk& desk) {
  const double c = 0.5 * desk.c_star;
  const double mu_star = spreading_speed(desk.kernel, 1.0).mu_star;
  const double upper = mu_star * (desk.c_star - c);
  double prev = -1e300;
  double worst_decrease = 0.0;
  bool bounds_ok = true;
  double worst_upper_excess = -1e300;
  const double chain[10] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0};
  for (int k = 0; k < 10; ++k) {
    const double L = chain[k];
    const double lambda =
        principal_eigenvalue_operator(c, desk.growth(L), desk.grid, desk.conv)
            .lambda_cl;
    worst_decrease = std::max(worst_decrease, prev - lambda);
    prev = lambda;
    bounds_ok = bounds_ok && lambda >= -1.0 - 1e-6 && lambda < 1.0;
    worst_upper_excess = std::max(worst_upper_excess, lambda - upper);
  }
  Criterion out;
  out.pass = worst_decrease < 1e-8 && bounds_ok && worst_upper_excess <= 0.0;
  out.detail = "worst monotonicity violation=" + fmt(worst_decrease) +
               " max(lambda - mu*(c*-c))=" + fmt(worst_upper_excess) +
               " bounds(-q,r)=" + (bounds_ok ? "ok" : "violated");
  return out;
}

Criterion criterion_frame_equivalence(const Desk& desk) {
  const double c = 0.5;
  const double t_final = 5.0;
  const GrowthModel growth = desk.growth(10.0);
  EvolveSettings settings;
  settings.dt = 0.8 * EvolveSettings::cfl_bound(desk.grid, c, growth);
  settings.t_max = std::ceil(t_final / settings.dt) * settings.dt;
  Field u0 = Field::constant(desk.grid, 0.0);
  for (int i = 0; i < desk.grid.n; ++i) {
    const double x = desk.grid.x(i);
    u0.values[static_cast<std::size_t>(i)] = 0.8 * std::exp(-x * x / 32.0);
  }
  const Trajectory moving = evolve(u0, c, desk.conv, growth, settings);
  const Trajectory fixed = simulate_fixed_frame(u0, c, desk.conv, growth, settings);
  const Field& v = moving.snapshots.back();
  const Field& u = fixed.snapshots.back();
  const double t = v.time;
  double slope_max = 0.0;
  for (int i = 1; i < desk.grid.n; ++i) {
    slope_max = std::max(slope_max,
                         std::abs(v.values[static_cast<std::size_t>(i)] -
                                  v.values[static_cast<std::size_t>(i - 1)]) /
                             desk.grid.dx);
  }
  const double tol = 2.0 * desk.grid.dx * slope_max + 1e-8;
  double worst = 0.0;
  for (int i = 0; i < desk.grid.n; ++i) {
    const double xi = desk.grid.x(i);
    if (std::abs(xi) >
        desk.grid.x_max - desk.kernel.support_radius - c * t - 1.0) {
      continue;
    }
    worst = std::max(worst, std::abs(u.interpolate(xi + c * t) -
                                     v.values[static_cast<std::size_t>(i)]));
  }
  Criterion out;
  out.pass = worst <= tol;
  out.detail = "sup |u(t, xi+ct) - v(t, xi)|=" + fmt(worst) +
               " tolerance=" + fmt(tol) + " at t=" + fmt(t);
  return out;
}

Criterion criterion_grid_convergence(const Desk& desk) {
  const double c = 0.5;
  const GrowthModel growth = desk.growth(10.0);
  const double coarse =
      principal_eigenvalue_operator(c, growth, desk.grid, desk.conv).lambda_cl;
  const Grid fine = Grid::make(desk.grid.x_max, 2 * desk.grid.n);
  const ConvolutionOperator conv_fine =
      ConvolutionOperator::build(desk.kernel, fine.dx, fine.n);
  const double refined =
      principal_eigenvalue_operator(c, growth, fine, conv_fine).lambda_cl;
  const double gap = std::abs(coarse - refined);
  Criterion out;
  out.pass = gap < 5e-4;
  out.detail = "|lambda(n) - lambda(2n)|=" + fmt(gap);
  return out;
}

Criterion criterion_determinism(const Desk& desk) {
  ProblemSetup setup;
  setup.kernel = desk.kernel;
  setup.grid = Grid::make(40.0, 1024);
  setup.settings.t_max = 120.0;
  const std::vector<double> cs{0.3 * desk.c_star};
  const std::vector<double> Ls{2.0, 8.0};
  const std::vector<PhaseCell> first = phase_sweep(cs, Ls, setup, 2);
  const std::vector<PhaseCell> second = phase_sweep(cs, Ls, setup, 1);
  const std::string csv1 = sweep_csv(first);
  const std::string csv2 = sweep_csv(second);
  Criterion out;
  out.pass = csv1 == csv2;
  out.detail = out.pass ? "repeated sweep CSVs byte-identical"
                        : "sweep CSVs differ between runs";
  return out;
}

}  // namespace

int main() {
  const auto suite_start = std::chrono::steady_clock::now();
  Desk desk;

  struct Entry {
    int index;
    const char* name;
    std::function<Criterion()> run;
  };
  const std::vector<Entry> entries{
      {1, "spreading speed closed form", [&] { return criterion_spreading_speed(desk); }},
      {2, "characteristic roots", [&] { return criterion_characteristic_roots(desk); }},
      {3, "constant-coefficient identities",
       [&] { return criterion_constant_coefficient_identities(desk); }},
      {4, "cross-method eigenvalue agreement",
       [&] { return criterion_cross_method_agreement(desk); }},
      {5, "periodization squeeze", [&] { return criterion_periodization_squeeze(desk); }},
      {6, "sign dichotomy beyond c*", [&] { return criterion_sign_dichotomy(desk); }},
      {7, "threshold consistency L** vs L*",
       [&] { return criterion_threshold_consistency(desk); }},
      {8, "tail bounds", [&] { return criterion_tail_bounds(desk); }},
      {9, "comparison principle campaign", [] { return criterion_comparison_campaign(); }},
      {10, "uniqueness of the wave", [&] { return criterion_uniqueness(desk); }},
      {11, "monotonicity and bound audits", [&] { return criterion_monotonicity(desk); }},
      {12, "frame equivalence", [&] { return criterion_frame_equivalence(desk); }},
      {13, "grid-convergence proxy", [&] { return criterion_grid_convergence(desk); }},
      {14, "sweep determinism", [&] { return criterion_determinism(desk); }},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion result;
    try {
      result = entry.run();
    } catch (const std::exception& exc) {
      result.pass = false;
      result.detail = std::string("exception: ") + exc.what();
    }
    const double elapsed = seconds_since(t0);
    if (!result.pass) ++failures;
    std::printf("[%s] criterion %2d: %s (%s) [%.1fs]\n",
                result.pass ? "PASS" : "FAIL", entry.index, entry.name,
                result.detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed in %.1fs\n",
              static_cast<int>(entries.size()) - failures, entries.size(),
              seconds_since(suite_start));
  return failures;
}
