#include "habitat/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <thread>

namespace habitat {

namespace {

constexpr double kLTolerance = 1e-3;
constexpr double kMethodGapFlag = 1e-2;
constexpr double kPositiveLevel = 1e-6;
constexpr double kPatchMinLevel = 1e-8;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double eigenvalue_at(double c, double L, const ProblemSetup& setup,
                     const ConvolutionOperator& conv) {
  const GrowthModel growth = setup.growth_for(L);
  return principal_eigenvalue_operator(c, growth, setup.grid, conv).lambda_cl;
}

// True once the probe decrements contract at a steady geometric ratio, i.e.
// the slow transient is a single exponential and Aitken extrapolation of the
// sequence is trustworthy. An algebraic 1/(rt) decay drifts its ratio toward
// one and fails this test.
bool decrements_geometric(const std::vector<double>& sup) {
  const std::size_t n = sup.size();
  if (n < 12) return false;
  auto ratio_at = [&](std::size_t k) -> double {
    const double d1 = sup[k - 1] - sup[k];
    const double d0 = sup[k - 2] - sup[k - 1];
    if (!(d0 > 0.0) || !(d1 > 0.0)) return -1.0;
    return d1 / d0;
  };
  const double rho_end = ratio_at(n - 1);
  const double rho_mid = ratio_at(3 * n / 4);
  if (rho_end < 0.0 || rho_mid < 0.0) return true;  // decrements vanished
  if (!(rho_end < 1.0)) return false;
  return std::abs(rho_end - rho_mid) <= 0.05 * (1.0 - rho_end);
}

bool steady_positive_at(double c, double L, const ProblemSetup& setup,
                        const ConvolutionOperator& conv) {
  const GrowthModel growth = setup.growth_for(L);
  const SteadyState state =
      steady_state_adaptive(c, growth, conv, setup.settings, setup.grid);
  return state.positive;
}

ThresholdResult bisect_threshold(
    std::pair<double, double> l_bracket,
    const std::function<bool(double)>& above_threshold, const char* what) {
  ThresholdResult out;
  double lo = l_bracket.first;
  double hi = l_bracket.second;
  if (!(lo > 0.0) || !(hi > lo)) {
    out.note = std::string(what) + ": invalid bracket";
    return out;
  }
  ++out.evaluations;
  if (above_threshold(lo)) {
    out.note = std::string(what) + ": already above threshold at L=" +
               std::to_string(lo) + " (crossing below bracket)";
    out.bracket = {0.0, lo};
    return out;
  }
  const double hi_cap = std::pow(2.0, 10) * lo;
  ++out.evaluations;
  while (!above_threshold(hi)) {
    hi *= 2.0;
    ++out.evaluations;
    if (hi > hi_cap) {
      out.note = std::string(what) + ": no crossing up to L=" + std::to_string(hi_cap);
      out.bracket = {lo, hi_cap};
      return out;
    }
  }
  while (hi - lo > kLTolerance) {
    const double mid = 0.5 * (lo + hi);
    ++out.evaluations;
    if (above_threshold(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.found = true;
  out.bracket = {lo, hi};
  out.L_crossing = 0.5 * (lo + hi);
  return out;
}

}  // namespace

GrowthModel ProblemSetup::growth_for(double L) const {
  GrowthModel growth;
  growth.r = r;
  growth.q = q;
  growth.L = L;
  growth.L0 = L0;
  growth.transition = Transition::CosineSine;
  growth.validate();
  return growth;
}

ConvolutionOperator ProblemSetup::make_operator() const {
  return ConvolutionOperator::build(kernel, grid.dx, grid.n);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Persistence: return "Persistence";
    case Classification::Extinction: return "Extinction";
    case Classification::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

PhaseCell classify(double c, double L, const ProblemSetup& setup) {
  PhaseCell cell;
  cell.c = c;
  cell.L = L;
  const double t0 = now_seconds();
  try {
    const GrowthModel growth = setup.growth_for(L);
    const auto grid_issues = setup.grid.check(setup.kernel, growth.patch_edge());
    if (!grid_issues.empty()) {
      cell.error = grid_issues.front();
      cell.wall_time = now_seconds() - t0;
      return cell;
    }
    const ConvolutionOperator conv = setup.make_operator();
    const SpectralReport report =
        principal_eigenvalue_operator(c, growth, setup.grid, conv);
    cell.lambda_cl = report.lambda_cl;
    if (!report.converged) {
      cell.error = "operator eigenvalue did not converge";
    }
    if (setup.method == EigenMethod::Both) {
      const double gap_guess = std::clamp(
          std::min(report.lambda_cl + setup.q, report.gap_estimate), 0.1, 5.0);
      const GrowthRateResult gr = principal_eigenvalue_growthrate(
          c, growth, setup.grid, conv, gap_guess);
      cell.method_gap = std::abs(gr.lambda - report.lambda_cl);
      if (cell.method_gap > kMethodGapFlag) {
        cell.error += (cell.error.empty() ? "" : "; ");
        cell.error += "method disagreement " + std::to_string(cell.method_gap);
      }
    }
    const SteadyState steady =
        steady_state_adaptive(c, growth, conv, setup.settings, setup.grid);
    cell.steady_max = steady.extrapolated_max;
    cell.steady_positive = steady.positive;
    if (cell.lambda_cl > setup.band) {
      const bool certified = steady.positive &&
                             steady.extrapolated_patch_min > kPatchMinLevel &&
                             steady.extrapolated_max > kPositiveLevel;
      if (certified) {
        cell.classification = Classification::Persistence;
      } else {
        cell.classification = Classification::Indeterminate;
        cell.error += (cell.error.empty() ? "" : "; ");
        cell.error += "lambda > band but steady state not certified positive";
      }
    } else if (cell.lambda_cl < -setup.band) {
      if (!steady.positive) {
        cell.classification = Classification::Extinction;
      } else {
        cell.classification = Classification::Indeterminate;
        cell.error += (cell.error.empty() ? "" : "; ");
        cell.error += "lambda < -band but steady state positive";
      }
    } else {
      cell.classification = Classification::Indeterminate;
    }
  } catch (const std::exception& exc) {
    cell.error = exc.what();
  }
  cell.wall_time = now_seconds() - t0;
  return cell;
}

ThresholdResult critical_patch_size(double c, const ProblemSetup& setup,
                                    std::pair<double, double> l_bracket) {
  if (!(c > 0.0)) {
    ThresholdResult out;
    out.note = "critical_patch_size: defined for 0 < c < c_star";
    return out;
  }
  const SpreadingSpeed speed = spreading_speed(setup.kernel, setup.r);
  if (c >= speed.c_star) {
    ThresholdResult out;
    out.note = "no finite threshold: c >= c_star = " + std::to_string(speed.c_star);
    return out;
  }
  const ConvolutionOperator conv = setup.make_operator();
  return bisect_threshold(
      l_bracket,
      [&](double L) { return eigenvalue_at(c, L, setup, conv) > 0.0; },
      "lambda bisection");
}

ThresholdResult steady_state_threshold(double c, const ProblemSetup& setup,
                                       std::pair<double, double> l_bracket) {
  const ConvolutionOperator conv = setup.make_operator();
  return bisect_threshold(
      l_bracket,
      [&](double L) { return steady_positive_at(c, L, setup, conv); },
      "steady-state bisection");
}

SteadyState steady_state_adaptive(double c, const GrowthModel& growth,
                                  const ConvolutionOperator& conv,
                                  const EvolveSettings& base_settings,
                                  const Grid& grid) {
  EvolveSettings settings = base_settings;
  for (int attempt = 0;; ++attempt) {
    SteadyState state = steady_state_from_above(c, conv, growth, settings, grid);
    if (state.reason != Termination::TMaxReached || attempt == 2 ||
        decrements_geometric(state.probe_sup)) {
      return state;
    }
    settings.t_max *= 4.0;
  }
}

WaveTailReport wave_tail_audit(const Field& phi, double c,
                               const GrowthModel& growth, const Kernel& kernel,
                               const ConvolutionOperator& conv) {
  (void)conv;
  WaveTailReport report;
  const CharacteristicRoots roots = characteristic_roots(c, growth.q, kernel, 0.0);
  const Grid& grid = phi.grid;
  const double edge = growth.patch_edge();
  const double margin = grid.x_max - edge;
  const SlopeFit right =
      fit_log_slope(phi, edge + 5.0, grid.x_max - 0.5 * margin);
  const SlopeFit left =
      fit_log_slope(phi, -grid.x_max + 0.5 * margin, -(edge + 5.0));
  report.right_slope = right.slope;
  report.left_slope = left.slope;
  report.right_bound = roots.mu_minus + 0.05 * std::abs(roots.mu_minus);
  report.left_bound = roots.mu_plus - 0.05 * roots.mu_plus;
  const bool slopes_ok = right.points >= 10 && left.points >= 10 &&
                         report.right_slope <= report.right_bound &&
                         report.left_slope >= report.left_bound;

  // Domination by the explicit super-solutions on (R, R + tau).
  const double M = phi.max();
  const double R = edge + 1.0;
  report.supersolution_ok = true;
  for (double tau : {5.0, 10.0, 20.0}) {
    const TailSupersolution psi =
        tail_supersolution(M, R, tau, Side::Right, roots.mu_minus, roots.mu_plus);
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.x(i);
      if (x <= R || x >= R + tau) continue;
      const double gap = phi.values[static_cast<std::size_t>(i)] - psi(x);
      report.worst_supersolution_gap = std::max(report.worst_supersolution_gap, gap);
      if (gap > 1e-10) report.supersolution_ok = false;
    }
  }
  report.pass = slopes_ok && report.supersolution_ok;
  return report;
}

UniquenessReport uniqueness_audit(double c, double L, const ProblemSetup& setup) {
  const GrowthModel growth = setup.growth_for(L);
  const ConvolutionOperator conv = setup.make_operator();
  const Grid& grid = setup.grid;

  std::vector<Field> initials;
  initials.push_back(Field::constant(grid, 2.0));
  Field patch = Field::constant(grid, 0.0);
  Field bump = Field::constant(grid, 0.0);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    if (std::abs(x) <= L) {
      patch.values[static_cast<std::size_t>(i)] = 0.1;
      const double t = 0.5 * std::numbers::pi * x / L;
      bump.values[static_cast<std::size_t>(i)] = 0.5 * std::cos(t) * std::cos(t);
    }
  }
  initials.push_back(patch);
  initials.push_back(bump);

  UniquenessReport report;
  std::vector<Field> limits;
  for (const Field& u0 : initials) {
    const Trajectory traj = evolve(u0, c, conv, growth, setup.settings);
    limits.push_back(traj.snapshots.back());
    report.final_maxima.push_back(limits.back().max());
  }
  bool any_positive = false;
  bool any_trivial = false;
  for (double m : report.final_maxima) {
    (m > kPositiveLevel ? any_positive : any_trivial) = true;
  }
  report.mixed_outcomes = any_positive && any_trivial;
  for (std::size_t i = 0; i < limits.size(); ++i) {
    for (std::size_t j = i + 1; j < limits.size(); ++j) {
      report.max_gap = std::max(report.max_gap, max_abs_diff(limits[i], limits[j]));
    }
  }
  report.pass = !report.mixed_outcomes && report.max_gap < 1e-6;
  return report;
}

EquivalenceReport equivalence_audit(std::span<const double> c_values,
                                    std::span<const double> L_values,
                                    const ProblemSetup& setup) {
  EquivalenceReport report;
  report.cells = phase_sweep(c_values, L_values, setup);
  for (const PhaseCell& cell : report.cells) {
    if (std::abs(cell.lambda_cl) <= setup.band) continue;
    ++report.decided_cells;
    const bool lambda_positive = cell.lambda_cl > 0.0;
    const bool steady_positive = cell.steady_positive;
    if (lambda_positive == steady_positive) {
      ++report.agreements;
    } else {
      report.disagreements.push_back(
          "c=" + std::to_string(cell.c) + " L=" + std::to_string(cell.L) +
          " lambda=" + std::to_string(cell.lambda_cl) +
          " steady_max=" + std::to_string(cell.steady_max));
    }
  }
  return report;
}

int sweep_thread_count(std::optional<int> requested) {
  int threads = requested.value_or(0);
  if (threads <= 0) {
    if (const char* env = std::getenv("HABITAT_WAVES_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(1, threads);
}

Field random_smooth_field(const Grid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-0.7 * grid.x_max, 0.7 * grid.x_max);
  std::uniform_real_distribution<double> width(1.0, 4.0);
  std::uniform_real_distribution<double> height(0.1, 1.0);
  Field f = Field::constant(grid, 0.0);
  for (int b = 0; b < 3; ++b) {
    const double x0 = center(rng);
    const double w = width(rng);
    const double a = amplitude * height(rng);
    for (int i = 0; i < grid.n; ++i) {
      const double t = (grid.x(i) - x0) / w;
      f.values[static_cast<std::size_t>(i)] += a * std::exp(-0.5 * t * t);
    }
  }
  return f;
}

ComparisonCampaignResult comparison_campaign(const ProblemSetup& setup, double c,
                                             double L, int pairs,
                                             std::uint64_t seed, double t_max) {
  const GrowthModel growth = setup.growth_for(L);
  const ConvolutionOperator conv = setup.make_operator();
  EvolveSettings settings = setup.settings;
  settings.t_max = t_max;
  ComparisonCampaignResult out;
  out.pairs = pairs;
  for (int k = 0; k < pairs; ++k) {
    const Field lower =
        random_smooth_field(setup.grid, seed + 2 * static_cast<std::uint64_t>(k), 0.8);
    Field upper = random_smooth_field(
        setup.grid, seed + 2 * static_cast<std::uint64_t>(k) + 1, 0.6);
    for (std::size_t i = 0; i < upper.size(); ++i) {
      upper.values[i] += lower.values[i];
    }
    const ComparisonReport report =
        comparison_audit(lower, upper, c, conv, growth, settings);
    out.worst_violation = std::max(out.worst_violation, report.max_violation);
  }
  out.pass = out.worst_violation < 1e-8;
  return out;
}

std::vector<PhaseCell> phase_sweep(std::span<const double> c_values,
                                   std::span<const double> L_values,
                                   const ProblemSetup& setup,
                                   std::optional<int> max_threads) {
  if (c_values.empty() || L_values.empty()) {
    throw std::invalid_argument("phase_sweep: value lists must be non-empty");
  }
  const std::size_t total = c_values.size() * L_values.size();
  std::vector<PhaseCell> cells(total);
  const int threads = std::min<int>(sweep_thread_count(max_threads),
                                    static_cast<int>(total));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) break;
      const std::size_t ci = idx / L_values.size();
      const std::size_t li = idx % L_values.size();
      cells[idx] = classify(c_values[ci], L_values[li], setup);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return cells;
}

}  // namespace habitat
