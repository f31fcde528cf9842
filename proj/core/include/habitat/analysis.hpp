#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "habitat/convolution.hpp"
#include "habitat/field.hpp"
#include "habitat/frame_solver.hpp"
#include "habitat/growth.hpp"
#include "habitat/kernel.hpp"
#include "habitat/spectral.hpp"

namespace habitat {

/// Everything a (c, L) classification needs apart from c and L themselves.
struct ProblemSetup {
  Kernel kernel;
  double r = 1.0;
  double q = 1.0;
  double L0 = 1.0;
  Grid grid;
  EvolveSettings settings;
  double band = 1e-4;          // indeterminate band around lambda = 0
  EigenMethod method = EigenMethod::Both;

  GrowthModel growth_for(double L) const;
  ConvolutionOperator make_operator() const;
};

enum class Classification { Persistence, Extinction, Indeterminate };

std::string to_string(Classification c);

struct PhaseCell {
  double c = 0.0;
  double L = 0.0;
  double lambda_cl = 0.0;
  Classification classification = Classification::Indeterminate;
  double steady_max = 0.0;
  bool steady_positive = false;
  double wall_time = 0.0;  // seconds; recorded in the manifest, zeroed in CSV
  double method_gap = 0.0;
  std::string error;
};

/// Sign-of-lambda classification with a steady-state confirmation run.
/// lambda comes from the operator method; the growth-rate method is a
/// cross-check (disagreement beyond 1e-2 is flagged in the cell error but the
/// operator value still classifies).
PhaseCell classify(double c, double L, const ProblemSetup& setup);

struct ThresholdResult {
  bool found = false;
  double L_crossing = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  std::string note;
  int evaluations = 0;
};

/// Critical patch size L** by bisection on the sign of lambda(c, L),
/// L-tolerance 1e-3. Defined for 0 < c < c_star; larger speeds report "no
/// finite threshold".
ThresholdResult critical_patch_size(double c, const ProblemSetup& setup,
                                    std::pair<double, double> l_bracket);

/// Patch-size threshold located by the steady-state route (positivity of the
/// monotone iteration limit) rather than the eigenvalue sign.
ThresholdResult steady_state_threshold(double c, const ProblemSetup& setup,
                                       std::pair<double, double> l_bracket);

/// Monotone iteration with an adaptive horizon. Near the threshold the decay
/// from u = M is algebraic (logistic crawl) long before it turns exponential,
/// which fools a geometric extrapolation; when the probe decrements do not yet
/// contract geometrically the run is extended (up to 16x t_max) before the
/// positivity call is made.
SteadyState steady_state_adaptive(double c, const GrowthModel& growth,
                                  const ConvolutionOperator& conv,
                                  const EvolveSettings& base_settings,
                                  const Grid& grid);

struct WaveTailReport {
  bool pass = false;
  double right_slope = 0.0;
  double left_slope = 0.0;
  double right_bound = 0.0;  // mu_-(0) + 5% |mu_-(0)|
  double left_bound = 0.0;   // mu_+(0) - 5% mu_+(0)
  bool supersolution_ok = false;  // Phi <= psi_tau^+ on the audit intervals
  double worst_supersolution_gap = 0.0;
};

/// Fits the steady profile's tail exponents against the one-sided mu_-+(0)
/// bounds and checks domination by the closed-form tail super-solutions for
/// tau in {5, 10, 20}.
WaveTailReport wave_tail_audit(const Field& phi, double c,
                               const GrowthModel& growth, const Kernel& kernel,
                               const ConvolutionOperator& conv);

struct UniquenessReport {
  double max_gap = 0.0;
  bool pass = false;
  bool mixed_outcomes = false;  // some runs Trivial while others Positive
  std::vector<double> final_maxima;
};

/// Runs the steady-state iteration from three distinct initial data (constant
/// 2, 0.1 on the patch, a half-height bump) and reports the largest pairwise
/// sup-norm gap between the limits.
UniquenessReport uniqueness_audit(double c, double L, const ProblemSetup& setup);

struct EquivalenceReport {
  std::vector<PhaseCell> cells;
  int decided_cells = 0;    // cells outside the indeterminate band
  int agreements = 0;       // lambda sign matches steady-state positivity
  std::vector<std::string> disagreements;
};

/// Per-cell comparison of the eigenvalue classification with steady-state
/// positivity over a (c, L) grid.
EquivalenceReport equivalence_audit(std::span<const double> c_values,
                                    std::span<const double> L_values,
                                    const ProblemSetup& setup);

/// Cartesian sweep; cells run concurrently (HABITAT_WAVES_THREADS caps the
/// worker count) and are returned in deterministic (c index, L index) order.
std::vector<PhaseCell> phase_sweep(std::span<const double> c_values,
                                   std::span<const double> L_values,
                                   const ProblemSetup& setup,
                                   std::optional<int> max_threads = {});

int sweep_thread_count(std::optional<int> requested);

struct ComparisonCampaignResult {
  int pairs = 0;
  double worst_violation = 0.0;
  bool pass = false;
};

/// Seeded property campaign: random smooth ordered pairs co-evolved for
/// t_max; ordering violations beyond 1e-8 fail the campaign.
ComparisonCampaignResult comparison_campaign(const ProblemSetup& setup, double c,
                                             double L, int pairs,
                                             std::uint64_t seed, double t_max);

/// Smooth nonnegative random field (sum of Gaussian bumps), used by the
/// randomized audits.
Field random_smooth_field(const Grid& grid, std::uint64_t seed, double amplitude);

}  // namespace habitat
