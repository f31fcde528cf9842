#include <doctest.h>

#include <cmath>

#include "habitat/analysis.hpp"
#include "habitat/io.hpp"
#include "habitat/spectral.hpp"

using namespace habitat;

namespace {

ProblemSetup small_setup() {
  ProblemSetup setup;
  setup.kernel = Kernel::gaussian(1.0);
  setup.r = 1.0;
  setup.q = 1.0;
  setup.L0 = 1.0;
  setup.grid = Grid::make(30.0, 512);
  setup.settings.t_max = 150.0;
  return setup;
}

}  // namespace

TEST_CASE("classify: persistent and extinct corners") {
  const ProblemSetup setup = small_setup();
  const double c_star = spreading_speed(setup.kernel, setup.r).c_star;

  const PhaseCell persistent = classify(0.0, 8.0, setup);
  CHECK(persistent.classification == Classification::Persistence);
  CHECK(persistent.lambda_cl > setup.band);
  CHECK(persistent.steady_max > 1e-6);
  CHECK(persistent.method_gap < 1e-3);
  CHECK(persistent.error.empty());

  const PhaseCell extinct = classify(1.1 * c_star, 3.0, setup);
  CHECK(extinct.classification == Classification::Extinction);
  CHECK(extinct.lambda_cl < -setup.band);
  CHECK(extinct.steady_max < 1e-6);

  const PhaseCell tiny_patch = classify(0.5 * c_star, 0.01, setup);
  CHECK(tiny_patch.lambda_cl <= setup.band);
  CHECK(tiny_patch.classification != Classification::Persistence);
}

TEST_CASE("critical patch size: bisection and bracket diagnostics") {
  const ProblemSetup setup = small_setup();
  const double c_star = spreading_speed(setup.kernel, setup.r).c_star;
  const double c = 0.5 * c_star;
  const ThresholdResult result = critical_patch_size(c, setup, {0.05, 6.0});
  REQUIRE(result.found);
  const ConvolutionOperator conv = setup.make_operator();
  const double below = principal_eigenvalue_operator(
                           c, setup.growth_for(result.L_crossing - 0.1),
                           setup.grid, conv)
                           .lambda_cl;
  const double above = principal_eigenvalue_operator(
                           c, setup.growth_for(result.L_crossing + 0.1),
                           setup.grid, conv)
                           .lambda_cl;
  CHECK(below <= 0.0);
  CHECK(above >= 0.0);

  // slower habitat tolerates a smaller patch
  const ThresholdResult slower = critical_patch_size(0.25 * c_star, setup, {0.05, 6.0});
  REQUIRE(slower.found);
  CHECK(slower.L_crossing <= result.L_crossing + 1e-3);

  const ThresholdResult too_fast = critical_patch_size(1.2 * c_star, setup, {0.05, 6.0});
  CHECK_FALSE(too_fast.found);
  CHECK(too_fast.note.find("no finite threshold") != std::string::npos);
}

TEST_CASE("wave tail audit on a persistent instance") {
  ProblemSetup setup = small_setup();
  setup.grid = Grid::make(40.0, 1024);
  setup.settings.t_max = 200.0;
  const double c = 0.5;
  const GrowthModel growth = setup.growth_for(6.0);
  const ConvolutionOperator conv = setup.make_operator();
  const SteadyState steady =
      steady_state_from_above(c, conv, growth, setup.settings, setup.grid);
  REQUIRE(steady.positive);
  const WaveTailReport report =
      wave_tail_audit(steady.profile, c, growth, setup.kernel, conv);
  CHECK(report.pass);
  CHECK(report.supersolution_ok);
  CHECK(report.right_slope <= report.right_bound);
  CHECK(report.left_slope >= report.left_bound);

  // stationary habitat: mirrored slopes within 5%
  const SteadyState symmetric =
      steady_state_from_above(0.0, conv, growth, setup.settings, setup.grid);
  REQUIRE(symmetric.positive);
  const WaveTailReport mirror =
      wave_tail_audit(symmetric.profile, 0.0, growth, setup.kernel, conv);
  CHECK(std::abs(mirror.right_slope + mirror.left_slope) <=
        0.05 * std::abs(mirror.right_slope));
}

TEST_CASE("uniqueness audit: distinct initial data share one limit") {
  ProblemSetup setup = small_setup();
  setup.settings.t_max = 250.0;
  const UniquenessReport report = uniqueness_audit(0.0, 8.0, setup);
  CHECK_FALSE(report.mixed_outcomes);
  CHECK(report.max_gap < 1e-6);
  CHECK(report.pass);
}

TEST_CASE("phase sweep: determinism and row monotonicity") {
  ProblemSetup setup = small_setup();
  setup.settings.t_max = 120.0;
  const double c_star = spreading_speed(setup.kernel, setup.r).c_star;
  const std::vector<double> cs{0.4 * c_star};
  const std::vector<double> Ls{0.3, 2.0, 8.0};
  const std::vector<PhaseCell> cells = phase_sweep(cs, Ls, setup);
  REQUIRE(cells.size() == 3);
  // once persistent, larger patches stay persistent
  bool seen_persistence = false;
  for (const PhaseCell& cell : cells) {
    if (cell.classification == Classification::Persistence) seen_persistence = true;
    if (seen_persistence) {
      CHECK(cell.classification == Classification::Persistence);
    }
  }
  CHECK(seen_persistence);

  const std::vector<PhaseCell> again = phase_sweep(cs, Ls, setup, 1);
  CHECK(sweep_csv(cells) == sweep_csv(again));

  CHECK_THROWS_AS(phase_sweep({}, Ls, setup), std::invalid_argument);
}

TEST_CASE("single-cell sweep equals classify") {
  ProblemSetup setup = small_setup();
  setup.settings.t_max = 120.0;
  const std::vector<double> cs{0.3};
  const std::vector<double> Ls{5.0};
  const std::vector<PhaseCell> cells = phase_sweep(cs, Ls, setup);
  const PhaseCell direct = classify(0.3, 5.0, setup);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].classification == direct.classification);
  CHECK(cells[0].lambda_cl == doctest::Approx(direct.lambda_cl).epsilon(1e-12));
}

TEST_CASE("equivalence audit: lambda sign matches steady-state positivity") {
  ProblemSetup setup = small_setup();
  setup.settings.t_max = 120.0;
  const double c_star = spreading_speed(setup.kernel, setup.r).c_star;
  const std::vector<double> cs{0.3 * c_star, 1.1 * c_star};
  const std::vector<double> Ls{2.0, 8.0};
  const EquivalenceReport report = equivalence_audit(cs, Ls, setup);
  CHECK(report.decided_cells > 0);
  CHECK(report.agreements == report.decided_cells);
  CHECK(report.disagreements.empty());
}

TEST_CASE("comparison campaign with seeded random pairs") {
  ProblemSetup setup = small_setup();
  const ComparisonCampaignResult result =
      comparison_campaign(setup, 0.4, 5.0, 10, 77, 5.0);
  CHECK(result.pairs == 10);
  CHECK(result.pass);
}
