#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

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

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace habitat;

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAudit = 3;

struct RunContext {
  RunConfig cfg;
  std::string out_dir;
  bool svg = false;
  RunManifest manifest;
};

std::map<std::string, double> tolerance_table(const RunConfig& cfg) {
  return {
      {"steady_tol", cfg.time.steady_tol},
      {"indeterminate_band", cfg.spectral.band},
      {"root_residual", 1e-12},
      {"rayleigh_quotient", 1e-12},
      {"rho_inner_power", 1e-12},
      {"alpha_bisection", 1e-10},
      {"mu_golden_section", 1e-10},
      {"L_bisection", 1e-3},
      {"extinction_level", 1e-8},
      {"positive_level", 1e-6},
      {"ordering_violation", 1e-8},
  };
}

void emit(const RunContext& ctx, const std::string& name, const json& payload) {
  const std::string text = payload.dump(2) + "\n";
  std::cout << text;
  write_text_atomic((fs::path(ctx.out_dir) / name).string(), text);
}

json roots_json(const CharacteristicRoots& roots) {
  return {{"lambda", roots.lambda},
          {"mu_minus", roots.mu_minus},
          {"mu_plus", roots.mu_plus},
          {"residuals", {roots.residuals[0], roots.residuals[1]}}};
}

int run_speed(RunContext& ctx) {
  const SpreadingSpeed speed =
      spreading_speed(ctx.cfg.make_kernel(), ctx.cfg.growth.r);
  emit(ctx, "speed.json", {{"c_star", speed.c_star}, {"mu_star", speed.mu_star}});
  return kExitOk;
}

int run_roots(RunContext& ctx, double lambda) {
  const CharacteristicRoots roots = characteristic_roots(
      ctx.cfg.c, ctx.cfg.growth.q, ctx.cfg.make_kernel(), lambda);
  emit(ctx, "roots.json", roots_json(roots));
  return kExitOk;
}

int run_eigen(RunContext& ctx, bool periodic, double p, int doublings) {
  const Kernel kernel = ctx.cfg.make_kernel();
  const GrowthModel growth = ctx.cfg.make_growth();
  if (periodic) {
    const Grid grid = ctx.cfg.make_grid();
    const PeriodizationResult result = periodization_limit(
        ctx.cfg.c, growth, kernel, p, doublings, grid.dx);
    json payload = {{"lambda_p_sequence", result.lambda_sequence},
                    {"p_values", result.p_values},
                    {"limit", result.limit},
                    {"monotone_ok", result.monotone_ok}};
    emit(ctx, "eigen_periodic.json", payload);
    return kExitOk;
  }
  const Grid grid = ctx.cfg.make_grid();
  const ConvolutionOperator conv = ConvolutionOperator::build(kernel, grid.dx, grid.n);
  const SpectralReport report =
      principal_eigenvalue_operator(ctx.cfg.c, growth, grid, conv);
  double method_gap = 0.0;
  if (ctx.cfg.spectral.method != "operator") {
    const double gap_guess = std::clamp(
        std::min(report.lambda_cl + ctx.cfg.growth.q, report.gap_estimate), 0.1,
        5.0);
    const GrowthRateResult gr =
        principal_eigenvalue_growthrate(ctx.cfg.c, growth, grid, conv, gap_guess);
    method_gap = std::abs(gr.lambda - report.lambda_cl);
  }
  json payload = {{"lambda", report.lambda_cl},
                  {"method_gap", method_gap},
                  {"converged", report.converged},
                  {"iterations", report.iterations},
                  {"eigen_residual", report.eigen_residual}};
  if (report.lambda_cl > -ctx.cfg.growth.q) {
    const CharacteristicRoots roots = characteristic_roots(
        ctx.cfg.c, ctx.cfg.growth.q, kernel, report.lambda_cl);
    payload["mu_minus"] = roots.mu_minus;
    payload["mu_plus"] = roots.mu_plus;
    payload["tail_slopes"] = {report.tail_exponents[0], report.tail_exponents[1]};
  }
  write_profile_csv((fs::path(ctx.out_dir) / "eigenfunction.csv").string(),
                    report.eigenfunction);
  if (ctx.svg) {
    const SvgSeries series{"eigenfunction", &report.eigenfunction};
    write_profile_svg((fs::path(ctx.out_dir) / "eigenfunction.svg").string(),
                      "principal eigenfunction", {series}, false);
    std::vector<SvgRefLine> lines;
    if (payload.contains("mu_minus")) {
      const double edge = growth.patch_edge();
      lines.push_back({"mu_- slope", payload["mu_minus"].get<double>(),
                       std::log(report.eigenfunction.interpolate(edge + 5.0)) -
                           payload["mu_minus"].get<double>() * (edge + 5.0),
                       edge + 5.0, grid.x_max - 5.0});
      lines.push_back({"mu_+ slope", payload["mu_plus"].get<double>(),
                       std::log(report.eigenfunction.interpolate(-edge - 5.0)) -
                           payload["mu_plus"].get<double>() * (-edge - 5.0),
                       -grid.x_max + 5.0, -edge - 5.0});
    }
    const SvgSeries log_series{"eigenfunction", &report.eigenfunction};
    write_profile_svg((fs::path(ctx.out_dir) / "eigenfunction_log.svg").string(),
                      "principal eigenfunction (log scale)", {log_series}, true,
                      lines);
  }
  emit(ctx, "eigen.json", payload);
  return report.converged ? kExitOk : kExitNumerical;
}

int run_wave(RunContext& ctx) {
  const Kernel kernel = ctx.cfg.make_kernel();
  const GrowthModel growth = ctx.cfg.make_growth();
  const Grid grid = ctx.cfg.make_grid();
  const ConvolutionOperator conv = ConvolutionOperator::build(kernel, grid.dx, grid.n);
  const SteadyState steady = steady_state_from_above(
      ctx.cfg.c, conv, growth, ctx.cfg.make_settings(), grid);
  json payload = {{"positive", steady.positive},
                  {"final_max", steady.final_max},
                  {"extrapolated_max", steady.extrapolated_max},
                  {"patch_min", steady.patch_min},
                  {"residual", steady.residual},
                  {"monotone_ok", steady.monotone_ok}};
  write_profile_csv((fs::path(ctx.out_dir) / "wave_profile.csv").string(),
                    steady.profile);
  if (steady.positive) {
    const WaveTailReport tails =
        wave_tail_audit(steady.profile, ctx.cfg.c, growth, kernel, conv);
    payload["tail_audit"] = {{"pass", tails.pass},
                             {"right_slope", tails.right_slope},
                             {"left_slope", tails.left_slope},
                             {"right_bound", tails.right_bound},
                             {"left_bound", tails.left_bound},
                             {"supersolution_ok", tails.supersolution_ok}};
    if (ctx.svg) {
      const SvgSeries series{"steady profile", &steady.profile};
      write_profile_svg((fs::path(ctx.out_dir) / "wave_profile.svg").string(),
                        "traveling-wave profile", {series}, false);
      std::vector<SvgRefLine> lines;
      const double edge = growth.patch_edge();
      lines.push_back({"mu_-(0) slope", tails.right_bound,
                       std::log(std::max(steady.profile.interpolate(edge + 5.0), 1e-300)) -
                           tails.right_bound * (edge + 5.0),
                       edge + 5.0, grid.x_max - 5.0});
      write_profile_svg((fs::path(ctx.out_dir) / "wave_profile_log.svg").string(),
                        "traveling-wave profile (log scale)", {series}, true, lines);
    }
  }
  emit(ctx, "wave.json", payload);
  return kExitOk;
}

int run_simulate(RunContext& ctx, bool fixed_frame, double initial_level,
                 const std::string& initial_csv) {
  const Kernel kernel = ctx.cfg.make_kernel();
  const GrowthModel growth = ctx.cfg.make_growth();
  const Grid grid = ctx.cfg.make_grid();
  const ConvolutionOperator conv = ConvolutionOperator::build(kernel, grid.dx, grid.n);
  Field initial = Field::constant(grid, initial_level,
                                  fixed_frame ? Frame::Fixed : Frame::Moving);
  if (!initial_csv.empty()) {
    Field loaded = read_profile_csv(initial_csv);
    if (loaded.grid.n != grid.n) {
      throw ConfigError({"initial profile length does not match grid.n"});
    }
    initial.values = loaded.values;
  }
  const EvolveSettings settings = ctx.cfg.make_settings();
  const Trajectory traj =
      fixed_frame ? simulate_fixed_frame(initial, ctx.cfg.c, conv, growth, settings)
                  : evolve(initial, ctx.cfg.c, conv, growth, settings);
  const std::string traj_dir = (fs::path(ctx.out_dir) / "trajectory").string();
  write_trajectory(traj_dir, traj);
  const char* reason = traj.reason == Termination::SteadyReached ? "SteadyReached"
                       : traj.reason == Termination::Extinct     ? "Extinct"
                                                                 : "TMaxReached";
  emit(ctx, "simulate.json",
       {{"termination", reason},
        {"snapshots", traj.snapshots.size()},
        {"final_time", traj.snapshots.back().time},
        {"final_max", traj.snapshots.back().max()},
        {"trajectory_dir", traj_dir}});
  return kExitOk;
}

int run_lstar(RunContext& ctx, const std::string& bracket_text) {
  double lo = 0.5, hi = 8.0;
  if (!bracket_text.empty()) {
    const auto comma = bracket_text.find(',');
    if (comma == std::string::npos) {
      throw ConfigError({"--bracket expects \"lo,hi\""});
    }
    lo = std::stod(bracket_text.substr(0, comma));
    hi = std::stod(bracket_text.substr(comma + 1));
  }
  const ThresholdResult result =
      critical_patch_size(ctx.cfg.c, ctx.cfg.make_setup(), {lo, hi});
  json payload = {{"c", ctx.cfg.c},
                  {"found", result.found},
                  {"L_crossing", result.L_crossing},
                  {"bracket", {result.bracket.first, result.bracket.second}},
                  {"evaluations", result.evaluations}};
  if (!result.note.empty()) payload["note"] = result.note;
  emit(ctx, "lstar.json", payload);
  return kExitOk;
}

int run_classify(RunContext& ctx) {
  const PhaseCell cell =
      classify(ctx.cfg.c, ctx.cfg.growth.L, ctx.cfg.make_setup());
  json payload = {{"c", cell.c},
                  {"L", cell.L},
                  {"lambda", cell.lambda_cl},
                  {"classification", to_string(cell.classification)},
                  {"steady_max", cell.steady_max},
                  {"method_gap", cell.method_gap}};
  if (!cell.error.empty()) payload["error"] = cell.error;
  emit(ctx, "classify.json", payload);
  return cell.error.find("did not converge") != std::string::npos ? kExitNumerical
                                                                  : kExitOk;
}

int run_sweep(RunContext& ctx) {
  if (ctx.cfg.sweep.c_values.empty() || ctx.cfg.sweep.L_values.empty()) {
    throw ConfigError({"sweep requires sweep.c_values and sweep.L_values"});
  }
  const std::vector<PhaseCell> cells =
      phase_sweep(ctx.cfg.sweep.c_values, ctx.cfg.sweep.L_values,
                  ctx.cfg.make_setup());
  write_text_atomic((fs::path(ctx.out_dir) / "sweep.csv").string(),
                    sweep_csv(cells));
  ctx.manifest.cells = cells;
  if (ctx.svg) {
    write_phase_svg((fs::path(ctx.out_dir) / "sweep.svg").string(), cells,
                    ctx.cfg.sweep.c_values, ctx.cfg.sweep.L_values);
  }
  int persist = 0, extinct = 0, indeterminate = 0;
  for (const PhaseCell& cell : cells) {
    switch (cell.classification) {
      case Classification::Persistence: ++persist; break;
      case Classification::Extinction: ++extinct; break;
      case Classification::Indeterminate: ++indeterminate; break;
    }
  }
  emit(ctx, "sweep_summary.json",
       {{"cells", cells.size()},
        {"persistence", persist},
        {"extinction", extinct},
        {"indeterminate", indeterminate},
        {"csv", (fs::path(ctx.out_dir) / "sweep.csv").string()}});
  return kExitOk;
}

int run_audit(RunContext& ctx, const std::string& kind) {
  const ProblemSetup setup = ctx.cfg.make_setup();
  json payload;
  bool pass = false;
  if (kind == "comparison") {
    const ComparisonCampaignResult result = comparison_campaign(
        setup, ctx.cfg.c, ctx.cfg.growth.L, 100, ctx.cfg.seed, 10.0);
    pass = result.pass;
    payload = {{"kind", kind},
               {"pairs", result.pairs},
               {"worst_violation", result.worst_violation},
               {"pass", result.pass}};
  } else if (kind == "uniqueness") {
    const UniquenessReport result =
        uniqueness_audit(ctx.cfg.c, ctx.cfg.growth.L, setup);
    pass = result.pass;
    payload = {{"kind", kind},
               {"max_gap", result.max_gap},
               {"mixed_outcomes", result.mixed_outcomes},
               {"final_maxima", result.final_maxima},
               {"pass", result.pass}};
  } else if (kind == "equivalence") {
    if (ctx.cfg.sweep.c_values.empty() || ctx.cfg.sweep.L_values.empty()) {
      throw ConfigError({"equivalence audit requires sweep.c_values and sweep.L_values"});
    }
    const EquivalenceReport result = equivalence_audit(
        ctx.cfg.sweep.c_values, ctx.cfg.sweep.L_values, setup);
    pass = result.disagreements.empty();
    payload = {{"kind", kind},
               {"decided_cells", result.decided_cells},
               {"agreements", result.agreements},
               {"disagreements", result.disagreements},
               {"pass", pass}};
    ctx.manifest.cells = result.cells;
  } else {
    throw ConfigError({"--kind must be comparison, uniqueness or equivalence"});
  }
  emit(ctx, "audit_" + kind + ".json", payload);
  return pass ? kExitOk : kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistence, spreading speeds and traveling waves for nonlocal "
               "dispersal in a moving habitat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::string out_override;
  bool svg = false;
  std::optional<std::uint64_t> seed_override;
  app.add_option("--config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_flag("--svg", svg, "emit SVG plots where supported");
  app.add_option("--seed", seed_override, "seed override for randomized audits");

  auto* cmd_speed = app.add_subcommand("speed", "spreading speed c* and minimizer mu*");
  double lambda_arg = 0.0;
  auto* cmd_roots = app.add_subcommand("roots", "characteristic roots mu_-(lambda), mu_+(lambda)");
  cmd_roots->add_option("--lambda", lambda_arg, "spectral parameter (default 0)");
  bool periodic = false;
  double periodic_p = 0.0;
  int doublings = 3;
  auto* cmd_eigen = app.add_subcommand("eigen", "principal eigenvalue lambda(c, L)");
  cmd_eigen->add_flag("--periodic", periodic, "periodized lambda_p sequence");
  cmd_eigen->add_option("--p", periodic_p, "base period for --periodic");
  cmd_eigen->add_option("--doublings", doublings, "period doublings for --periodic");
  auto* cmd_wave = app.add_subcommand("wave", "steady state by monotone iteration + tail audit");
  bool fixed_frame = false;
  double initial_level = 1.0;
  std::string initial_csv;
  auto* cmd_sim = app.add_subcommand("simulate", "time integration (moving frame by default)");
  cmd_sim->add_flag("--fixed-frame", fixed_frame, "integrate the fixed-frame equation");
  cmd_sim->add_option("--initial", initial_level, "constant initial level (default 1)");
  cmd_sim->add_option("--initial-csv", initial_csv, "initial profile CSV (xi,value)");
  std::string bracket_text;
  auto* cmd_lstar = app.add_subcommand("lstar", "critical patch size by lambda bisection");
  cmd_lstar->add_option("--bracket", bracket_text, "L bracket \"lo,hi\" (default 0.5,8)");
  auto* cmd_sweep = app.add_subcommand("sweep", "phase diagram over sweep.c_values x sweep.L_values");
  auto* cmd_classify = app.add_subcommand("classify", "persistence/extinction for the configured (c, L)");
  std::string audit_kind;
  auto* cmd_audit = app.add_subcommand("audit", "property campaigns");
  cmd_audit->add_option("--kind", audit_kind, "comparison | uniqueness | equivalence")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  RunContext ctx;
  ctx.svg = svg;
  ctx.out_dir = out_override.empty() ? "out" : out_override;
  ctx.manifest.tool_version = kToolVersion;
  ctx.manifest.started_at = iso8601_now();
  int code = kExitOk;
  try {
    ctx.cfg = RunConfig::load(config_path);
    if (seed_override) ctx.cfg.seed = *seed_override;
    if (out_override.empty()) ctx.out_dir = ctx.cfg.output_dir;
    ctx.manifest.config_echo = ctx.cfg.canonical_json();
    ctx.manifest.config_hash = fnv1a64(ctx.manifest.config_echo);
    ctx.manifest.seed = ctx.cfg.seed;
    ctx.manifest.tolerances = tolerance_table(ctx.cfg);

    if (cmd_speed->parsed()) {
      code = run_speed(ctx);
    } else if (cmd_roots->parsed()) {
      code = run_roots(ctx, lambda_arg);
    } else if (cmd_eigen->parsed()) {
      if (periodic && !(periodic_p > 0.0)) {
        throw ConfigError({"eigen --periodic requires --p <period>"});
      }
      code = run_eigen(ctx, periodic, periodic_p, doublings);
    } else if (cmd_wave->parsed()) {
      code = run_wave(ctx);
    } else if (cmd_sim->parsed()) {
      code = run_simulate(ctx, fixed_frame, initial_level, initial_csv);
    } else if (cmd_lstar->parsed()) {
      code = run_lstar(ctx, bracket_text);
    } else if (cmd_sweep->parsed()) {
      code = run_sweep(ctx);
    } else if (cmd_classify->parsed()) {
      code = run_classify(ctx);
    } else if (cmd_audit->parsed()) {
      code = run_audit(ctx, audit_kind);
    }
    ctx.manifest.outcome = code == kExitOk ? "ok" : "exit " + std::to_string(code);
  } catch (const ConfigError& exc) {
    std::cerr << exc.what() << "\n";
    ctx.manifest.outcome = exc.what();
    code = kExitInput;
  } catch (const std::invalid_argument& exc) {
    std::cerr << "input error: " << exc.what() << "\n";
    ctx.manifest.outcome = exc.what();
    code = kExitInput;
  } catch (const std::exception& exc) {
    std::cerr << "numerical error: " << exc.what() << "\n";
    ctx.manifest.outcome = exc.what();
    code = kExitNumerical;
  }
  ctx.manifest.finished_at = iso8601_now();
  try {
    write_manifest((fs::path(ctx.out_dir) / "manifest.json").string(), ctx.manifest);
  } catch (const std::exception& exc) {
    std::cerr << "manifest write failed: " << exc.what() << "\n";
  }
  return code;
}
