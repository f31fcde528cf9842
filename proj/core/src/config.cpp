#include "habitat/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace habitat {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "invalid configuration (" << issues.size() << " issue"
      << (issues.size() == 1 ? "" : "s") << "):";
  for (const auto& issue : issues) out << "\n  - " << issue;
  return out.str();
}

void validate(const RunConfig& cfg, std::vector<std::string>& issues) {
  if (cfg.kernel.type != "gaussian" && cfg.kernel.type != "bump") {
    issues.push_back("kernel.type must be \"gaussian\" or \"bump\"");
  }
  if (cfg.kernel.type == "gaussian" && !(cfg.kernel.sigma > 0.0)) {
    issues.push_back("kernel.sigma must be positive");
  }
  if (cfg.kernel.type == "bump" && !(cfg.kernel.radius > 0.0)) {
    issues.push_back("kernel.radius must be positive");
  }
  if (!(cfg.growth.r > 0.0)) issues.push_back("growth.r must be positive");
  if (!(cfg.growth.q > 0.0)) issues.push_back("growth.q must be positive");
  if (!(cfg.growth.L > 0.0)) issues.push_back("growth.L must be positive");
  if (!(cfg.growth.L0 > 0.0)) issues.push_back("growth.L0 must be positive");
  if (cfg.growth.transition != "cosine" && cfg.growth.transition != "homogeneous") {
    issues.push_back("growth.transition must be \"cosine\" or \"homogeneous\"");
  }
  if (cfg.c < 0.0) {
    issues.push_back(
        "c must be nonnegative: a habitat moving left (c < 0) maps to an "
        "equivalent problem with c > 0 under xi -> -xi, so reflect the input "
        "instead of passing a negative speed");
  }
  if (!(cfg.grid.x_max > 0.0)) issues.push_back("grid.x_max must be positive");
  if (cfg.grid.n < 16) issues.push_back("grid.n must be at least 16");
  if (!(cfg.time.t_max > 0.0)) issues.push_back("time.t_max must be positive");
  if (!(cfg.time.steady_tol > 0.0)) issues.push_back("time.steady_tol must be positive");
  if (cfg.time.record_stride < 1) issues.push_back("time.record_stride must be >= 1");
  if (!(cfg.spectral.band > 0.0)) issues.push_back("spectral.band must be positive");
  if (cfg.spectral.method != "operator" && cfg.spectral.method != "growthrate" &&
      cfg.spectral.method != "both") {
    issues.push_back("spectral.method must be \"operator\", \"growthrate\" or \"both\"");
  }
  for (double cv : cfg.sweep.c_values) {
    if (cv < 0.0) {
      issues.push_back("sweep.c_values must be nonnegative (reflect negative speeds)");
      break;
    }
  }
  for (double lv : cfg.sweep.L_values) {
    if (!(lv > 0.0)) {
      issues.push_back("sweep.L_values must be positive");
      break;
    }
  }

  // Cross-field invariants need well-formed scalars first.
  if (issues.empty()) {
    try {
      const Kernel kernel = cfg.make_kernel();
      const Grid grid = cfg.make_grid();
      double max_edge = cfg.growth.L + cfg.growth.L0;
      for (double lv : cfg.sweep.L_values) {
        max_edge = std::max(max_edge, lv + cfg.growth.L0);
      }
      for (const auto& issue : grid.check(kernel, max_edge)) {
        issues.push_back(issue);
      }
      if (cfg.time.dt > 0.0) {
        double max_c = cfg.c;
        for (double cv : cfg.sweep.c_values) max_c = std::max(max_c, cv);
        const double bound =
            EvolveSettings::cfl_bound(grid, max_c, cfg.make_growth());
        if (cfg.time.dt > bound) {
          issues.push_back("time.dt=" + std::to_string(cfg.time.dt) +
                           " violates the CFL bound " + std::to_string(bound));
        }
      }
    } catch (const std::exception& exc) {
      issues.push_back(exc.what());
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw ConfigError({"cannot open config file: " + path});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& exc) {
    throw ConfigError({std::string("invalid JSON: ") + exc.what()});
  }
  RunConfig cfg;
  std::vector<std::string> issues;
  try {
    if (root.contains("kernel")) {
      const json& k = root.at("kernel");
      cfg.kernel.type = k.value("type", cfg.kernel.type);
      cfg.kernel.sigma = k.value("sigma", cfg.kernel.sigma);
      cfg.kernel.radius = k.value("radius", cfg.kernel.radius);
    }
    if (root.contains("growth")) {
      const json& g = root.at("growth");
      cfg.growth.r = g.value("r", cfg.growth.r);
      cfg.growth.q = g.value("q", cfg.growth.q);
      cfg.growth.L = g.value("L", cfg.growth.L);
      cfg.growth.L0 = g.value("L0", cfg.growth.L0);
      cfg.growth.transition = g.value("transition", cfg.growth.transition);
    }
    cfg.c = root.value("c", cfg.c);
    if (root.contains("grid")) {
      const json& g = root.at("grid");
      cfg.grid.x_max = g.value("x_max", cfg.grid.x_max);
      cfg.grid.n = g.value("n", cfg.grid.n);
    }
    if (root.contains("time")) {
      const json& t = root.at("time");
      cfg.time.dt = t.value("dt", cfg.time.dt);
      cfg.time.t_max = t.value("t_max", cfg.time.t_max);
      cfg.time.steady_tol = t.value("steady_tol", cfg.time.steady_tol);
      cfg.time.record_stride = t.value("record_stride", cfg.time.record_stride);
    }
    if (root.contains("spectral")) {
      const json& s = root.at("spectral");
      cfg.spectral.band = s.value("band", cfg.spectral.band);
      cfg.spectral.method = s.value("method", cfg.spectral.method);
    }
    if (root.contains("sweep")) {
      const json& s = root.at("sweep");
      cfg.sweep.c_values = s.value("c_values", cfg.sweep.c_values);
      cfg.sweep.L_values = s.value("L_values", cfg.sweep.L_values);
    }
    cfg.seed = root.value("seed", cfg.seed);
    cfg.output_dir = root.value("output_dir", cfg.output_dir);
  } catch (const json::exception& exc) {
    throw ConfigError({std::string("malformed config field: ") + exc.what()});
  }
  validate(cfg, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

std::string RunConfig::canonical_json() const {
  json root;
  root["kernel"]["type"] = kernel.type;
  if (kernel.type == "gaussian") {
    root["kernel"]["sigma"] = kernel.sigma;
  } else {
    root["kernel"]["radius"] = kernel.radius;
  }
  root["growth"] = {{"r", growth.r},
                    {"q", growth.q},
                    {"L", growth.L},
                    {"L0", growth.L0},
                    {"transition", growth.transition}};
  root["c"] = c;
  root["grid"] = {{"x_max", grid.x_max}, {"n", grid.n}};
  root["time"] = {{"dt", time.dt},
                  {"t_max", time.t_max},
                  {"steady_tol", time.steady_tol},
                  {"record_stride", time.record_stride}};
  root["spectral"] = {{"band", spectral.band}, {"method", spectral.method}};
  if (!sweep.c_values.empty() || !sweep.L_values.empty()) {
    root["sweep"] = {{"c_values", sweep.c_values}, {"L_values", sweep.L_values}};
  }
  root["seed"] = seed;
  root["output_dir"] = output_dir;
  return root.dump(2);
}

Kernel RunConfig::make_kernel() const {
  if (kernel.type == "gaussian") return Kernel::gaussian(kernel.sigma);
  return Kernel::compact_bump(kernel.radius);
}

GrowthModel RunConfig::make_growth() const {
  GrowthModel g;
  g.r = growth.r;
  g.q = growth.q;
  g.L = growth.L;
  g.L0 = growth.L0;
  g.transition = growth.transition == "homogeneous" ? Transition::Homogeneous
                                                    : Transition::CosineSine;
  return g;
}

Grid RunConfig::make_grid() const {
  return Grid::make(grid.x_max, grid.n);
}

EvolveSettings RunConfig::make_settings() const {
  EvolveSettings s;
  s.dt = time.dt;
  s.t_max = time.t_max;
  s.steady_tol = time.steady_tol;
  s.record_stride = time.record_stride;
  return s;
}

ProblemSetup RunConfig::make_setup() const {
  ProblemSetup setup;
  setup.kernel = make_kernel();
  setup.r = growth.r;
  setup.q = growth.q;
  setup.L0 = growth.L0;
  setup.grid = make_grid();
  setup.settings = make_settings();
  setup.band = spectral.band;
  setup.method = spectral.method == "operator"
                     ? EigenMethod::OperatorEig
                     : (spectral.method == "growthrate" ? EigenMethod::GrowthRate
                                                        : EigenMethod::Both);
  return setup;
}

}  // namespace habitat
