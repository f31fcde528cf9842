#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "habitat/analysis.hpp"
#include "habitat/field.hpp"
#include "habitat/frame_solver.hpp"
#include "habitat/growth.hpp"
#include "habitat/kernel.hpp"

namespace habitat {

/// Carries every violated field so a bad config fails once with the full list.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct KernelConfig {
  std::string type = "gaussian";
  double sigma = 1.0;
  double radius = 1.0;
};

struct GrowthConfig {
  double r = 1.0;
  double q = 1.0;
  double L = 5.0;
  double L0 = 1.0;
  std::string transition = "cosine";  // "cosine" | "homogeneous"
};

struct GridConfig {
  double x_max = 60.0;
  int n = 2048;
};

struct TimeConfig {
  double dt = 0.0;  // 0 = auto (0.9 of the CFL bound)
  double t_max = 400.0;
  double steady_tol = 1e-10;
  int record_stride = 50;
};

struct SpectralConfig {
  double band = 1e-4;
  std::string method = "both";  // "operator" | "growthrate" | "both"
};

struct SweepConfig {
  std::vector<double> c_values;
  std::vector<double> L_values;
};

struct RunConfig {
  KernelConfig kernel;
  GrowthConfig growth;
  double c = 0.0;
  GridConfig grid;
  TimeConfig time;
  SpectralConfig spectral;
  SweepConfig sweep;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  static RunConfig load(const std::string& path);
  static RunConfig from_json_text(const std::string& text);

  /// Stable-key serialization used for echoing and content hashing.
  std::string canonical_json() const;

  Kernel make_kernel() const;
  GrowthModel make_growth() const;
  Grid make_grid() const;
  EvolveSettings make_settings() const;
  ProblemSetup make_setup() const;
};

}  // namespace habitat
