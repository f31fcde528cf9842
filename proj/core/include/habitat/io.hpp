#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "habitat/analysis.hpp"
#include "habitat/field.hpp"
#include "habitat/frame_solver.hpp"

namespace habitat {

/// Shortest round-trippable decimal representation (17 significant digits).
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& text);

/// Writes via a temporary file and rename so readers never observe a partial
/// file.
void write_text_atomic(const std::string& path, const std::string& content);

std::string profile_csv(const Field& field);
void write_profile_csv(const std::string& path, const Field& field);
Field read_profile_csv(const std::string& path);

/// Writes profile_NNNN.csv per snapshot plus index.json {"times": [...]}.
void write_trajectory(const std::string& dir, const Trajectory& trajectory);

/// Deterministic sweep CSV. The wall_time column is zeroed so repeated runs
/// are byte-identical; measured timings live in the run manifest.
std::string sweep_csv(const std::vector<PhaseCell>& cells);

struct RunManifest {
  std::string config_echo;  // canonical config JSON
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::string outcome;  // "ok" or an error summary
  std::map<std::string, double> tolerances;
  std::vector<PhaseCell> cells;  // optional per-cell timings for sweeps

  std::string to_json_text() const;
};

std::string iso8601_now();
void write_manifest(const std::string& path, const RunManifest& manifest);

/// Minimal SVG line plot; one polyline per labelled series. With log_scale the
/// ordinate is log10 of the values (entries <= 0 are skipped) and optional
/// straight reference lines (slope, intercept in natural log) are overlaid.
struct SvgSeries {
  std::string label;
  const Field* field = nullptr;
};
struct SvgRefLine {
  std::string label;
  double slope = 0.0;      // d(ln y)/dx
  double intercept = 0.0;  // ln y at x = 0
  double x_lo = 0.0;
  double x_hi = 0.0;
};
void write_profile_svg(const std::string& path, const std::string& title,
                       const std::vector<SvgSeries>& series, bool log_scale,
                       const std::vector<SvgRefLine>& ref_lines = {});

void write_phase_svg(const std::string& path, const std::vector<PhaseCell>& cells,
                     const std::vector<double>& c_values,
                     const std::vector<double>& L_values);

}  // namespace habitat
