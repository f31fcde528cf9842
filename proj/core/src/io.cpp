#include "habitat/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace habitat {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " +
                               target.parent_path().string() + ": " + ec.message());
    }
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << content;
    if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw std::runtime_error("cannot rename into " + path + ": " + ec.message());
}

std::string profile_csv(const Field& field) {
  std::ostringstream out;
  out << "xi,value\n";
  for (int i = 0; i < field.grid.n; ++i) {
    out << format_double(field.grid.x(i)) << ','
        << format_double(field.values[static_cast<std::size_t>(i)]) << '\n';
  }
  return out.str();
}

void write_profile_csv(const std::string& path, const Field& field) {
  write_text_atomic(path, profile_csv(field));
}

Field read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("xi,value", 0) != 0) {
    throw std::runtime_error("bad profile header in " + path);
  }
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("bad profile row in " + path);
    }
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw std::runtime_error("profile too short in " + path);
  Field field;
  field.grid = Grid::make(std::abs(xs.back()), static_cast<int>(xs.size()));
  field.values = std::move(vs);
  return field;
}

void write_trajectory(const std::string& dir, const Trajectory& trajectory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  json index;
  index["times"] = json::array();
  for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "profile_%04zu.csv", i);
    write_profile_csv((fs::path(dir) / name).string(), trajectory.snapshots[i]);
    index["times"].push_back(trajectory.snapshots[i].time);
  }
  switch (trajectory.reason) {
    case Termination::SteadyReached: index["termination"] = "SteadyReached"; break;
    case Termination::TMaxReached: index["termination"] = "TMaxReached"; break;
    case Termination::Extinct: index["termination"] = "Extinct"; break;
  }
  write_text_atomic((fs::path(dir) / "index.json").string(), index.dump(2) + "\n");
}

std::string sweep_csv(const std::vector<PhaseCell>& cells) {
  std::ostringstream out;
  out << "c,L,lambda,classification,steady_max,wall_time\n";
  for (const PhaseCell& cell : cells) {
    out << format_double(cell.c) << ',' << format_double(cell.L) << ','
        << format_double(cell.lambda_cl) << ',' << to_string(cell.classification)
        << ',' << format_double(cell.steady_max) << ",0\n";
  }
  return out.str();
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json_text() const {
  json root;
  try {
    root["config"] = json::parse(config_echo);
  } catch (const json::exception&) {
    root["config"] = config_echo;
  }
  char hash_buf[24];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  root["config_hash"] = hash_buf;
  root["seed"] = seed;
  root["tool_version"] = tool_version;
  root["started_at"] = started_at;
  root["finished_at"] = finished_at;
  root["outcome"] = outcome;
  root["tolerances"] = tolerances;
  if (!cells.empty()) {
    json arr = json::array();
    for (const PhaseCell& cell : cells) {
      json entry;
      entry["c"] = cell.c;
      entry["L"] = cell.L;
      entry["lambda"] = cell.lambda_cl;
      entry["classification"] = to_string(cell.classification);
      entry["steady_max"] = cell.steady_max;
      entry["steady_positive"] = cell.steady_positive;
      entry["wall_time_s"] = cell.wall_time;
      entry["method_gap"] = cell.method_gap;
      if (!cell.error.empty()) entry["error"] = cell.error;
      arr.push_back(entry);
    }
    root["cells"] = arr;
  }
  return root.dump(2) + "\n";
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  write_text_atomic(path, manifest.to_json_text());
}

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 560;
constexpr int kPad = 60;

struct Extent {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  double sx(double x) const {
    return kPad + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kPad);
  }
  double sy(double y) const {
    return kHeight - kPad - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kPad);
  }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

void svg_header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
}

void svg_axes(std::ostringstream& out, const Extent& e, const std::string& ylab) {
  out << "<line x1=\"" << kPad << "\" y1=\"" << kHeight - kPad << "\" x2=\""
      << kWidth - kPad << "\" y2=\"" << kHeight - kPad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
      << "\" y2=\"" << kHeight - kPad << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = e.x_lo + (e.x_hi - e.x_lo) * k / 4.0;
    const double y = e.y_lo + (e.y_hi - e.y_lo) * k / 4.0;
    out << "<text x=\"" << e.sx(x) << "\" y=\"" << kHeight - kPad + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << x << "</text>\n";
    out << "<text x=\"" << kPad - 8 << "\" y=\"" << e.sy(y) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << y << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">xi</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << ylab
      << "</text>\n";
}

}  // namespace

void write_profile_svg(const std::string& path, const std::string& title,
                       const std::vector<SvgSeries>& series, bool log_scale,
                       const std::vector<SvgRefLine>& ref_lines) {
  if (series.empty() || series.front().field == nullptr) {
    throw std::invalid_argument("write_profile_svg: no series");
  }
  Extent e;
  e.x_lo = -series.front().field->grid.x_max;
  e.x_hi = series.front().field->grid.x_max;
  e.y_lo = 1e300;
  e.y_hi = -1e300;
  auto transform = [&](double v) -> double {
    return log_scale ? std::log10(v) : v;
  };
  for (const auto& s : series) {
    for (double v : s.field->values) {
      if (log_scale && !(v > 0.0)) continue;
      e.y_lo = std::min(e.y_lo, transform(v));
      e.y_hi = std::max(e.y_hi, transform(v));
    }
  }
  if (log_scale) e.y_lo = std::max(e.y_lo, e.y_hi - 30.0);
  if (!(e.y_hi > e.y_lo)) {
    e.y_hi = e.y_lo + 1.0;
    e.y_lo -= 1.0;
  }
  std::ostringstream out;
  svg_header(out, title);
  svg_axes(out, e, log_scale ? "log10 value" : "value");
  int color = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[color % 5]
        << "\" stroke-width=\"1.5\" points=\"";
    const Field& f = *s.field;
    for (int i = 0; i < f.grid.n; ++i) {
      const double v = f.values[static_cast<std::size_t>(i)];
      if (log_scale && !(v > 0.0)) continue;
      const double y = transform(v);
      if (y < e.y_lo) continue;
      out << e.sx(f.grid.x(i)) << ',' << e.sy(y) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kPad - 4 << "\" y=\"" << kPad + 16 * (color + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << kPalette[color % 5] << "\">" << s.label << "</text>\n";
    ++color;
  }
  for (const auto& line : ref_lines) {
    // reference line in natural log; convert to log10 for plotting
    const double y0 = (line.intercept + line.slope * line.x_lo) / std::numbers::ln10;
    const double y1 = (line.intercept + line.slope * line.x_hi) / std::numbers::ln10;
    out << "<line x1=\"" << e.sx(line.x_lo) << "\" y1=\"" << e.sy(y0)
        << "\" x2=\"" << e.sx(line.x_hi) << "\" y2=\"" << e.sy(y1)
        << "\" stroke=\"" << kPalette[color % 5]
        << "\" stroke-dasharray=\"6 4\" stroke-width=\"1.2\"/>\n";
    out << "<text x=\"" << kWidth - kPad - 4 << "\" y=\"" << kPad + 16 * (color + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << kPalette[color % 5] << "\">" << line.label << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
  write_text_atomic(path, out.str());
}

void write_phase_svg(const std::string& path, const std::vector<PhaseCell>& cells,
                     const std::vector<double>& c_values,
                     const std::vector<double>& L_values) {
  if (cells.size() != c_values.size() * L_values.size()) {
    throw std::invalid_argument("write_phase_svg: cell count mismatch");
  }
  std::ostringstream out;
  svg_header(out, "persistence/extinction phase diagram");
  const double cw = static_cast<double>(kWidth - 2 * kPad) /
                    static_cast<double>(L_values.size());
  const double ch = static_cast<double>(kHeight - 2 * kPad) /
                    static_cast<double>(c_values.size());
  for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
    for (std::size_t li = 0; li < L_values.size(); ++li) {
      const PhaseCell& cell = cells[ci * L_values.size() + li];
      const char* fill = "#bbbbbb";
      if (cell.classification == Classification::Persistence) fill = "#2ca02c";
      if (cell.classification == Classification::Extinction) fill = "#d62728";
      const double x = kPad + cw * static_cast<double>(li);
      const double y = kHeight - kPad - ch * static_cast<double>(ci + 1);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw
          << "\" height=\"" << ch
          << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
    }
  }
  for (std::size_t li = 0; li < L_values.size(); ++li) {
    out << "<text x=\"" << kPad + cw * (static_cast<double>(li) + 0.5) << "\" y=\""
        << kHeight - kPad + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">L="
        << L_values[li] << "</text>\n";
  }
  for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
    out << "<text x=\"" << kPad - 8 << "\" y=\""
        << kHeight - kPad - ch * (static_cast<double>(ci) + 0.5) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">c="
        << c_values[ci] << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << "green: persistence, red: extinction, grey: indeterminate</text>\n";
  out << "</svg>\n";
  write_text_atomic(path, out.str());
}

}  // namespace habitat
