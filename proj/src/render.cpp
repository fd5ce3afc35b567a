// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/render.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "egosocial/errors.hpp"

namespace egosocial {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr double kLegendHeight = 24.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> vertex(const RadarGeometry& g, std::size_t axis, double value) {
  const double theta = axis_angle_degrees(axis) * std::numbers::pi / 180.0;
  return {g.cx + g.radius * value * std::cos(theta), g.cy - g.radius * value * std::sin(theta)};
}

std::string polygon_points(const RadarGeometry& g, const AxisVector& values) {
  std::string pts;
  for (std::size_t a = 0; a < kAxisCount; ++a) {
    auto [x, y] = vertex(g, a, values[a]);
    if (a) pts += ' ';
    pts += num(x) + "," + num(y);
  }
  return pts;
}

std::vector<std::string> split_cells(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    std::size_t bar = line.find('|', pos);
    std::string_view cell = line.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
    const auto b = cell.find_first_not_of(' ');
    const auto e = cell.find_last_not_of(' ');
    cells.emplace_back(b == std::string_view::npos ? std::string_view{} : cell.substr(b, e - b + 1));
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }
  return cells;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw FormatError("bad number '" + text + "'");
  }
  if (used != text.size()) throw FormatError("bad number '" + text + "'");
  return v;
}

}  // namespace

RadarGeometry radar_geometry(const RadarSpec& spec, std::size_t panel) {
  const double plot_h = spec.height - kLegendHeight * 2.0;
  const double radius = 0.36 * std::min(spec.width, plot_h);
  return {spec.width * (static_cast<double>(panel) + 0.5), plot_h * 0.53, radius};
}

std::string render_radar(const RadarSpec& spec) {
  if (spec.series.empty()) throw std::invalid_argument("radar chart needs at least one series");
  for (const auto& s : spec.series)
    for (double v : s.values)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("radar values must lie in [0, 1]");

  const std::size_t panels = spec.overlay ? 1 : spec.series.size();
  const double total_w = spec.width * static_cast<double>(panels);
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(total_w) << "\" height=\"" << num(spec.height)
      << "\" viewBox=\"0 0 " << num(total_w) << ' ' << num(spec.height) << "\">\n";
  if (!spec.provenance.empty()) svg << "<!-- provenance " << xml_escape(spec.provenance) << " -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << num(total_w) << "\" height=\"" << num(spec.height)
      << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t p = 0; p < panels; ++p) {
    const RadarGeometry g = radar_geometry(spec, p);
    svg << "<g class=\"panel\" data-cx=\"" << num(g.cx) << "\" data-cy=\"" << num(g.cy) << "\" data-radius=\""
        << num(g.radius) << "\">\n";
    for (int ring = 1; ring <= 5; ++ring) {
      AxisVector level;
      level.fill(ring / 5.0);
      svg << "<polygon class=\"grid\" points=\"" << polygon_points(g, level)
          << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    }
    for (std::size_t a = 0; a < kAxisCount; ++a) {
      auto [x, y] = vertex(g, a, 1.0);
      svg << "<line class=\"spoke\" x1=\"" << num(g.cx) << "\" y1=\"" << num(g.cy) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(y) << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
      auto [lx, ly] = vertex(g, a, 1.12);
      const double c = std::cos(axis_angle_degrees(a) * std::numbers::pi / 180.0);
      const char* anchor = c > 0.1 ? "start" : (c < -0.1 ? "end" : "middle");
      svg << "<text class=\"axis-label\" x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"" << anchor
          << "\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(spec.axes[a]) << "</text>\n";
    }
    const std::size_t first = spec.overlay ? 0 : p;
    const std::size_t last = spec.overlay ? spec.series.size() : p + 1;
    for (std::size_t s = first; s < last; ++s) {
      const char* color = kPalette[s % kPalette.size()];
      svg << "<polygon class=\"series\" data-name=\"" << xml_escape(spec.series[s].name) << "\" points=\""
          << polygon_points(g, spec.series[s].values) << "\" fill=\"" << color
          << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    }
    svg << "</g>\n";
  }

  const double legend_y = spec.height - kLegendHeight * 1.5;
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const double x = 16.0 + 150.0 * static_cast<double>(s);
    const char* color = kPalette[s % kPalette.size()];
    svg << "<rect class=\"legend\" x=\"" << num(x) << "\" y=\"" << num(legend_y) << "\" width=\"12\" height=\"12\" fill=\""
        << color << "\"/>\n";
    svg << "<text class=\"legend\" x=\"" << num(x + 18.0) << "\" y=\"" << num(legend_y + 11.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(spec.series[s].name) << "</text>\n";
  }
  svg << "<text class=\"note\" x=\"16\" y=\"" << num(spec.height - 6.0)
      << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#666666\">" << xml_escape(spec.note) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

RadarSpec radar_spec(std::span<const SocialProfile> profiles, bool overlay) {
  RadarSpec spec;
  spec.overlay = overlay;
  for (const auto& p : profiles) spec.series.push_back({p.traits.wearer_id, p.axes});
  return spec;
}

std::string format_duration(double minutes) {
  if (!(minutes >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  const long total = std::lround(minutes);
  return std::to_string(total / 60) + "h " + std::to_string(total % 60) + "m";
}

double parse_duration(std::string_view text) {
  std::string s(text);
  long h = 0, m = 0;
  int used = 0;
  if (std::sscanf(s.c_str(), " %ldh %ld%n", &h, &m, &used) != 2 || h < 0 || m < 0 || m > 59)
    throw FormatError("bad duration '" + s + "', expected like '8h 23m'");
  std::string_view unit = text.substr(static_cast<std::size_t>(used));
  while (!unit.empty() && unit.back() == ' ') unit.remove_suffix(1);
  if (unit != "m" && unit != "min") throw FormatError("bad duration unit in '" + s + "'");
  return static_cast<double>(h * 60 + m);
}

std::string format_number(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string format_trait_cells(const SocialTraits& t) {
  return format_number(t.num_p_day) + " | " + format_number(t.inter_day) + " | " + format_number(t.t_inter) + " | " +
         format_number(t.t_p) + " | " + format_duration(t.t_alone);
}

std::string render_table(std::span<const SocialTraits> traits) {
  std::string out = "Wearer | Num p/day | Avg int/day | Avg t/int (min) | Avg t/p (min) | Avg t/alone\n";
  out += "-------+-----------+-------------+-----------------+---------------+------------\n";
  for (const auto& t : traits) out += t.wearer_id + " | " + format_trait_cells(t) + "\n";
  return out;
}

std::vector<SocialTraits> parse_table(std::string_view table) {
  std::vector<SocialTraits> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < table.size()) {
    std::size_t nl = table.find('\n', pos);
    std::string_view line = table.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? table.size() : nl + 1;
    if (++line_no <= 2 || line.find_first_not_of(' ') == std::string_view::npos || line.front() == '#') continue;
    auto cells = split_cells(line);
    if (cells.size() != 6) throw FormatError("table row needs 6 cells", line_no);
    try {
      SocialTraits t;
      t.wearer_id = cells[0];
      t.num_p_day = parse_number(cells[1]);
      t.inter_day = parse_number(cells[2]);
      t.t_inter = parse_number(cells[3]);
      t.t_p = parse_number(cells[4]);
      t.t_alone = parse_duration(cells[5]);
      t.no_interactions = t.inter_day == 0.0;
      out.push_back(std::move(t));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace egosocial
