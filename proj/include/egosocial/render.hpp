// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egosocial/social_profile.hpp"

namespace egosocial {

struct RadarSeries {
  std::string name;
  AxisVector values{};  // each in [0, 1]
};

struct RadarSpec {
  std::array<std::string, kAxisCount> axes{std::string(kAxisLabels[0]), std::string(kAxisLabels[1]),
                                           std::string(kAxisLabels[2]), std::string(kAxisLabels[3]),
                                           std::string(kAxisLabels[4])};
  std::vector<RadarSeries> series;
  bool overlay = true;  // false: one panel per series, side by side
  double width = 640.0;
  double height = 560.0;
  std::string provenance;  // emitted as a comment when set
  std::string note = "Axes use cohort min-max normalization; do not compare charts across cohorts.";
};

/// Panel geometry shared by the renderer and anything that reads charts back.
struct RadarGeometry {
  double cx;
  double cy;
  double radius;
};
RadarGeometry radar_geometry(const RadarSpec& spec, std::size_t panel = 0);

/// Angle of axis i in degrees, counter-clockwise from the positive x axis: 90 - 72 i.
inline double axis_angle_degrees(std::size_t axis) { return 90.0 - 72.0 * static_cast<double>(axis); }

/// Deterministic SVG: pentagon grid, one closed polygon per series, legend, note.
/// Throws std::invalid_argument when there is no series or a value is outside [0, 1].
std::string render_radar(const RadarSpec& spec);

RadarSpec radar_spec(std::span<const SocialProfile> profiles, bool overlay = true);

/// "8h 23m" for 503 minutes (rounded to the nearest minute).
std::string format_duration(double minutes);
/// Accepts "XhYm" with optional spaces and "min" for minutes. Throws FormatError.
double parse_duration(std::string_view text);
/// Up to two decimals with trailing zeros trimmed: 9 -> "9", 8.4286 -> "8.43".
std::string format_number(double value);

/// Trait cells of one table row: "9 | 12 | 12 | 12 | 8h 23m".
std::string format_trait_cells(const SocialTraits& traits);
/// Header, rule, then "<wearer> | <cells>" per wearer.
std::string render_table(std::span<const SocialTraits> traits);
/// Reads render_table output back. Throws FormatError.
std::vector<SocialTraits> parse_table(std::string_view table);

}  // namespace egosocial
