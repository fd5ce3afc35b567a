// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egosocial/ingest.hpp"
#include "egosocial/segmentation.hpp"

namespace egosocial {

/// Per-wearer daily averages. Durations are in minutes.
struct SocialTraits {
  std::string wearer_id;
  double num_p_day = 0.0;  // distinct persons per day
  double inter_day = 0.0;  // interactions per day
  double t_inter = 0.0;    // minutes per interaction
  double t_p = 0.0;        // minutes per person, over days with company
  double t_alone = 0.0;    // minutes alone per day
  int days_analyzed = 0;
  bool no_interactions = false;  // t_inter and t_p are 0 by convention

  friend bool operator==(const SocialTraits&, const SocialTraits&) = default;
};

inline constexpr std::size_t kAxisCount = 5;
using AxisVector = std::array<double, kAxisCount>;

/// Radar axis order. The last axis is time alone inverted, so every axis reads
/// "larger = more social".
inline constexpr std::array<std::string_view, kAxisCount> kAxisLabels{"Num p/day", "Inter/day", "T/Inter", "T/P",
                                                                      "Sociality (T/A)"};

struct SocialProfile {
  SocialTraits traits;
  AxisVector axes{};
  std::string provenance;
  bool cohort_relative = true;
};

/// Traits of one wearer over every day in `coverage` that belongs to the wearer.
/// Per day d: P_d distinct persons, I_d interactions, M_d interaction minutes,
/// A_d = coverage minutes - merged interaction timeline minutes. Then
///   num_p_day = mean P_d, inter_day = mean I_d, t_inter = sum M_d / sum I_d,
///   t_p = mean over days with P_d > 0 of M_d / P_d, t_alone = mean A_d.
/// Throws ValidationError when an interaction has no coverage or falls outside it,
/// or when the wearer has no coverage at all.
SocialTraits compute_traits(std::span<const Interaction> interactions, std::span<const DayCoverage> coverage,
                            const std::string& wearer_id);

/// Raw trait values in axis order (t_alone not yet inverted).
AxisVector trait_vector(const SocialTraits& traits);

/// Cohort min-max normalization per axis; the time-alone axis is inverted. A cohort of
/// one, or an axis on which every wearer ties, maps to 0.5.
std::vector<SocialProfile> build_profiles(std::span<const SocialTraits> traits, const std::string& provenance);

nlohmann::ordered_json to_json(const SocialTraits& traits);
SocialTraits traits_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SocialProfile& profile);

}  // namespace egosocial
