// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosocial/evaluation.hpp"
#include "egosocial/ingest.hpp"

namespace egosocial {

using namespace std::chrono_literals;

/// Local wall-clock window of one recorded day.
struct DayWindow {
  std::chrono::seconds start = 8h;
  std::chrono::seconds end = 20h;
};

/// One scripted encounter; times are local seconds since midnight.
struct ScheduledInteraction {
  int identity = 0;
  int day = 0;  // 0-based offset from SynthConfig::start_date
  std::chrono::seconds start{0};
  std::chrono::seconds end{0};
};

/// Recipe for a random but reproducible schedule of non-conflicting encounters.
struct ScheduleRecipe {
  std::uint64_t seed = 7;
  int n_identities = 20;
  int n_days = 1;
  int events_per_day = 10;
  std::chrono::seconds min_length = 5min;
  std::chrono::seconds max_length = 20min;
  std::chrono::seconds min_pause = 20min;  // between consecutive non-overlapping events
  std::chrono::seconds max_pause = 50min;
  double overlap_probability = 0.2;  // next event starts inside the previous one
  DayWindow window;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::string wearer_id = "synthetic";
  Date start_date{std::chrono::year{2017}, std::chrono::March, std::chrono::day{6}};
  std::chrono::minutes utc_offset{60};
  int n_days = 1;
  int n_identities = 1;
  double identity_center_spread = 8.0;
  double within_person_noise = 0.02;
  std::chrono::milliseconds frame_interval_min = 20s;
  std::chrono::milliseconds frame_interval_max = 30s;
  double dropout_rate = 0.0;
  std::vector<DayWindow> coverage;  // one per day; empty means DayWindow{} every day
  std::vector<ScheduledInteraction> schedule;

  /// Throws std::invalid_argument for out-of-range fields and ValidationError for a
  /// scheduled event outside its day's coverage.
  void validate() const;
  DayWindow window(int day) const { return coverage.empty() ? DayWindow{} : coverage.at(static_cast<std::size_t>(day)); }
};

/// Scripted encounter plus the frames actually emitted for it.
struct RealizedInteraction {
  ScheduledInteraction script;
  std::optional<Timestamp> first_frame;
  std::optional<Timestamp> last_frame;
  std::size_t frames = 0;
};

struct SynthDataset {
  Dataset dataset;
  GroundTruth truth;
  std::vector<RealizedInteraction> schedule_truth;
  Eigen::MatrixXd centers;  // row i: unit-norm center of identity i
};

/// Draws one unit-norm center per identity as normalize(base + spread * u_i) with a
/// shared random base direction and random unit directions u_i, so larger spreads give
/// more separated identities. Each scheduled encounter emits frames from its start,
/// stepping by intervals drawn uniformly from [frame_interval_min, frame_interval_max]
/// until its end; each frame is kept with probability 1 - dropout_rate and carries
/// normalize(center + N(0, noise^2 I)). Deterministic per seed.
SynthDataset generate(const SynthConfig& config);

std::vector<ScheduledInteraction> make_schedule(const ScheduleRecipe& recipe);

nlohmann::ordered_json to_json(const SynthConfig& config);
/// Accepts every SynthConfig field; a "random_schedule" object expands through make_schedule.
SynthConfig synth_config_from_json(const nlohmann::json& j);

std::string format_clock(std::chrono::seconds since_midnight);
std::chrono::seconds parse_clock(const std::string& text);

}  // namespace egosocial
