// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "egosocial/clustering.hpp"
#include "egosocial/ingest.hpp"
#include "egosocial/time.hpp"

namespace egosocial {

struct SegmentationParams {
  std::chrono::seconds min_event_duration{3 * 60};
  std::chrono::seconds max_gap{15 * 60};

  void validate() const;
};

/// A maximal same-person run within one day.
struct Interaction {
  std::string wearer_id;
  int person_cluster_id = 0;
  Date day;
  Timestamp start;
  Timestamp end;
  std::size_t observation_count = 0;

  double duration_minutes() const { return minutes_between(start, end); }
  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct Segmentation {
  std::vector<Interaction> interactions;  // ordered by (day, start, person)
  std::size_t sub_event_runs = 0;         // runs dropped for being shorter than the minimum
};

/// Splits each (cluster, day) timestamp sequence wherever consecutive frames are more
/// than `max_gap` apart and keeps runs spanning at least `min_event_duration`.
/// Discarded observations never contribute.
Segmentation segment(const Clustering& clustering, std::span<const FaceObservation> observations,
                     const SegmentationParams& params);

struct TimeInterval {
  Timestamp start;
  Timestamp end;
  double minutes() const { return minutes_between(start, end); }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Union of the interaction intervals of one wearer-day, overlaps coalesced, sorted.
std::vector<TimeInterval> daily_interaction_timeline(std::span<const Interaction> interactions,
                                                     const std::string& wearer_id, Date day);

void write_interactions(std::ostream& out, std::span<const Interaction> interactions);
/// Throws FormatError with the line number on bad records.
std::vector<Interaction> read_interactions(std::istream& in);

}  // namespace egosocial
