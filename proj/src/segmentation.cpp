// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/segmentation.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace egosocial {

void SegmentationParams::validate() const {
  if (min_event_duration.count() <= 0) throw std::invalid_argument("min_event_duration must be positive");
  if (max_gap.count() <= 0) throw std::invalid_argument("max_gap must be positive");
}

Segmentation segment(const Clustering& clustering, std::span<const FaceObservation> observations,
                     const SegmentationParams& params) {
  params.validate();
  if (clustering.size() != observations.size())
    throw std::invalid_argument("clustering does not match the observation count");

  std::map<std::pair<int, Date>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const int id = clustering.assignment[i];
    if (id == Clustering::kDiscarded) continue;
    groups[{id, observations[i].day}].push_back(i);
  }

  Segmentation out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return observations[a].timestamp < observations[b].timestamp;
    });
    auto close_run = [&](std::size_t first, std::size_t last, std::size_t count) {
      const auto& a = observations[members[first]];
      const auto& b = observations[members[last]];
      if (b.timestamp.utc - a.timestamp.utc >= params.min_event_duration) {
        out.interactions.push_back({a.wearer_id, key.first, key.second, a.timestamp, b.timestamp, count});
      } else {
        ++out.sub_event_runs;
      }
    };
    std::size_t run_start = 0;
    for (std::size_t i = 1; i < members.size(); ++i) {
      const auto gap = observations[members[i]].timestamp.utc - observations[members[i - 1]].timestamp.utc;
      if (gap > params.max_gap) {
        close_run(run_start, i - 1, i - run_start);
        run_start = i;
      }
    }
    if (!members.empty()) close_run(run_start, members.size() - 1, members.size() - run_start);
  }

  std::sort(out.interactions.begin(), out.interactions.end(), [](const Interaction& a, const Interaction& b) {
    return std::tie(a.wearer_id, a.day, a.start.utc, a.person_cluster_id) <
           std::tie(b.wearer_id, b.day, b.start.utc, b.person_cluster_id);
  });
  return out;
}

std::vector<TimeInterval> daily_interaction_timeline(std::span<const Interaction> interactions,
                                                     const std::string& wearer_id, Date day) {
  std::vector<TimeInterval> spans;
  for (const auto& it : interactions)
    if (it.wearer_id == wearer_id && it.day == day) spans.push_back({it.start, it.end});
  std::sort(spans.begin(), spans.end(), [](const TimeInterval& a, const TimeInterval& b) {
    return std::tie(a.start.utc, a.end.utc) < std::tie(b.start.utc, b.end.utc);
  });

  std::vector<TimeInterval> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.start.utc <= merged.back().end.utc) {
      if (merged.back().end.utc < s.end.utc) merged.back().end = s.end;
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

void write_interactions(std::ostream& out, std::span<const Interaction> interactions) {
  for (const auto& it : interactions) {
    nlohmann::ordered_json r;
    r["wearer_id"] = it.wearer_id;
    r["person_cluster_id"] = it.person_cluster_id;
    r["day"] = format_date(it.day);
    r["start"] = format_timestamp(it.start);
    r["end"] = format_timestamp(it.end);
    r["duration_min"] = it.duration_minutes();
    r["observation_count"] = it.observation_count;
    out << r.dump() << '\n';
  }
}

std::vector<Interaction> read_interactions(std::istream& in) {
  std::vector<Interaction> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto r = nlohmann::json::parse(text);
      if (r.contains("record")) continue;  // provenance header
      Interaction it;
      it.wearer_id = r.at("wearer_id").get<std::string>();
      it.person_cluster_id = r.at("person_cluster_id").get<int>();
      it.day = parse_date(r.at("day").get<std::string>());
      it.start = parse_timestamp(r.at("start").get<std::string>());
      it.end = parse_timestamp(r.at("end").get<std::string>());
      it.observation_count = r.at("observation_count").get<std::size_t>();
      if (it.end.utc < it.start.utc) throw FormatError("interaction ends before it starts", line);
      out.push_back(std::move(it));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad interaction record: ") + e.what(), line);
    } catch (const FormatError& e) {
      if (e.line()) throw;
      throw FormatError(e.what(), line);
    }
  }
  return out;
}

}  // namespace egosocial
