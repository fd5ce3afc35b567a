// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "egosocial/errors.hpp"

namespace egosocial {

namespace {

using nlohmann::json;

const json& field(const json& record, const char* name, std::size_t line) {
  auto it = record.find(name);
  if (it == record.end()) throw FormatError(std::string("missing field '") + name + "'", line);
  return *it;
}

std::string string_field(const json& record, const char* name, std::size_t line) {
  const json& v = field(record, name, line);
  if (!v.is_string()) throw FormatError(std::string("field '") + name + "' must be a string", line);
  return v.get<std::string>();
}

template <typename Fn>
auto reformat(Fn&& fn, std::size_t line) {
  try {
    return fn();
  } catch (const FormatError& e) {
    if (e.line() != 0) throw;
    throw FormatError(e.what(), line);
  }
}

/// Calls `fn(record, line_no)` for every non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("malformed record: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw FormatError("record must be a JSON object", line_no);
    fn(record, line_no);
  }
}

FaceObservation observation_from(const json& r, std::size_t line) {
  FaceObservation obs;
  obs.wearer_id = string_field(r, "wearer_id", line);
  obs.day = reformat([&] { return parse_date(string_field(r, "day", line)); }, line);
  obs.timestamp = reformat([&] { return parse_timestamp(string_field(r, "timestamp", line)); }, line);
  obs.image_id = string_field(r, "image_id", line);

  const json& face = field(r, "face_index", line);
  if (!face.is_number_integer() || face.get<long long>() < 0 || face.get<long long>() > 1'000'000)
    throw FormatError("face_index must be a small non-negative integer", line);
  obs.face_index = face.get<int>();

  const json& desc = field(r, "descriptor", line);
  if (!desc.is_array()) throw FormatError("descriptor must be an array", line);
  if (desc.size() != static_cast<std::size_t>(kDescriptorSize))
    throw FormatError("descriptor has " + std::to_string(desc.size()) + " values, expected " +
                          std::to_string(kDescriptorSize),
                      line);
  for (Eigen::Index i = 0; i < kDescriptorSize; ++i) {
    const json& v = desc[static_cast<std::size_t>(i)];
    if (!v.is_number()) throw FormatError("descriptor value " + std::to_string(i) + " is not a number", line);
    double x = v.get<double>();
    if (!std::isfinite(x)) throw FormatError("descriptor value " + std::to_string(i) + " is not finite", line);
    obs.descriptor(i) = x;
  }
  if (obs.timestamp.local_date() != obs.day)
    throw FormatError("timestamp " + format_timestamp(obs.timestamp) + " does not fall on day " +
                          format_date(obs.day),
                      line);
  return obs;
}

DayCoverage coverage_from(const json& r, std::size_t line) {
  DayCoverage cov;
  cov.wearer_id = string_field(r, "wearer_id", line);
  cov.day = reformat([&] { return parse_date(string_field(r, "day", line)); }, line);
  cov.start = reformat([&] { return parse_timestamp(string_field(r, "start", line)); }, line);
  cov.end = reformat([&] { return parse_timestamp(string_field(r, "end", line)); }, line);
  if (auto it = r.find("image_count"); it != r.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() < 0)
      throw FormatError("image_count must be a non-negative integer", line);
    cov.image_count = it->get<long>();
  }
  if (!(cov.start.utc < cov.end.utc)) throw FormatError("coverage start must precede end", line);
  return cov;
}

const Date kEarliestDay{std::chrono::year::min(), std::chrono::January, std::chrono::day{1}};

}  // namespace

Dataset Dataset::build(std::vector<FaceObservation> observations, std::vector<DayCoverage> manifest) {
  Dataset ds;
  std::set<ObservationKey> seen;
  for (const auto& o : observations) {
    if (!o.descriptor.allFinite())
      throw ValidationError("non-finite descriptor value in " + o.key().str());
    if (o.face_index < 0) throw ValidationError("negative face_index in " + o.key().str());
    if (o.timestamp.local_date() != o.day)
      throw ValidationError("timestamp/day mismatch in " + o.key().str());
    if (!seen.insert(o.key()).second) throw ValidationError("duplicate observation " + o.key().str());
  }

  for (auto& c : manifest) {
    if (!(c.start.utc < c.end.utc))
      throw ValidationError("coverage start must precede end for " + c.wearer_id + " " + format_date(c.day));
    c.synthesized = false;
    DayKey key{c.wearer_id, c.day};
    if (!ds.coverage_.emplace(key, std::move(c)).second)
      throw ValidationError("duplicate coverage entry for " + key.first + " " + format_date(key.second));
  }

  std::sort(observations.begin(), observations.end(), [](const FaceObservation& a, const FaceObservation& b) {
    return std::tie(a.wearer_id, a.timestamp.utc, a.image_id, a.face_index) <
           std::tie(b.wearer_id, b.timestamp.utc, b.image_id, b.face_index);
  });

  for (const auto& o : observations) {
    DayKey key{o.wearer_id, o.day};
    auto it = ds.coverage_.find(key);
    if (it == ds.coverage_.end()) {
      DayCoverage cov{o.wearer_id, o.day, o.timestamp, o.timestamp, std::nullopt, true};
      ds.coverage_.emplace(std::move(key), std::move(cov));
      continue;
    }
    DayCoverage& cov = it->second;
    if (cov.synthesized) {
      cov.start = std::min(cov.start, o.timestamp);
      cov.end = std::max(cov.end, o.timestamp);
    } else if (o.timestamp.utc < cov.start.utc || cov.end.utc < o.timestamp.utc) {
      throw ValidationError("observation " + o.key().str() + " at " + format_timestamp(o.timestamp) +
                            " lies outside the recorded span of " + format_date(o.day));
    }
  }
  ds.observations_ = std::move(observations);
  return ds;
}

std::vector<std::string> Dataset::wearers() const {
  std::set<std::string> ids;
  for (const auto& [key, cov] : coverage_) ids.insert(key.first);
  return {ids.begin(), ids.end()};
}

bool Dataset::has_wearer(const std::string& wearer_id) const {
  auto it = coverage_.lower_bound(DayKey{wearer_id, kEarliestDay});
  return it != coverage_.end() && it->first.first == wearer_id;
}

std::vector<DayCoverage> Dataset::coverage_of(const std::string& wearer_id) const {
  std::vector<DayCoverage> out;
  for (auto it = coverage_.lower_bound(DayKey{wearer_id, kEarliestDay});
       it != coverage_.end() && it->first.first == wearer_id; ++it)
    out.push_back(it->second);
  return out;
}

std::vector<DayCoverage> parse_coverage(std::istream& manifest) {
  std::vector<DayCoverage> out;
  std::set<DayKey> keys;
  for_each_record(manifest, [&](const json& r, std::size_t line) {
    DayCoverage cov = coverage_from(r, line);
    if (!keys.insert({cov.wearer_id, cov.day}).second)
      throw FormatError("duplicate coverage entry for " + cov.wearer_id + " " + format_date(cov.day), line);
    out.push_back(std::move(cov));
  });
  return out;
}

namespace {

Dataset parse_with(std::istream& in, std::vector<DayCoverage> manifest) {
  std::vector<FaceObservation> obs;
  std::set<ObservationKey> keys;
  for_each_record(in, [&](const json& r, std::size_t line) {
    FaceObservation o = observation_from(r, line);
    if (!keys.insert(o.key()).second)
      throw FormatError("duplicate (image_id, face_index) " + o.image_id + "#" + std::to_string(o.face_index) +
                            " for wearer " + o.wearer_id,
                        line);
    obs.push_back(std::move(o));
  });
  return Dataset::build(std::move(obs), std::move(manifest));
}

}  // namespace

Dataset parse_observations(std::istream& observations) { return parse_with(observations, {}); }

Dataset parse_observations(std::istream& observations, std::istream& manifest) {
  return parse_with(observations, parse_coverage(manifest));
}

void write_observations(std::ostream& out, std::span<const FaceObservation> observations) {
  for (const auto& o : observations) {
    nlohmann::ordered_json r;
    r["wearer_id"] = o.wearer_id;
    r["day"] = format_date(o.day);
    r["timestamp"] = format_timestamp(o.timestamp);
    r["image_id"] = o.image_id;
    r["face_index"] = o.face_index;
    r["descriptor"] = std::vector<double>(o.descriptor.data(), o.descriptor.data() + kDescriptorSize);
    out << r.dump() << '\n';
  }
}

void write_coverage(std::ostream& out, std::span<const DayCoverage> coverage) {
  for (const auto& c : coverage) {
    nlohmann::ordered_json r;
    r["wearer_id"] = c.wearer_id;
    r["day"] = format_date(c.day);
    r["start"] = format_timestamp(c.start);
    r["end"] = format_timestamp(c.end);
    if (c.image_count) r["image_count"] = *c.image_count;
    out << r.dump() << '\n';
  }
}

void write_coverage(std::ostream& out, const Dataset& dataset) {
  std::vector<DayCoverage> manifest;
  for (const auto& [key, cov] : dataset.coverage())
    if (!cov.synthesized) manifest.push_back(cov);
  write_coverage(out, manifest);
}

Dataset slice(const Dataset& dataset, const std::string& wearer_id, std::optional<std::pair<Date, Date>> days) {
  if (!dataset.has_wearer(wearer_id)) throw ValidationError("unknown wearer '" + wearer_id + "'");
  auto in_range = [&](Date d) { return !days || (days->first <= d && d <= days->second); };

  std::vector<FaceObservation> obs;
  for (const auto& o : dataset.observations())
    if (o.wearer_id == wearer_id && in_range(o.day)) obs.push_back(o);
  std::vector<DayCoverage> manifest;
  for (const auto& c : dataset.coverage_of(wearer_id))
    if (!c.synthesized && in_range(c.day)) manifest.push_back(c);
  return Dataset::build(std::move(obs), std::move(manifest));
}

Eigen::MatrixXd descriptor_matrix(std::span<const FaceObservation> observations) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(observations.size()), kDescriptorSize);
  for (std::size_t i = 0; i < observations.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = observations[i].descriptor.transpose();
  return m;
}

}  // namespace egosocial
