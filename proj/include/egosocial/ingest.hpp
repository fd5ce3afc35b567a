// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egosocial/time.hpp"

namespace egosocial {

inline constexpr Eigen::Index kDescriptorSize = 128;

template <typename Scalar>
using DescriptorT = Eigen::Matrix<Scalar, kDescriptorSize, 1>;
using Descriptor = DescriptorT<double>;

/// Identifies one face across files: (wearer, image, face-in-image).
struct ObservationKey {
  std::string wearer_id;
  std::string image_id;
  int face_index = 0;

  std::string str() const { return wearer_id + "/" + image_id + "#" + std::to_string(face_index); }
  friend bool operator==(const ObservationKey&, const ObservationKey&) = default;
  friend auto operator<=>(const ObservationKey&, const ObservationKey&) = default;
};

struct FaceObservation {
  std::string wearer_id;
  Date day;
  Timestamp timestamp;
  std::string image_id;
  int face_index = 0;
  Descriptor descriptor = Descriptor::Zero();

  ObservationKey key() const { return {wearer_id, image_id, face_index}; }
  friend bool operator==(const FaceObservation& a, const FaceObservation& b) {
    return a.wearer_id == b.wearer_id && a.day == b.day && a.timestamp == b.timestamp &&
           a.image_id == b.image_id && a.face_index == b.face_index && a.descriptor == b.descriptor;
  }
};

/// Recorded span of one wearer-day. Entries not backed by a manifest are
/// derived from the first/last observation and marked `synthesized`.
struct DayCoverage {
  std::string wearer_id;
  Date day;
  Timestamp start;
  Timestamp end;
  std::optional<long> image_count;
  bool synthesized = false;

  double minutes() const { return minutes_between(start, end); }
  friend bool operator==(const DayCoverage&, const DayCoverage&) = default;
};

using DayKey = std::pair<std::string, Date>;

/// Immutable, validated collection of observations sorted by (wearer, timestamp),
/// with one coverage entry per observed wearer-day.
class Dataset {
 public:
  Dataset() = default;

  /// Validates every invariant, sorts, and synthesizes missing coverage.
  /// Throws ValidationError.
  static Dataset build(std::vector<FaceObservation> observations, std::vector<DayCoverage> manifest);

  std::span<const FaceObservation> observations() const { return observations_; }
  const std::map<DayKey, DayCoverage>& coverage() const { return coverage_; }

  /// Wearers seen in observations or coverage, sorted.
  std::vector<std::string> wearers() const;
  bool has_wearer(const std::string& wearer_id) const;
  /// Coverage entries of one wearer in day order.
  std::vector<DayCoverage> coverage_of(const std::string& wearer_id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<FaceObservation> observations_;
  std::map<DayKey, DayCoverage> coverage_;
};

/// Reads the JSON-lines observation format. Coverage is synthesized for every wearer-day.
/// Throws FormatError (with line number) on any bad record.
Dataset parse_observations(std::istream& observations);
/// Same, with an explicit coverage manifest.
Dataset parse_observations(std::istream& observations, std::istream& manifest);
std::vector<DayCoverage> parse_coverage(std::istream& manifest);

void write_observations(std::ostream& out, std::span<const FaceObservation> observations);
/// Writes only manifest-backed entries; synthesized ones are re-derived on parse.
void write_coverage(std::ostream& out, const Dataset& dataset);
void write_coverage(std::ostream& out, std::span<const DayCoverage> coverage);

/// Observations (and coverage) of one wearer, optionally restricted to an inclusive
/// day range. Throws ValidationError for an unknown wearer.
Dataset slice(const Dataset& dataset, const std::string& wearer_id,
              std::optional<std::pair<Date, Date>> days = std::nullopt);

/// Stacks descriptors row-wise: row i is observation i.
Eigen::MatrixXd descriptor_matrix(std::span<const FaceObservation> observations);

}  // namespace egosocial
