// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosocial/clustering.hpp"
#include "egosocial/consistency.hpp"
#include "egosocial/ingest.hpp"

namespace egosocial {

/// Identity label per observation. Observations labelled `unknown` are not scored.
struct GroundTruth {
  static constexpr const char* kUnknown = "unknown";
  std::map<ObservationKey, std::string> labels;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

GroundTruth read_truth(std::istream& in);
void write_truth(std::ostream& out, const GroundTruth& truth);

struct EvalReport {
  // Pair counting over all unordered pairs of scored observations.
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f_measure = 1.0;
  // Item-averaged BCubed, reported alongside.
  double bcubed_precision = 1.0;
  double bcubed_recall = 1.0;
  double bcubed_f = 1.0;
  std::size_t n_scored = 0;
};

/// Pair-counting and BCubed scores. `predicted[i]` and `truth[i]` are labels of item i;
/// items whose truth label is negative are not scored. Predicted labels must be >= 0.
EvalReport pairwise_prf(std::span<const int> predicted, std::span<const int> truth);

enum class DiscardPolicy { as_singletons, exclude };

/// Scores `clustering` (over `observations`) against `truth`. Discarded observations are
/// scored as singletons or left out. Throws ValidationError when an observation has no
/// label or a label refers to an observation that is not clustered.
EvalReport pairwise_prf(const Clustering& clustering, std::span<const FaceObservation> observations,
                        const GroundTruth& truth, DiscardPolicy policy = DiscardPolicy::as_singletons);

struct MethodScore {
  Method method = Method::ahc;
  EvalReport report;
  std::size_t clusters = 0;
  std::size_t discarded = 0;
};

/// Runs every spec, consistency-filters its clustering, and scores it.
std::vector<MethodScore> evaluate_methods(std::span<const FaceObservation> observations, const GroundTruth& truth,
                                          std::span<const MethodSpec> specs, const ConsistencyThresholds& thresholds,
                                          DiscardPolicy policy = DiscardPolicy::as_singletons);

/// Comparison table with percentages, one row per method.
std::string render_eval_table(std::span<const MethodScore> scores);
nlohmann::ordered_json to_json(const MethodScore& score);

}  // namespace egosocial
