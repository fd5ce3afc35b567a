// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "egosocial/clustering.hpp"
#include "egosocial/consistency.hpp"
#include "egosocial/evaluation.hpp"
#include "egosocial/ingest.hpp"
#include "egosocial/segmentation.hpp"
#include "egosocial/social_profile.hpp"

namespace egosocial {

/// Every knob of a run. Paths identify inputs; the fingerprint covers parameters and
/// input contents, not paths or the output directory.
struct RunConfig {
  std::string observations_path;
  std::string coverage_path;
  std::string truth_path;
  MethodSpec method;
  ConsistencyThresholds thresholds;
  SegmentationParams segmentation;
  DiscardPolicy discard_policy = DiscardPolicy::as_singletons;

  void validate() const;
  nlohmann::ordered_json parameters_json() const;
};

/// Overrides fields of `config` from a JSON object using the CLI flag names
/// (`cut_threshold`, `metric`, `normalize`, `robust_mean`, `reject_mean`, `member_min`,
/// `min_event_min`, `max_gap_min`, `method`, `seed`, `k`, `bandwidth`, `affinity_scale`,
/// `obs`, `coverage`, `truth`). Unknown keys are rejected.
void apply_config_json(RunConfig& config, const nlohmann::json& overrides);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Provenance block: parameters, input digests, and their combined fingerprint.
struct Provenance {
  nlohmann::ordered_json block;
  std::string fingerprint;
};
Provenance make_provenance(const RunConfig& config);

struct WearerRun {
  std::string wearer_id;
  Dataset data;
  Clustering raw;
  ConsistencyResult filtered;
  Segmentation segmentation;
  SocialTraits traits;
};

struct PipelineResult {
  std::vector<WearerRun> wearers;
  std::vector<SocialProfile> profiles;
  Provenance provenance;
};

/// Loads the dataset named by `config` (coverage manifest optional).
Dataset load_dataset(const RunConfig& config);

/// cluster -> consistency -> segment -> traits per wearer, then cohort profiles.
/// Errors are rethrown as std::runtime_error prefixed with the failing stage.
PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& config, const Provenance& provenance);

/// Writes clustering.jsonl, consistency.json, interactions.jsonl, traits.json,
/// traits_table.txt, radar_overlay.svg, radar_<wearer>.svg and run_config.json.
void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir);

/// Writes one JSON-lines provenance record.
void write_provenance_line(std::ostream& out, const Provenance& provenance);

}  // namespace egosocial
