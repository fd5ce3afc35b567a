// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "egosocial/render.hpp"

namespace egosocial {

namespace {

double minutes_of(std::chrono::seconds s) { return static_cast<double>(s.count()) / 60.0; }

std::chrono::seconds seconds_from_minutes(double minutes) {
  if (!std::isfinite(minutes)) throw std::invalid_argument("duration must be finite");
  return std::chrono::seconds{std::llround(minutes * 60.0)};
}

std::string safe_name(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? "_" : out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

template <typename Fn>
auto stage(const char* name, const std::string& wearer, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage '") + name + "' failed for wearer '" + wearer + "': " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  method.ahc.validate();
  thresholds.validate();
  segmentation.validate();
  if (method.method == Method::spectral && method.spectral.k < 1)
    throw std::invalid_argument("spectral clustering needs --k");
}

nlohmann::ordered_json RunConfig::parameters_json() const {
  nlohmann::ordered_json j;
  j["method"] = to_string(method.method);
  j["ahc"] = {{"linkage", "average"},
              {"metric", to_string(method.ahc.metric)},
              {"cut_threshold", method.ahc.cut_threshold},
              {"normalize", method.ahc.normalize_descriptors}};
  j["meanshift"] = {{"bandwidth", method.meanshift.bandwidth},
                    {"max_iter", method.meanshift.max_iter},
                    {"tol", method.meanshift.tol}};
  j["spectral"] = {{"k", method.spectral.k},
                   {"affinity_scale", method.spectral.affinity_scale},
                   {"seed", method.spectral.seed}};
  j["normalize_baselines"] = method.normalize_baselines;
  j["consistency"] = {{"robust_mean", thresholds.robust_mean},
                      {"reject_mean", thresholds.reject_mean},
                      {"member_min", thresholds.member_min}};
  j["segmentation"] = {{"min_event_min", minutes_of(segmentation.min_event_duration)},
                       {"max_gap_min", minutes_of(segmentation.max_gap)}};
  j["discarded_in_eval"] = discard_policy == DiscardPolicy::exclude ? "exclude" : "singletons";
  return j;
}

void apply_config_json(RunConfig& c, const nlohmann::json& o) {
  if (!o.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, v] : o.items()) {
    if (key == "obs") c.observations_path = v.get<std::string>();
    else if (key == "coverage") c.coverage_path = v.get<std::string>();
    else if (key == "truth") c.truth_path = v.get<std::string>();
    else if (key == "method") c.method.method = parse_method(v.get<std::string>());
    else if (key == "metric") c.method.ahc.metric = parse_metric(v.get<std::string>());
    else if (key == "cut_threshold") c.method.ahc.cut_threshold = v.get<double>();
    else if (key == "normalize") c.method.ahc.normalize_descriptors = v.get<bool>();
    else if (key == "robust_mean") c.thresholds.robust_mean = v.get<double>();
    else if (key == "reject_mean") c.thresholds.reject_mean = v.get<double>();
    else if (key == "member_min") c.thresholds.member_min = v.get<double>();
    else if (key == "min_event_min") c.segmentation.min_event_duration = seconds_from_minutes(v.get<double>());
    else if (key == "max_gap_min") c.segmentation.max_gap = seconds_from_minutes(v.get<double>());
    else if (key == "seed") c.method.spectral.seed = v.get<std::uint64_t>();
    else if (key == "k") c.method.spectral.k = v.get<int>();
    else if (key == "bandwidth") c.method.meanshift.bandwidth = v.get<double>();
    else if (key == "affinity_scale") c.method.spectral.affinity_scale = v.get<double>();
    else if (key == "exclude_discarded") c.discard_policy = v.get<bool>() ? DiscardPolicy::exclude : DiscardPolicy::as_singletons;
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Provenance make_provenance(const RunConfig& config) {
  Provenance p;
  nlohmann::ordered_json inputs;
  auto digest = [](const std::string& path) -> nlohmann::ordered_json {
    if (path.empty()) return nullptr;
    return fnv1a_hex(read_file(path));
  };
  inputs["observations"] = digest(config.observations_path);
  inputs["coverage"] = digest(config.coverage_path);
  inputs["truth"] = digest(config.truth_path);
  p.block["parameters"] = config.parameters_json();
  p.block["inputs"] = std::move(inputs);
  p.fingerprint = fnv1a_hex(p.block.dump());
  p.block["fingerprint"] = p.fingerprint;
  return p;
}

Dataset load_dataset(const RunConfig& config) {
  if (config.observations_path.empty()) throw std::invalid_argument("no observation file given (--obs)");
  std::ifstream obs(config.observations_path);
  if (!obs) throw std::runtime_error("cannot open " + config.observations_path);
  if (config.coverage_path.empty()) return parse_observations(obs);
  std::ifstream cov(config.coverage_path);
  if (!cov) throw std::runtime_error("cannot open " + config.coverage_path);
  return parse_observations(obs, cov);
}

PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& config, const Provenance& provenance) {
  config.validate();
  PipelineResult result;
  result.provenance = provenance;
  std::vector<SocialTraits> traits;
  for (const auto& wearer : dataset.wearers()) {
    WearerRun run;
    run.wearer_id = wearer;
    run.data = slice(dataset, wearer);
    const auto obs = run.data.observations();
    run.raw = stage("cluster", wearer, [&] { return cluster_observations(obs, config.method); });
    run.filtered = stage("consistency", wearer, [&] { return apply_consistency(run.raw, obs, config.thresholds); });
    run.segmentation =
        stage("segment", wearer, [&] { return segment(run.filtered.clustering, obs, config.segmentation); });
    run.traits = stage("profile", wearer, [&] {
      auto coverage = run.data.coverage_of(wearer);
      return compute_traits(run.segmentation.interactions, coverage, wearer);
    });
    traits.push_back(run.traits);
    result.wearers.push_back(std::move(run));
  }
  result.profiles = build_profiles(traits, provenance.fingerprint);
  return result;
}

void write_provenance_line(std::ostream& out, const Provenance& provenance) {
  nlohmann::ordered_json r;
  r["record"] = "provenance";
  r["fingerprint"] = provenance.fingerprint;
  r["parameters"] = provenance.block["parameters"];
  r["inputs"] = provenance.block["inputs"];
  out << r.dump() << '\n';
}

void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Provenance& prov = result.provenance;

  std::ostringstream clustering;
  write_provenance_line(clustering, prov);
  for (const auto& w : result.wearers)
    write_clustering(clustering, w.wearer_id, w.data.observations(), w.filtered.clustering);
  write_text(out_dir / "clustering.jsonl", clustering.str());

  nlohmann::ordered_json consistency;
  consistency["provenance"] = prov.block;
  auto reports = nlohmann::ordered_json::array();
  for (const auto& w : result.wearers) {
    nlohmann::ordered_json r;
    r["wearer_id"] = w.wearer_id;
    r["report"] = to_json(w.filtered.report, w.data.observations());
    reports.push_back(std::move(r));
  }
  consistency["wearers"] = std::move(reports);
  write_text(out_dir / "consistency.json", consistency.dump(2) + "\n");

  std::ostringstream interactions;
  write_provenance_line(interactions, prov);
  for (const auto& w : result.wearers) write_interactions(interactions, w.segmentation.interactions);
  write_text(out_dir / "interactions.jsonl", interactions.str());

  nlohmann::ordered_json traits;
  traits["provenance"] = prov.block;
  auto profiles = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.profiles.size(); ++i) {
    auto p = to_json(result.profiles[i]);
    p["sub_event_runs"] = result.wearers[i].segmentation.sub_event_runs;
    p["synthesized_coverage_days"] = [&] {
      int n = 0;
      for (const auto& c : result.wearers[i].data.coverage_of(result.wearers[i].wearer_id)) n += c.synthesized;
      return n;
    }();
    profiles.push_back(std::move(p));
  }
  traits["profiles"] = std::move(profiles);
  write_text(out_dir / "traits.json", traits.dump(2) + "\n");

  std::vector<SocialTraits> rows;
  for (const auto& w : result.wearers) rows.push_back(w.traits);
  write_text(out_dir / "traits_table.txt", render_table(rows) + "# fingerprint " + prov.fingerprint + "\n");

  if (!result.profiles.empty()) {
    RadarSpec overlay = radar_spec(result.profiles, true);
    overlay.provenance = prov.fingerprint;
    write_text(out_dir / "radar_overlay.svg", render_radar(overlay));
    for (const auto& p : result.profiles) {
      RadarSpec one = radar_spec(std::span<const SocialProfile>(&p, 1), true);
      one.provenance = prov.fingerprint;
      write_text(out_dir / ("radar_" + safe_name(p.traits.wearer_id) + ".svg"), render_radar(one));
    }
  }

  write_text(out_dir / "run_config.json", prov.block.dump(2) + "\n");
}

}  // namespace egosocial
