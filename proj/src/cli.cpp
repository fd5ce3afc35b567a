// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "egosocial/pipeline.hpp"
#include "egosocial/render.hpp"
#include "egosocial/synthetic.hpp"

namespace egosocial {

namespace {

namespace fs = std::filesystem;

/// Flag values before --config overrides are applied.
struct Flags {
  std::string obs, coverage, truth, out, config;
  std::string clustering, interactions, traits;
  std::string method = "ahc";
  std::string methods = "ahc,meanshift,spectral";
  std::string metric = "euclidean";
  double cut_threshold = AhcParams{}.cut_threshold;
  bool normalize = true;
  double robust_mean = ConsistencyThresholds{}.robust_mean;
  double reject_mean = ConsistencyThresholds{}.reject_mean;
  double member_min = ConsistencyThresholds{}.member_min;
  double min_event_min = 3.0;
  double max_gap_min = 15.0;
  std::uint64_t seed = SpectralParams{}.seed;
  std::uint64_t synth_seed = SynthConfig{}.seed;
  int k = 0;
  double bandwidth = 0.0;
  double affinity_scale = 0.0;
  bool exclude_discarded = false;
};

void add_parameter_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON file whose keys override the flags");
  sub->add_option("--method", f.method, "Clustering method: ahc, meanshift, spectral")->capture_default_str();
  sub->add_option("--metric", f.metric, "AHC dissimilarity: euclidean, cosine, correlation")->capture_default_str();
  sub->add_option("--cut-threshold", f.cut_threshold, "AHC dendrogram cut distance")->capture_default_str();
  sub->add_option("--normalize", f.normalize, "L2-normalize descriptors before AHC (true/false)")
      ->capture_default_str();
  sub->add_option("--robust-mean", f.robust_mean, "Mean correlation at or above which a cluster is robust")
      ->capture_default_str();
  sub->add_option("--reject-mean", f.reject_mean, "Mean correlation below which a cluster is rejected")
      ->capture_default_str();
  sub->add_option("--member-min", f.member_min, "Minimum mean correlation of a member to the rest")
      ->capture_default_str();
  sub->add_option("--min-event-min", f.min_event_min, "Minimum interaction span in minutes")->capture_default_str();
  sub->add_option("--max-gap-min", f.max_gap_min, "Largest gap in minutes bridged inside one interaction")
      ->capture_default_str();
  sub->add_option("--seed", f.seed, "Seed for spectral k-means")->capture_default_str();
  sub->add_option("--k", f.k, "Cluster count for spectral clustering");
  sub->add_option("--bandwidth", f.bandwidth, "Mean-shift bandwidth (0: median pairwise distance)");
  sub->add_option("--affinity-scale", f.affinity_scale, "Spectral Gaussian scale (0: median pairwise distance)");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  c.observations_path = f.obs;
  c.coverage_path = f.coverage;
  c.truth_path = f.truth;
  c.method.method = parse_method(f.method);
  c.method.ahc.metric = parse_metric(f.metric);
  c.method.ahc.cut_threshold = f.cut_threshold;
  c.method.ahc.normalize_descriptors = f.normalize;
  c.method.meanshift.bandwidth = f.bandwidth;
  c.method.spectral.k = f.k;
  c.method.spectral.affinity_scale = f.affinity_scale;
  c.method.spectral.seed = f.seed;
  c.thresholds = {f.robust_mean, f.reject_mean, f.member_min};
  c.segmentation.min_event_duration = std::chrono::seconds{std::llround(f.min_event_min * 60.0)};
  c.segmentation.max_gap = std::chrono::seconds{std::llround(f.max_gap_min * 60.0)};
  c.discard_policy = f.exclude_discarded ? DiscardPolicy::exclude : DiscardPolicy::as_singletons;
  if (!f.config.empty()) apply_config_json(c, nlohmann::json::parse(read_file(f.config)));
  return c;
}

void print_parameters(const RunConfig& c, std::ostream& err) {
  err << "parameters: " << c.parameters_json().dump() << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  Dataset ds = load_dataset(c);
  for (const auto& wearer : ds.wearers()) {
    auto days = ds.coverage_of(wearer);
    std::size_t faces = 0;
    for (const auto& o : ds.observations()) faces += o.wearer_id == wearer;
    out << "wearer " << wearer << ": " << faces << " faces over " << days.size() << " days\n";
    for (const auto& d : days) {
      std::size_t n = 0;
      std::set<std::string> images;
      for (const auto& o : ds.observations())
        if (o.wearer_id == wearer && o.day == d.day) ++n, images.insert(o.image_id);
      out << "  " << format_date(d.day) << "  faces=" << n << "  images=" << images.size()
          << "  recorded=" << format_timestamp(d.start) << ".." << format_timestamp(d.end)
          << (d.synthesized ? "  (coverage synthesized)" : "") << '\n';
    }
  }
  return 0;
}

int cmd_cluster(const RunConfig& c, const fs::path& out_dir, std::ostream& out) {
  c.validate();
  Dataset ds = load_dataset(c);
  Provenance prov = make_provenance(c);
  std::ostringstream file;
  write_provenance_line(file, prov);
  nlohmann::ordered_json report;
  report["provenance"] = prov.block;
  report["wearers"] = nlohmann::ordered_json::array();
  for (const auto& wearer : ds.wearers()) {
    Dataset part = slice(ds, wearer);
    auto obs = part.observations();
    auto filtered = apply_consistency(cluster_observations(obs, c.method), obs, c.thresholds);
    write_clustering(file, wearer, obs, filtered.clustering);
    report["wearers"].push_back({{"wearer_id", wearer}, {"report", to_json(filtered.report, obs)}});
    out << wearer << ": " << filtered.clustering.cluster_count() << " clusters, " << filtered.clustering.discarded.size()
        << " discarded of " << obs.size() << '\n';
  }
  write_text(out_dir / "clustering.jsonl", file.str());
  write_text(out_dir / "consistency.json", report.dump(2) + "\n");
  return 0;
}

int cmd_segment(const RunConfig& c, const std::string& clustering_path, const fs::path& out_file, std::ostream& out) {
  c.validate();
  Dataset ds = load_dataset(c);
  std::ifstream in(clustering_path);
  if (!in) throw std::runtime_error("cannot open " + clustering_path);
  auto clusterings = read_clusterings(in, ds);
  std::ostringstream file;
  write_provenance_line(file, make_provenance(c));
  for (const auto& wearer : ds.wearers()) {
    auto it = clusterings.find(wearer);
    if (it == clusterings.end()) throw ValidationError("clustering file has no block for wearer '" + wearer + "'");
    Dataset part = slice(ds, wearer);
    Segmentation seg = segment(it->second, part.observations(), c.segmentation);
    write_interactions(file, seg.interactions);
    out << wearer << ": " << seg.interactions.size() << " interactions, " << seg.sub_event_runs
        << " runs below the minimum duration\n";
  }
  write_text(out_file, file.str());
  return 0;
}

std::vector<SocialTraits> traits_from_file(const std::string& path) {
  auto j = nlohmann::json::parse(read_file(path));
  std::vector<SocialTraits> out;
  for (const auto& p : j.at("profiles")) out.push_back(traits_from_json(p.at("traits")));
  return out;
}

void write_charts(std::span<const SocialProfile> profiles, const std::string& fingerprint, const fs::path& dir) {
  RadarSpec overlay = radar_spec(profiles, true);
  overlay.provenance = fingerprint;
  write_text(dir / "radar_overlay.svg", render_radar(overlay));
}

int cmd_profile(const RunConfig& c, const std::string& interactions_path, const std::string& out_file,
                std::ostream& out) {
  Dataset ds = load_dataset(c);
  std::ifstream in(interactions_path);
  if (!in) throw std::runtime_error("cannot open " + interactions_path);
  auto interactions = read_interactions(in);
  Provenance prov = make_provenance(c);
  std::vector<SocialTraits> traits;
  for (const auto& wearer : ds.wearers()) {
    auto coverage = ds.coverage_of(wearer);
    traits.push_back(compute_traits(interactions, coverage, wearer));
  }
  auto profiles = build_profiles(traits, prov.fingerprint);
  nlohmann::ordered_json j;
  j["provenance"] = prov.block;
  j["profiles"] = nlohmann::ordered_json::array();
  for (const auto& p : profiles) j["profiles"].push_back(to_json(p));
  if (!out_file.empty()) write_text(out_file, j.dump(2) + "\n");
  out << render_table(traits);
  return 0;
}

int cmd_render(const std::string& traits_path, const fs::path& out_dir, std::ostream& out) {
  auto traits = traits_from_file(traits_path);
  const std::string fingerprint = fnv1a_hex(read_file(traits_path));
  auto profiles = build_profiles(traits, fingerprint);
  write_charts(profiles, fingerprint, out_dir);
  for (const auto& p : profiles) {
    RadarSpec one = radar_spec(std::span<const SocialProfile>(&p, 1), true);
    one.provenance = fingerprint;
    std::string name;
    for (char ch : p.traits.wearer_id) name += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
    write_text(out_dir / ("radar_" + name + ".svg"), render_radar(one));
  }
  const std::string table = render_table(traits);
  write_text(out_dir / "traits_table.txt", table);
  out << table;
  return 0;
}

int cmd_eval(const RunConfig& c, const std::string& methods, const std::string& out_file, std::ostream& out) {
  if (c.truth_path.empty()) throw std::invalid_argument("eval needs --truth");
  c.thresholds.validate();
  Dataset ds = load_dataset(c);
  std::ifstream tin(c.truth_path);
  if (!tin) throw std::runtime_error("cannot open " + c.truth_path);
  GroundTruth truth = read_truth(tin);

  std::vector<MethodSpec> specs;
  std::stringstream list(methods);
  for (std::string name; std::getline(list, name, ',');) {
    if (name.empty()) continue;
    MethodSpec s = c.method;
    s.method = parse_method(name);
    if (s.method == Method::spectral && s.spectral.k < 1) throw std::invalid_argument("spectral evaluation needs --k");
    specs.push_back(s);
  }
  auto scores = evaluate_methods(ds.observations(), truth, specs, c.thresholds, c.discard_policy);
  out << render_eval_table(scores);
  if (!out_file.empty()) {
    nlohmann::ordered_json j;
    j["provenance"] = make_provenance(c).block;
    j["counting"] = "pairwise (micro) with BCubed alongside";
    j["methods"] = nlohmann::ordered_json::array();
    for (const auto& s : scores) j["methods"].push_back(to_json(s));
    write_text(out_file, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_synth(const std::string& config_path, std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  nlohmann::json j = {{"seed", seed}, {"n_identities", 20}, {"n_days", 5}, {"random_schedule", nlohmann::json::object()}};
  if (!config_path.empty()) j = nlohmann::json::parse(read_file(config_path));
  SynthConfig config = synth_config_from_json(j);
  SynthDataset s = generate(config);
  std::ostringstream obs, cov, truth;
  write_observations(obs, s.dataset.observations());
  write_coverage(cov, s.dataset);
  write_truth(truth, s.truth);
  nlohmann::ordered_json schedule = nlohmann::ordered_json::array();
  for (const auto& r : s.schedule_truth) {
    nlohmann::ordered_json e;
    e["identity"] = r.script.identity;
    e["label"] = "person-" + std::to_string(r.script.identity);
    e["day"] = r.script.day;
    e["start"] = format_clock(r.script.start);
    e["end"] = format_clock(r.script.end);
    e["frames"] = r.frames;
    e["first_frame"] = r.first_frame ? nlohmann::ordered_json(format_timestamp(*r.first_frame)) : nullptr;
    e["last_frame"] = r.last_frame ? nlohmann::ordered_json(format_timestamp(*r.last_frame)) : nullptr;
    schedule.push_back(std::move(e));
  }
  write_text(out_dir / "observations.jsonl", obs.str());
  write_text(out_dir / "coverage.jsonl", cov.str());
  write_text(out_dir / "truth.jsonl", truth.str());
  write_text(out_dir / "schedule.json", schedule.dump(2) + "\n");
  write_text(out_dir / "synth_config.json", to_json(config).dump(2) + "\n");
  out << "generated " << s.dataset.observations().size() << " observations for " << config.n_identities
      << " identities over " << config.n_days << " days\n";
  return 0;
}

int cmd_pipeline(const RunConfig& c, const fs::path& out_dir, std::ostream& out) {
  c.validate();
  Dataset ds = load_dataset(c);
  Provenance prov = make_provenance(c);
  PipelineResult result = run_pipeline(ds, c, prov);
  write_artifacts(result, out_dir);
  std::vector<SocialTraits> rows;
  for (const auto& w : result.wearers) rows.push_back(w.traits);
  out << render_table(rows);
  out << "fingerprint " << prov.fingerprint << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Re-identify people in egocentric photostreams and profile social behaviour."};
  app.require_subcommand(1);
  Flags f;

  auto* validate = app.add_subcommand("validate", "Check observation/coverage files and print per-day counts");
  auto* cluster = app.add_subcommand("cluster", "Cluster descriptors and apply the consistency filter");
  auto* segment_cmd = app.add_subcommand("segment", "Turn a clustering into interaction events");
  auto* profile = app.add_subcommand("profile", "Compute social traits from interactions");
  auto* eval = app.add_subcommand("eval", "Score clustering methods against ground truth");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic photostream with ground truth");
  auto* render = app.add_subcommand("render", "Render radar charts and the trait table");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts");

  for (auto* sub : {validate, cluster, segment_cmd, profile, eval, pipeline}) {
    sub->add_option("--obs", f.obs, "Observation file (JSON lines)")->required();
    sub->add_option("--coverage", f.coverage, "Coverage manifest (JSON lines)");
  }
  for (auto* sub : {cluster, segment_cmd, profile, eval, pipeline}) add_parameter_flags(sub, f);
  validate->add_option("--config", f.config, "JSON file whose keys override the flags");

  cluster->add_option("--out", f.out, "Output directory")->required();
  segment_cmd->add_option("--clustering", f.clustering, "clustering.jsonl from the cluster stage")->required();
  segment_cmd->add_option("--out", f.out, "Interactions file to write")->required();
  profile->add_option("--interactions", f.interactions, "interactions.jsonl from the segment stage")->required();
  profile->add_option("--out", f.out, "Traits report to write");
  eval->add_option("--truth", f.truth, "Ground-truth labels (JSON lines)")->required();
  eval->add_option("--methods", f.methods, "Comma-separated methods to compare")->capture_default_str();
  eval->add_option("--out", f.out, "Report file to write");
  eval->add_flag("--exclude-discarded", f.exclude_discarded, "Leave filtered-out observations unscored");
  synth->add_option("--config", f.config, "Synthetic config (JSON); default: 20 identities, 5 random days");
  synth->add_option("--seed", f.synth_seed, "Seed used when no config is given");
  synth->add_option("--out", f.out, "Output directory")->required();
  render->add_option("--traits", f.traits, "traits.json from the profile or pipeline stage")->required();
  render->add_option("--out", f.out, "Output directory")->required();
  pipeline->add_option("--out", f.out, "Output directory")->required();

  std::vector<std::string> argv_store{"egosocial"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*synth) return cmd_synth(f.config, f.synth_seed, f.out, out);
    if (*render) return cmd_render(f.traits, f.out, out);

    RunConfig c = resolve(f);
    if (!*validate) print_parameters(c, err);
    if (*validate) return cmd_validate(c, out);
    if (*cluster) return cmd_cluster(c, f.out, out);
    if (*segment_cmd) return cmd_segment(c, f.clustering, f.out, out);
    if (*profile) return cmd_profile(c, f.interactions, f.out, out);
    if (*eval) return cmd_eval(c, f.methods, f.out, out);
    if (*pipeline) return cmd_pipeline(c, f.out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace egosocial
