// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/evaluation.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace egosocial {

namespace {

std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

GroundTruth read_truth(std::istream& in) {
  GroundTruth truth;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto r = nlohmann::json::parse(text);
      ObservationKey key{r.at("wearer_id").get<std::string>(), r.at("image_id").get<std::string>(),
                         r.at("face_index").get<int>()};
      if (!truth.labels.emplace(key, r.at("label").get<std::string>()).second)
        throw FormatError("duplicate label for " + key.str(), line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad truth record: ") + e.what(), line);
    }
  }
  return truth;
}

void write_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& [key, label] : truth.labels) {
    nlohmann::ordered_json r;
    r["wearer_id"] = key.wearer_id;
    r["image_id"] = key.image_id;
    r["face_index"] = key.face_index;
    r["label"] = label;
    out << r.dump() << '\n';
  }
}

EvalReport pairwise_prf(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("pairwise_prf: label vectors differ in length");
  std::map<std::pair<int, int>, std::int64_t> joint;
  std::map<int, std::int64_t> cluster_size, class_size;
  EvalReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (truth[i] < 0) continue;
    if (predicted[i] < 0) throw std::invalid_argument("pairwise_prf: predicted labels must be non-negative");
    ++joint[{predicted[i], truth[i]}];
    ++cluster_size[predicted[i]];
    ++class_size[truth[i]];
    ++r.n_scored;
  }

  std::int64_t same_both = 0, same_cluster = 0, same_class = 0;
  for (const auto& [key, n] : joint) same_both += choose2(n);
  for (const auto& [key, n] : cluster_size) same_cluster += choose2(n);
  for (const auto& [key, n] : class_size) same_class += choose2(n);
  r.tp = same_both;
  r.fp = same_cluster - same_both;
  r.fn = same_class - same_both;
  r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 1.0;
  r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 1.0;
  r.f_measure = harmonic(r.precision, r.recall);

  if (r.n_scored > 0) {
    // Every item in cell (c, k) shares the same BCubed precision and recall.
    double bp = 0.0, br = 0.0;
    for (const auto& [key, n] : joint) {
      const double cell = static_cast<double>(n);
      bp += cell * cell / static_cast<double>(cluster_size[key.first]);
      br += cell * cell / static_cast<double>(class_size[key.second]);
    }
    r.bcubed_precision = bp / static_cast<double>(r.n_scored);
    r.bcubed_recall = br / static_cast<double>(r.n_scored);
    r.bcubed_f = harmonic(r.bcubed_precision, r.bcubed_recall);
  }
  return r;
}

EvalReport pairwise_prf(const Clustering& clustering, std::span<const FaceObservation> observations,
                        const GroundTruth& truth, DiscardPolicy policy) {
  if (clustering.size() != observations.size())
    throw std::invalid_argument("clustering does not match the observation count");

  std::map<ObservationKey, std::size_t> index;
  for (std::size_t i = 0; i < observations.size(); ++i) index.emplace(observations[i].key(), i);
  for (const auto& [key, label] : truth.labels)
    if (!index.count(key)) throw ValidationError("labelled observation " + key.str() + " is missing from the clustering");

  std::map<std::string, int> class_ids;
  std::vector<int> predicted(observations.size()), classes(observations.size(), -1);
  int next_singleton = static_cast<int>(clustering.cluster_count());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    auto it = truth.labels.find(observations[i].key());
    if (it == truth.labels.end()) throw ValidationError("no ground-truth label for " + observations[i].key().str());
    const bool discarded = clustering.assignment[i] == Clustering::kDiscarded;
    predicted[i] = discarded ? next_singleton++ : clustering.assignment[i];
    if (it->second == GroundTruth::kUnknown || (discarded && policy == DiscardPolicy::exclude)) continue;
    classes[i] = class_ids.try_emplace(it->second, static_cast<int>(class_ids.size())).first->second;
  }
  return pairwise_prf(predicted, classes);
}

std::vector<MethodScore> evaluate_methods(std::span<const FaceObservation> observations, const GroundTruth& truth,
                                          std::span<const MethodSpec> specs, const ConsistencyThresholds& thresholds,
                                          DiscardPolicy policy) {
  std::vector<MethodScore> out;
  for (const auto& spec : specs) {
    Clustering raw = cluster_observations(observations, spec);
    ConsistencyResult filtered = apply_consistency(raw, observations, thresholds);
    MethodScore s;
    s.method = spec.method;
    s.report = pairwise_prf(filtered.clustering, observations, truth, policy);
    s.clusters = filtered.clustering.cluster_count();
    s.discarded = filtered.clustering.discarded.size();
    out.push_back(s);
  }
  return out;
}

std::string render_eval_table(std::span<const MethodScore> scores) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s | %9s | %9s | %9s | %8s | %9s\n", "Method", "Precision", "Recall",
                "F-Measure", "Clusters", "Discarded");
  out += buf;
  out += std::string(70, '-') + '\n';
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof buf, "%-10s | %9.2f | %9.2f | %9.2f | %8zu | %9zu\n",
                  std::string(to_string(s.method)).c_str(), 100.0 * s.report.precision, 100.0 * s.report.recall,
                  100.0 * s.report.f_measure, s.clusters, s.discarded);
    out += buf;
  }
  return out;
}

nlohmann::ordered_json to_json(const MethodScore& s) {
  nlohmann::ordered_json j;
  j["method"] = to_string(s.method);
  j["precision"] = s.report.precision;
  j["recall"] = s.report.recall;
  j["f_measure"] = s.report.f_measure;
  j["tp"] = s.report.tp;
  j["fp"] = s.report.fp;
  j["fn"] = s.report.fn;
  j["n_scored"] = s.report.n_scored;
  j["bcubed"] = {{"precision", s.report.bcubed_precision},
                 {"recall", s.report.bcubed_recall},
                 {"f_measure", s.report.bcubed_f}};
  j["clusters"] = s.clusters;
  j["discarded"] = s.discarded;
  return j;
}

}  // namespace egosocial
