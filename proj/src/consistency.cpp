// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/consistency.hpp"

#include <algorithm>
#include <stdexcept>

namespace egosocial {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Mean of the defined entries of r(i, live \ {i}); -inf when none is defined.
double mean_to_rest(const Eigen::MatrixXd& r, const std::vector<Eigen::Index>& live, Eigen::Index i) {
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index j : live) {
    if (j == i || std::isnan(r(i, j))) continue;
    sum += r(i, j);
    ++count;
  }
  return count ? sum / static_cast<double>(count) : kNegInf;
}

std::optional<double> live_mean(const Eigen::MatrixXd& r, const std::vector<Eigen::Index>& live) {
  double sum = 0.0;
  long count = 0;
  for (std::size_t a = 0; a < live.size(); ++a)
    for (std::size_t b = a + 1; b < live.size(); ++b)
      if (!std::isnan(r(live[a], live[b]))) sum += r(live[a], live[b]), ++count;
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace

void ConsistencyThresholds::validate() const {
  if (!(-1.0 <= reject_mean && reject_mean < robust_mean && robust_mean <= 1.0))
    throw std::invalid_argument("thresholds need -1 <= reject_mean < robust_mean <= 1");
  if (!(-1.0 <= member_min && member_min <= 1.0)) throw std::invalid_argument("member_min must lie in [-1, 1]");
}

std::string_view to_string(ClusterStatus status) {
  switch (status) {
    case ClusterStatus::robust: return "robust";
    case ClusterStatus::pruned: return "pruned";
    case ClusterStatus::rejected: return "rejected";
    case ClusterStatus::singleton: return "singleton";
  }
  return "?";
}

ConsistencyResult apply_consistency(const Clustering& clustering, std::span<const FaceObservation> observations,
                                    const ConsistencyThresholds& thresholds) {
  thresholds.validate();
  if (clustering.size() != observations.size())
    throw std::invalid_argument("clustering does not match the observation count");
  clustering.validate();

  ConsistencyResult result;
  result.report.thresholds = thresholds;
  std::vector<int> labels = clustering.assignment;

  for (std::size_t id = 0; id < clustering.clusters.size(); ++id) {
    const auto& members = clustering.clusters[id];
    ClusterVerdict v;
    v.cluster_id = id;
    v.size = members.size();

    if (members.size() == 1) {
      v.status = ClusterStatus::singleton;
      result.report.clusters.push_back(std::move(v));
      continue;
    }

    Eigen::MatrixXd rows(static_cast<Eigen::Index>(members.size()), kDescriptorSize);
    for (std::size_t m = 0; m < members.size(); ++m)
      rows.row(static_cast<Eigen::Index>(m)) = observations[members[m]].descriptor.transpose();
    const Eigen::MatrixXd r = correlation_matrix(rows);

    std::vector<Eigen::Index> live(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) live[m] = static_cast<Eigen::Index>(m);
    v.mean_pairwise_r = live_mean(r, live);
    v.final_mean_r = v.mean_pairwise_r;

    const std::optional<double> m0 = v.mean_pairwise_r;
    if (m0 && *m0 >= thresholds.robust_mean) {
      v.status = ClusterStatus::robust;
    } else if (!m0 || *m0 < thresholds.reject_mean) {
      v.status = ClusterStatus::rejected;
    } else {
      while (live.size() >= 2) {
        std::size_t worst = 0;
        double worst_value = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < live.size(); ++a) {
          const double value = mean_to_rest(r, live, live[a]);
          if (value < worst_value) worst_value = value, worst = a;
        }
        if (!(worst_value < thresholds.member_min)) break;
        v.removed_members.push_back(members[static_cast<std::size_t>(live[worst])]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(worst));
      }
      v.final_mean_r = live.size() >= 2 ? live_mean(r, live) : std::nullopt;
      const bool kept = live.size() >= 2 && v.final_mean_r && *v.final_mean_r >= thresholds.reject_mean;
      v.status = kept ? ClusterStatus::pruned : ClusterStatus::rejected;
    }

    if (v.status == ClusterStatus::rejected) v.removed_members = members;
    for (std::size_t m : v.removed_members) labels[m] = Clustering::kDiscarded;
    std::sort(v.removed_members.begin(), v.removed_members.end());
    result.report.clusters.push_back(std::move(v));
  }

  auto params = clustering.params;
  params["robust_mean"] = format_param(thresholds.robust_mean);
  params["reject_mean"] = format_param(thresholds.reject_mean);
  params["member_min"] = format_param(thresholds.member_min);
  result.clustering = Clustering::from_labels(labels, clustering.method, std::move(params));

  for (auto& v : result.report.clusters) {
    if (v.status == ClusterStatus::rejected) continue;
    // Any surviving member carries the new id.
    for (std::size_t m : clustering.clusters[v.cluster_id]) {
      if (result.clustering.assignment[m] != Clustering::kDiscarded) {
        v.filtered_id = result.clustering.assignment[m];
        break;
      }
    }
  }
  return result;
}

nlohmann::ordered_json to_json(const ConsistencyReport& report, std::span<const FaceObservation> observations) {
  nlohmann::ordered_json out;
  out["thresholds"] = {{"robust_mean", report.thresholds.robust_mean},
                       {"reject_mean", report.thresholds.reject_mean},
                       {"member_min", report.thresholds.member_min}};
  auto clusters = nlohmann::ordered_json::array();
  for (const auto& v : report.clusters) {
    nlohmann::ordered_json c;
    c["cluster_id"] = v.cluster_id;
    c["size"] = v.size;
    c["mean_pairwise_r"] = v.mean_pairwise_r ? nlohmann::ordered_json(*v.mean_pairwise_r) : nullptr;
    c["final_mean_r"] = v.final_mean_r ? nlohmann::ordered_json(*v.final_mean_r) : nullptr;
    c["status"] = to_string(v.status);
    c["filtered_id"] = v.filtered_id;
    auto removed = nlohmann::ordered_json::array();
    for (std::size_t m : v.removed_members) removed.push_back(observations[m].key().str());
    c["removed_members"] = std::move(removed);
    clusters.push_back(std::move(c));
  }
  out["clusters"] = std::move(clusters);
  return out;
}

}  // namespace egosocial
