// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egosocial/clustering.hpp"
#include "egosocial/correlation.hpp"
#include "egosocial/ingest.hpp"

namespace egosocial {

struct ConsistencyThresholds {
  double robust_mean = 0.8;
  double reject_mean = 0.4;
  double member_min = 0.70;

  void validate() const;
};

enum class ClusterStatus { robust, pruned, rejected, singleton };
std::string_view to_string(ClusterStatus status);

struct ClusterVerdict {
  std::size_t cluster_id = 0;  // id in the input clustering
  std::size_t size = 0;
  std::optional<double> mean_pairwise_r;  // before pruning; empty when undefined
  std::optional<double> final_mean_r;     // after pruning
  ClusterStatus status = ClusterStatus::singleton;
  std::vector<std::size_t> removed_members;  // observation indices
  int filtered_id = Clustering::kDiscarded;  // id in the filtered clustering
};

struct ConsistencyReport {
  ConsistencyThresholds thresholds;
  std::vector<ClusterVerdict> clusters;
};

struct ConsistencyResult {
  Clustering clustering;
  ConsistencyReport report;
};

/// Pairwise Pearson matrix of the rows of `members`. Pairs involving a constant row
/// are NaN (undefined). The diagonal is 1 for non-constant rows.
template <typename Derived>
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixBase<Derived>& members) {
  const Eigen::Index n = members.rows();
  Eigen::MatrixXd z(members.cols(), n);
  std::vector<char> valid(static_cast<std::size_t>(n), 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      z.col(i) = standardized(members.row(i).transpose().template cast<double>());
    } catch (const UndefinedCorrelation&) {
      z.col(i).setZero();
      valid[i] = 0;
    }
  }
  Eigen::MatrixXd r = (z.transpose() * z).cwiseMax(-1.0).cwiseMin(1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (valid[i]) continue;
    r.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
    r.col(i).setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

/// Mean Pearson correlation over all unordered member pairs. Pairs with a constant
/// member are skipped; empty when fewer than two members or no defined pair remains.
template <typename Derived>
std::optional<double> cluster_mean_correlation(const Eigen::MatrixBase<Derived>& members) {
  if (members.rows() < 2) return std::nullopt;
  const Eigen::MatrixXd r = correlation_matrix(members);
  double sum = 0.0;
  long pairs = 0;
  for (Eigen::Index j = 0; j < r.cols(); ++j)
    for (Eigen::Index i = j + 1; i < r.rows(); ++i)
      if (!std::isnan(r(i, j))) sum += r(i, j), ++pairs;
  if (pairs == 0) return std::nullopt;
  return sum / static_cast<double>(pairs);
}

/// Scores every cluster and applies the robust / prune / reject rule:
///   mean >= robust_mean          -> robust, untouched
///   mean <  reject_mean          -> rejected, every member discarded
///   otherwise                    -> repeatedly drop the member with the lowest mean
///                                   correlation to the rest while it is < member_min;
///                                   pruned if >= 2 members survive with mean >= reject_mean,
///                                   else rejected
///   single member                -> singleton, kept
/// Dropped observations move to the clustering's discarded pool; survivors are
/// renumbered densely. A cluster whose mean is undefined (constant members only) is rejected.
ConsistencyResult apply_consistency(const Clustering& clustering, std::span<const FaceObservation> observations,
                                    const ConsistencyThresholds& thresholds);

nlohmann::ordered_json to_json(const ConsistencyReport& report, std::span<const FaceObservation> observations);

}  // namespace egosocial
