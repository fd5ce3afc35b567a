// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egosocial/correlation.hpp"
#include "egosocial/errors.hpp"
#include "egosocial/ingest.hpp"

namespace egosocial {

enum class Metric { euclidean, cosine, correlation };
enum class Method { ahc, meanshift, spectral };

/// Shortest text that parses back to the same double.
std::string format_param(double value);

std::string_view to_string(Metric metric);
std::string_view to_string(Method method);
/// Throws std::invalid_argument for unknown names.
Metric parse_metric(std::string_view name);
Method parse_method(std::string_view name);

/// Symmetric pairwise dissimilarities with a zero diagonal.
template <typename Scalar>
struct DistanceMatrixT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> entries;
  Metric metric = Metric::euclidean;

  Eigen::Index size() const { return entries.rows(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return entries(i, j); }
};
using DistanceMatrix = DistanceMatrixT<double>;

/// Rows of `rows` rescaled to unit L2 norm. Throws DegenerateVector for a zero row.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> normalized_rows(
    const Eigen::MatrixBase<Derived>& rows) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out = rows;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto norm = out.row(i).norm();
    if (!(norm > 0)) throw DegenerateVector("zero descriptor at observation " + std::to_string(i), std::size_t(i));
    out.row(i) /= norm;
  }
  return out;
}

/// Exact pairwise dissimilarities between the rows of `rows`.
///
/// euclidean is the L2 distance (of unit-normalized rows when `normalize`); cosine is
/// 1 - cos(x, y); correlation is 1 - pearson(x, y). The two similarity-based metrics
/// are evaluated as half the squared distance between the unit-normalized (resp.
/// standardized) rows, which is the same quantity and is exactly zero for identical
/// inputs. Throws DegenerateVector naming the offending row for zero rows under
/// cosine/normalized euclidean and constant rows under correlation.
template <typename Derived>
DistanceMatrixT<typename Derived::Scalar> compute_distances(const Eigen::MatrixBase<Derived>& rows, Metric metric,
                                                            bool normalize) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = rows.rows();
  if (n == 0) throw std::invalid_argument("compute_distances: no observations");

  // Column-major transpose so that each point is a contiguous column.
  Mat points;
  switch (metric) {
    case Metric::euclidean:
      points = normalize ? Mat(normalized_rows(rows).transpose()) : Mat(rows.transpose());
      break;
    case Metric::cosine:
      points = normalized_rows(rows).transpose();
      break;
    case Metric::correlation:
      points.resize(rows.cols(), n);
      for (Eigen::Index i = 0; i < n; ++i) {
        try {
          points.col(i) = standardized(rows.row(i).transpose());
        } catch (const UndefinedCorrelation&) {
          throw DegenerateVector("constant descriptor at observation " + std::to_string(i), std::size_t(i));
        }
      }
      break;
  }

  DistanceMatrixT<Scalar> out;
  out.metric = metric;
  out.entries = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Scalar d = (points.col(i) - points.col(j)).norm();
      if (metric != Metric::euclidean) d = Scalar(0.5) * d * d;
      out.entries(i, j) = d;
      out.entries(j, i) = d;
    }
  }
  return out;
}

DistanceMatrix compute_distances(std::span<const FaceObservation> observations, Metric metric, bool normalize);

/// A partition of observation indices [0, n) into dense cluster ids, plus an
/// optional pool of observations removed by the consistency filter.
struct Clustering {
  static constexpr int kDiscarded = -1;

  std::vector<int> assignment;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> discarded;
  Method method = Method::ahc;
  std::map<std::string, std::string> params;

  std::size_t size() const { return assignment.size(); }
  std::size_t cluster_count() const { return clusters.size(); }

  /// Canonical clustering from raw labels: ids are renumbered densely in order of each
  /// cluster's smallest member, members are ascending, negative labels go to `discarded`.
  static Clustering from_labels(std::span<const int> labels, Method method,
                                std::map<std::string, std::string> params = {});

  /// Throws ValidationError when assignment and clusters disagree.
  void validate() const;

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// True when both partitions group indices identically (ids may differ).
bool same_partition(const Clustering& a, const Clustering& b);

// ---------------------------------------------------------------------------
// Average-linkage agglomerative clustering

struct AhcParams {
  Metric metric = Metric::euclidean;
  double cut_threshold = 0.9;
  bool normalize_descriptors = true;

  void validate() const;
};

/// One dendrogram step: clusters represented by their smallest member index.
struct Merge {
  std::size_t first;
  std::size_t second;
  double height;
};

/// Full greedy average-linkage (UPGMA) dendrogram. At every step merges the pair of
/// clusters with the smallest mean cross-pair dissimilarity; ties go to the
/// lexicographically smallest (first, second) representative pair.
std::vector<Merge> average_linkage(const DistanceMatrix& dist);

/// Replays `merges` in order and stops before the first one higher than `cut`.
Clustering cut_dendrogram(std::size_t n, std::span<const Merge> merges, double cut);

Clustering ahc_average_linkage(const DistanceMatrix& dist, const AhcParams& params);
Clustering cluster_ahc(std::span<const FaceObservation> observations, const AhcParams& params);

// ---------------------------------------------------------------------------
// Baselines

struct MeanShiftParams {
  double bandwidth = 0.0;
  int max_iter = 300;
  double tol = 1e-6;
};

struct MeanShiftResult {
  Clustering clustering;
  Eigen::MatrixXd modes;
  std::size_t non_converged = 0;
};

/// Flat-kernel mean shift from every point; converged modes closer than half the
/// bandwidth are joined (transitively). Points that do not converge within
/// `max_iter` keep their last mode and are counted in `non_converged`.
MeanShiftResult meanshift(const Eigen::Ref<const Eigen::MatrixXd>& rows, const MeanShiftParams& params);

/// Median pairwise euclidean distance over an evenly strided subsample of at most
/// `max_points` rows. Used as the default mean-shift bandwidth.
double median_pairwise_distance(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::size_t max_points = 500);

struct SpectralParams {
  int k = 0;
  double affinity_scale = 0.0;
  std::uint64_t seed = 0;
  int kmeans_restarts = 10;
  int kmeans_max_iter = 300;
};

/// Normalized spectral clustering: Gaussian affinity, symmetric normalized Laplacian,
/// row-normalized embedding of the k smallest eigenvectors, seeded k-means++.
/// Throws NumericError if the eigen solver fails.
Clustering spectral(const Eigen::Ref<const Eigen::MatrixXd>& rows, const SpectralParams& params);

/// Seeded k-means (k-means++ init, Lloyd iterations, best of `restarts`).
std::vector<int> kmeans(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k, std::uint64_t seed, int restarts,
                        int max_iter);

// ---------------------------------------------------------------------------
/// Method selection for the pipeline and the evaluation table.
struct MethodSpec {
  Method method = Method::ahc;
  AhcParams ahc;
  MeanShiftParams meanshift;  // bandwidth <= 0 picks median_pairwise_distance
  SpectralParams spectral;    // affinity_scale <= 0 picks median_pairwise_distance; k is required
  bool normalize_baselines = true;  // unit-normalize rows before mean shift / spectral
};

/// Runs the selected method. An empty input gives an empty clustering.
Clustering cluster_observations(std::span<const FaceObservation> observations, const MethodSpec& spec);

// ---------------------------------------------------------------------------
// Serialization. A block is one header line (wearer, method, params) followed by
// one line per observation mapping its key to a cluster id (-1 = discarded).

void write_clustering(std::ostream& out, const std::string& wearer_id, std::span<const FaceObservation> observations,
                      const Clustering& clustering);
/// Reads consecutive blocks, resolving each block's keys against that wearer's
/// observations in `dataset`. Throws FormatError for unknown, duplicate or missing keys.
std::map<std::string, Clustering> read_clusterings(std::istream& in, const Dataset& dataset);

}  // namespace egosocial
