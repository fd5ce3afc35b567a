// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/clustering.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace egosocial {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  /// The smaller root survives, so roots stay the smallest member index.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }
  std::vector<int> labels() {
    std::vector<int> out(parent_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(find(i));
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_distances(const DistanceMatrix& dist) {
  const auto& e = dist.entries;
  if (e.rows() != e.cols()) throw std::invalid_argument("distance matrix must be square");
  if (!e.allFinite()) throw std::invalid_argument("distance matrix has non-finite entries");
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    if (e(j, j) != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
    for (Eigen::Index i = j + 1; i < e.rows(); ++i)
      if (e(i, j) != e(j, i) || e(i, j) < 0.0)
        throw std::invalid_argument("distance matrix must be symmetric and non-negative");
  }
}

}  // namespace

std::string format_param(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::euclidean: return "euclidean";
    case Metric::cosine: return "cosine";
    case Metric::correlation: return "correlation";
  }
  return "?";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ahc: return "ahc";
    case Method::meanshift: return "meanshift";
    case Method::spectral: return "spectral";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "cosine") return Metric::cosine;
  if (name == "correlation") return Metric::correlation;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  if (name == "ahc") return Method::ahc;
  if (name == "meanshift") return Method::meanshift;
  if (name == "spectral") return Method::spectral;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

DistanceMatrix compute_distances(std::span<const FaceObservation> observations, Metric metric, bool normalize) {
  return compute_distances(descriptor_matrix(observations), metric, normalize);
}

Clustering Clustering::from_labels(std::span<const int> labels, Method method,
                                   std::map<std::string, std::string> params) {
  Clustering c;
  c.method = method;
  c.params = std::move(params);
  c.assignment.assign(labels.size(), kDiscarded);
  std::unordered_map<int, int> dense;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      c.discarded.push_back(i);
      continue;
    }
    auto [it, fresh] = dense.try_emplace(labels[i], static_cast<int>(c.clusters.size()));
    if (fresh) c.clusters.emplace_back();
    c.assignment[i] = it->second;
    c.clusters[static_cast<std::size_t>(it->second)].push_back(i);
  }
  return c;
}

void Clustering::validate() const {
  std::vector<int> seen(assignment.size(), 0);
  for (std::size_t id = 0; id < clusters.size(); ++id) {
    if (clusters[id].empty()) throw ValidationError("cluster " + std::to_string(id) + " is empty");
    for (std::size_t m : clusters[id]) {
      if (m >= assignment.size()) throw ValidationError("cluster member out of range");
      if (assignment[m] != static_cast<int>(id))
        throw ValidationError("assignment of " + std::to_string(m) + " disagrees with cluster " + std::to_string(id));
      ++seen[m];
    }
  }
  for (std::size_t m : discarded) {
    if (m >= assignment.size()) throw ValidationError("discarded member out of range");
    if (assignment[m] != kDiscarded) throw ValidationError("discarded member " + std::to_string(m) + " is assigned");
    ++seen[m];
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i] != 1) throw ValidationError("observation " + std::to_string(i) + " not placed exactly once");
}

bool same_partition(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) return false;
  auto ca = Clustering::from_labels(a.assignment, a.method);
  auto cb = Clustering::from_labels(b.assignment, b.method);
  return ca.clusters == cb.clusters && ca.discarded == cb.discarded;
}

void AhcParams::validate() const {
  if (!(cut_threshold > 0.0)) throw std::invalid_argument("cut_threshold must be positive");
}

std::vector<Merge> average_linkage(const DistanceMatrix& dist) {
  check_distances(dist);
  const Eigen::Index n = dist.size();
  Eigen::MatrixXd d = dist.entries;
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  std::vector<char> active(static_cast<std::size_t>(n), 1);

  // Cached nearest neighbour of each active cluster among active clusters with a
  // larger representative; strict '<' while scanning keeps the smallest index on ties.
  std::vector<Eigen::Index> nn(static_cast<std::size_t>(n), -1);
  std::vector<double> nnd(static_cast<std::size_t>(n), kInf);
  auto refresh = [&](Eigen::Index i) {
    Eigen::Index best = -1;
    double best_d = kInf;
    for (Eigen::Index k = i + 1; k < n; ++k)
      if (active[k] && d(k, i) < best_d) best_d = d(k, i), best = k;
    nn[i] = best;
    nnd[i] = best_d;
  };
  for (Eigen::Index i = 0; i < n; ++i) refresh(i);

  std::vector<Merge> merges;
  merges.reserve(n > 0 ? static_cast<std::size_t>(n - 1) : 0);
  while (true) {
    Eigen::Index a = -1;
    double height = kInf;
    for (Eigen::Index i = 0; i < n; ++i)
      if (active[i] && nn[i] >= 0 && nnd[i] < height) height = nnd[i], a = i;
    if (a < 0) break;
    const Eigen::Index b = nn[a];
    merges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), height});

    const double wa = weight[a], wb = weight[b];
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double v = (wa * d(k, a) + wb * d(k, b)) / (wa + wb);
      d(k, a) = v;
      d(a, k) = v;
    }
    active[b] = 0;
    weight[a] = wa + wb;

    for (Eigen::Index k = 0; k < a; ++k) {
      if (!active[k]) continue;
      if (nn[k] == a || nn[k] == b)
        refresh(k);
      else if (d(k, a) < nnd[k] || (d(k, a) == nnd[k] && a < nn[k]))
        nn[k] = a, nnd[k] = d(k, a);
    }
    for (Eigen::Index k = a + 1; k < b; ++k)
      if (active[k] && nn[k] == b) refresh(k);
    refresh(a);
  }
  return merges;
}

Clustering cut_dendrogram(std::size_t n, std::span<const Merge> merges, double cut) {
  DisjointSets sets(n);
  for (const Merge& m : merges) {
    if (m.height > cut) break;
    sets.unite(m.first, m.second);
  }
  auto labels = sets.labels();
  return Clustering::from_labels(labels, Method::ahc);
}

Clustering ahc_average_linkage(const DistanceMatrix& dist, const AhcParams& params) {
  params.validate();
  auto merges = average_linkage(dist);
  Clustering c = cut_dendrogram(static_cast<std::size_t>(dist.size()), merges, params.cut_threshold);
  c.params = {{"linkage", "average"},
              {"metric", std::string(to_string(params.metric))},
              {"cut_threshold", format_param(params.cut_threshold)},
              {"normalize", params.normalize_descriptors ? "true" : "false"}};
  return c;
}

Clustering cluster_ahc(std::span<const FaceObservation> observations, const AhcParams& params) {
  params.validate();
  if (observations.empty()) {
    Clustering c;
    c.method = Method::ahc;
    return c;
  }
  return ahc_average_linkage(compute_distances(observations, params.metric, params.normalize_descriptors), params);
}

// ---------------------------------------------------------------------------

double median_pairwise_distance(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::size_t max_points) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (n < 2) throw std::invalid_argument("median_pairwise_distance needs at least two points");
  const std::size_t stride = (n + max_points - 1) / max_points;
  std::vector<Eigen::Index> picks;
  for (std::size_t i = 0; i < n && picks.size() < max_points; i += stride) picks.push_back(static_cast<Eigen::Index>(i));
  if (picks.size() < 2) picks = {0, static_cast<Eigen::Index>(n - 1)};

  std::vector<double> d;
  d.reserve(picks.size() * (picks.size() - 1) / 2);
  for (std::size_t i = 0; i < picks.size(); ++i)
    for (std::size_t j = i + 1; j < picks.size(); ++j) d.push_back((rows.row(picks[i]) - rows.row(picks[j])).norm());
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double hi = d[mid];
  if (d.size() % 2 == 1) return hi;
  double lo = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

MeanShiftResult meanshift(const Eigen::Ref<const Eigen::MatrixXd>& rows, const MeanShiftParams& params) {
  if (!(params.bandwidth > 0.0)) throw std::invalid_argument("meanshift bandwidth must be positive");
  if (params.max_iter < 1) throw std::invalid_argument("meanshift max_iter must be at least 1");
  if (!(params.tol > 0.0)) throw std::invalid_argument("meanshift tol must be positive");

  const Eigen::Index n = rows.rows();
  const Eigen::MatrixXd points = rows.transpose();
  const double radius2 = params.bandwidth * params.bandwidth;

  MeanShiftResult result;
  result.modes.resize(n, rows.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = points.col(i);
    bool converged = false;
    for (int it = 0; it < params.max_iter; ++it) {
      const Eigen::RowVectorXd d2 = (points.colwise() - x).colwise().squaredNorm();
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(points.rows());
      Eigen::Index count = 0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (d2(j) <= radius2) sum += points.col(j), ++count;
      if (count == 0) {
        converged = true;
        break;
      }
      Eigen::VectorXd next = sum / static_cast<double>(count);
      const double shift = (next - x).norm();
      x = std::move(next);
      if (shift < params.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) ++result.non_converged;
    result.modes.row(i) = x.transpose();
  }

  DisjointSets sets(static_cast<std::size_t>(n));
  const double join = 0.5 * params.bandwidth;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if ((result.modes.row(i) - result.modes.row(j)).norm() <= join)
        sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

  auto labels = sets.labels();
  result.clustering = Clustering::from_labels(labels, Method::meanshift,
                                              {{"bandwidth", format_param(params.bandwidth)},
                                               {"max_iter", std::to_string(params.max_iter)},
                                               {"tol", format_param(params.tol)},
                                               {"non_converged", std::to_string(result.non_converged)}});
  return result;
}

// ---------------------------------------------------------------------------

std::vector<int> kmeans(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k, std::uint64_t seed, int restarts,
                        int max_iter) {
  const Eigen::Index n = rows.rows();
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must be in [1, n]");
  const Eigen::MatrixXd points = rows.transpose();
  std::mt19937_64 rng(seed);

  std::vector<int> best;
  double best_inertia = kInf;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    // k-means++ seeding.
    Eigen::MatrixXd centers(points.rows(), k);
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    Eigen::Index first = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    centers.col(0) = points.col(first);
    chosen[first] = 1;
    Eigen::VectorXd closest = (points.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c) {
      Eigen::Index pick = -1;
      if (closest.sum() > 0.0) {
        std::discrete_distribution<Eigen::Index> draw(closest.data(), closest.data() + n);
        pick = draw(rng);
      } else {
        std::vector<Eigen::Index> free;
        for (Eigen::Index i = 0; i < n; ++i)
          if (!chosen[i]) free.push_back(i);
        pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
      }
      chosen[pick] = 1;
      centers.col(c) = points.col(pick);
      closest = closest.cwiseMin((points.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    Eigen::VectorXd dist(n);
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index c;
        dist(i) = (centers.colwise() - points.col(i)).colwise().squaredNorm().minCoeff(&c);
        if (labels[i] != static_cast<int>(c)) labels[i] = static_cast<int>(c), changed = true;
      }
      if (!changed && it > 0) break;

      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
      Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
      for (Eigen::Index i = 0; i < n; ++i) sums.col(labels[i]) += points.col(i), ++counts(labels[i]);
      for (int c = 0; c < k; ++c) {
        if (counts(c) > 0) {
          centers.col(c) = sums.col(c) / counts(c);
        } else {
          // Empty cluster: restart it on the worst-served point.
          Eigen::Index far;
          dist.maxCoeff(&far);
          centers.col(c) = points.col(far);
          dist(far) = 0.0;
        }
      }
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) inertia += (points.col(i) - centers.col(labels[i])).squaredNorm();
    if (inertia < best_inertia) best_inertia = inertia, best = labels;
  }
  return best;
}

Clustering spectral(const Eigen::Ref<const Eigen::MatrixXd>& rows, const SpectralParams& params) {
  const Eigen::Index n = rows.rows();
  if (params.k < 1 || params.k > n) throw std::invalid_argument("spectral: k must be in [1, n]");
  if (!(params.affinity_scale > 0.0)) throw std::invalid_argument("spectral: affinity_scale must be positive");
  std::map<std::string, std::string> record{{"k", std::to_string(params.k)},
                                            {"affinity_scale", format_param(params.affinity_scale)},
                                            {"seed", std::to_string(params.seed)}};

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  if (params.k == n) {
    std::iota(labels.begin(), labels.end(), 0);
    return Clustering::from_labels(labels, Method::spectral, std::move(record));
  }
  if (params.k == 1) return Clustering::from_labels(labels, Method::spectral, std::move(record));

  const Eigen::MatrixXd points = rows.transpose();
  const double denom = 2.0 * params.affinity_scale * params.affinity_scale;
  Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double a = std::exp(-(points.col(i) - points.col(j)).squaredNorm() / denom);
      affinity(i, j) = a;
      affinity(j, i) = a;
    }
  Eigen::VectorXd inv_sqrt_degree = affinity.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    inv_sqrt_degree(i) = inv_sqrt_degree(i) > 0.0 ? 1.0 / std::sqrt(inv_sqrt_degree(i)) : 0.0;

  Eigen::MatrixXd laplacian = -(inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal());
  laplacian.diagonal().array() += 1.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) throw NumericError("spectral: eigen decomposition did not converge");

  Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(params.k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  labels = kmeans(embedding, params.k, params.seed, params.kmeans_restarts, params.kmeans_max_iter);
  return Clustering::from_labels(labels, Method::spectral, std::move(record));
}

// ---------------------------------------------------------------------------

void write_clustering(std::ostream& out, const std::string& wearer_id, std::span<const FaceObservation> observations,
                      const Clustering& clustering) {
  if (clustering.size() != observations.size())
    throw std::invalid_argument("clustering does not match the observation count");
  nlohmann::ordered_json header;
  header["record"] = "clustering";
  header["wearer_id"] = wearer_id;
  header["method"] = to_string(clustering.method);
  header["params"] = clustering.params;
  header["observations"] = clustering.size();
  header["clusters"] = clustering.cluster_count();
  header["discarded"] = clustering.discarded.size();
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < observations.size(); ++i) {
    nlohmann::ordered_json r;
    r["image_id"] = observations[i].image_id;
    r["face_index"] = observations[i].face_index;
    r["cluster"] = clustering.assignment[i];
    out << r.dump() << '\n';
  }
}

std::map<std::string, Clustering> read_clusterings(std::istream& in, const Dataset& dataset) {
  std::map<std::string, Clustering> out;
  struct Block {
    std::string wearer;
    Method method = Method::ahc;
    std::map<std::string, std::string> params;
    std::map<std::pair<std::string, int>, std::size_t> index;
    std::vector<int> labels;
    std::vector<char> assigned;
    std::size_t header_line = 0;
  };
  std::optional<Block> block;

  auto finish = [&] {
    if (!block) return;
    for (std::size_t i = 0; i < block->assigned.size(); ++i)
      if (!block->assigned[i])
        throw FormatError("clustering block for '" + block->wearer + "' misses observation " + std::to_string(i),
                          block->header_line);
    out[block->wearer] = Clustering::from_labels(block->labels, block->method, std::move(block->params));
    block.reset();
  };

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json r;
    try {
      r = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("malformed record: ") + e.what(), line);
    }
    try {
      if (r.contains("record") && r.at("record") == "provenance") continue;
      if (r.contains("record")) {
        if (r.at("record") != "clustering") throw FormatError("unexpected record type", line);
        finish();
        Block b;
        b.wearer = r.at("wearer_id").get<std::string>();
        if (!dataset.has_wearer(b.wearer)) throw FormatError("unknown wearer '" + b.wearer + "'", line);
        if (out.count(b.wearer)) throw FormatError("second clustering block for '" + b.wearer + "'", line);
        b.method = parse_method(r.at("method").get<std::string>());
        b.params = r.value("params", nlohmann::json::object()).get<std::map<std::string, std::string>>();
        std::size_t idx = 0;
        for (const auto& o : dataset.observations())
          if (o.wearer_id == b.wearer) b.index[{o.image_id, o.face_index}] = idx++;
        b.labels.assign(idx, Clustering::kDiscarded);
        b.assigned.assign(idx, 0);
        b.header_line = line;
        block = std::move(b);
        continue;
      }
      if (!block) throw FormatError("assignment before any clustering header", line);
      std::pair<std::string, int> key{r.at("image_id").get<std::string>(), r.at("face_index").get<int>()};
      auto it = block->index.find(key);
      if (it == block->index.end())
        throw FormatError("unknown observation " + key.first + "#" + std::to_string(key.second), line);
      if (block->assigned[it->second])
        throw FormatError("duplicate observation " + key.first + "#" + std::to_string(key.second), line);
      int cluster = r.at("cluster").get<int>();
      if (cluster < Clustering::kDiscarded) throw FormatError("cluster id must be >= -1", line);
      block->labels[it->second] = cluster;
      block->assigned[it->second] = 1;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad clustering record: ") + e.what(), line);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what(), line);
    }
  }
  finish();
  return out;
}

}  // namespace egosocial

namespace egosocial {

Clustering cluster_observations(std::span<const FaceObservation> observations, const MethodSpec& spec) {
  if (spec.method == Method::ahc) return cluster_ahc(observations, spec.ahc);
  if (observations.empty()) {
    Clustering c;
    c.method = spec.method;
    return c;
  }
  Eigen::MatrixXd rows = descriptor_matrix(observations);
  if (spec.normalize_baselines) rows = normalized_rows(rows);
  auto auto_scale = [&] {
    if (rows.rows() < 2) return 1.0;
    const double d = median_pairwise_distance(rows);
    return d > 0.0 ? d : 1.0;
  };

  if (spec.method == Method::meanshift) {
    MeanShiftParams p = spec.meanshift;
    if (!(p.bandwidth > 0.0)) p.bandwidth = auto_scale();
    return meanshift(rows, p).clustering;
  }
  SpectralParams p = spec.spectral;
  if (p.k < 1) throw std::invalid_argument("spectral clustering needs an explicit k");
  if (!(p.affinity_scale > 0.0)) p.affinity_scale = auto_scale();
  return spectral(rows, p);
}

}  // namespace egosocial
