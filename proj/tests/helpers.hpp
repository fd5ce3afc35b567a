// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "egosocial/clustering.hpp"
#include "egosocial/ingest.hpp"
#include "egosocial/time.hpp"

namespace testing {

using namespace egosocial;
using namespace std::chrono_literals;

inline Date day0() { return parse_date("2017-03-06"); }

/// Observation at local `clock` on `day`, offset +01:00.
inline FaceObservation make_obs(const std::string& wearer, Date day, std::chrono::seconds clock, const std::string& image,
                                const Descriptor& d = Descriptor::Ones(), int face = 0) {
  FaceObservation o;
  o.wearer_id = wearer;
  o.day = day;
  o.timestamp = local_time(day, clock, 60min);
  o.image_id = image;
  o.face_index = face;
  o.descriptor = d;
  return o;
}

inline Descriptor random_descriptor(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Descriptor d;
  for (auto& v : d) v = g(rng);
  return d;
}

/// Row-major random points, one row per observation.
inline Eigen::MatrixXd random_rows(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dim) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = g(rng);
  return m;
}

/// Points around `k` well separated centers; returns rows and true labels.
inline std::pair<Eigen::MatrixXd, std::vector<int>> blobs(std::mt19937_64& rng, int k, int per, Eigen::Index dim,
                                                          double spread, double noise) {
  Eigen::MatrixXd centers = random_rows(rng, k, dim) * spread;
  std::normal_distribution<double> g(0.0, noise);
  Eigen::MatrixXd rows(k * per, dim);
  std::vector<int> labels;
  for (int c = 0; c < k; ++c)
    for (int p = 0; p < per; ++p) {
      for (Eigen::Index j = 0; j < dim; ++j) rows(c * per + p, j) = centers(c, j) + g(rng);
      labels.push_back(c);
    }
  return {rows, labels};
}

/// Random labelling of n items into at most k groups.
inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int k) {
  std::uniform_int_distribution<int> u(0, k - 1);
  std::vector<int> out(n);
  for (auto& l : out) l = u(rng);
  return out;
}

}  // namespace testing
