// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0
//
// Slow, independent reference implementations used only by tests.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using BigFloat = boost::multiprecision::cpp_dec_float_50;

/// Pearson r straight from the textbook sum formula, in 50-digit decimal arithmetic.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  BigFloat mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += BigFloat(x[i]), my += BigFloat(y[i]);
  mx /= n;
  my /= n;
  BigFloat sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    BigFloat dx = BigFloat(x[i]) - mx, dy = BigFloat(y[i]) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return static_cast<double>(sxy / sqrt(sxx * syy));
}

/// Euclidean distance matrix by explicit loops over coordinates.
inline std::vector<std::vector<double>> distances(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < points[i].size(); ++k) s += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      d[i][j] = std::sqrt(s);
    }
  return d;
}

/// Average linkage recomputed from scratch every round: the mean of all original
/// cross-pair distances, merging while the closest pair is within `cut`.
/// Returns one label per point, labelled by the smallest member of its cluster.
inline std::vector<int> average_linkage(const std::vector<std::vector<double>>& d, double cut) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < d.size(); ++i) clusters.push_back({i});
  while (clusters.size() > 1) {
    double best = INFINITY;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double s = 0;
        for (auto i : clusters[a])
          for (auto j : clusters[b]) s += d[i][j];
        s /= double(clusters[a].size() * clusters[b].size());
        if (s < best) best = s, ba = a, bb = b;
      }
    if (best > cut) break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<long>(bb));
  }
  std::vector<int> labels(d.size());
  for (const auto& c : clusters) {
    const auto smallest = *std::min_element(c.begin(), c.end());
    for (auto i : c) labels[i] = static_cast<int>(smallest);
  }
  return labels;
}

/// Canonical form of a labelling: ids renumbered by first appearance.
inline std::vector<int> canonical(std::span<const int> labels) {
  std::map<int, int> ids;
  std::vector<int> out;
  for (int l : labels) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
  return out;
}

struct PairCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Enumerates every unordered pair. Negative truth labels are skipped.
inline PairCounts count_pairs(std::span<const int> predicted, std::span<const int> truth) {
  PairCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (truth[i] < 0) continue;
    for (std::size_t j = i + 1; j < predicted.size(); ++j) {
      if (truth[j] < 0) continue;
      const bool same_p = predicted[i] == predicted[j];
      const bool same_t = truth[i] == truth[j];
      if (same_p && same_t) ++c.tp;
      else if (same_p) ++c.fp;
      else if (same_t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

/// A scripted encounter in whole seconds since local midnight.
struct Event {
  int identity;
  int day;
  long start;
  long end;
};

struct DayTally {
  int persons = 0;
  int interactions = 0;
  double interaction_minutes = 0;  // sum of event spans
  long occupied_seconds = 0;       // seconds covered by at least one event
  long coverage_seconds = 0;
};

/// Per-day tally by marking every covered second of the day in a bitmap.
/// Events are assumed to be separate interactions (no same-person re-meeting
/// within the gap tolerance).
inline std::map<int, DayTally> tally(std::span<const Event> events, std::map<int, std::pair<long, long>> coverage) {
  std::map<int, DayTally> out;
  for (const auto& [day, window] : coverage) {
    DayTally t;
    t.coverage_seconds = window.second - window.first;
    std::vector<char> busy(86400, 0);
    std::set<int> people;
    for (const auto& e : events) {
      if (e.day != day) continue;
      people.insert(e.identity);
      ++t.interactions;
      t.interaction_minutes += double(e.end - e.start) / 60.0;
      for (long s = e.start; s < e.end; ++s) busy[s] = 1;
    }
    t.persons = static_cast<int>(people.size());
    for (long s = window.first; s < window.second; ++s) t.occupied_seconds += busy[s];
    out[day] = t;
  }
  return out;
}

}  // namespace oracle
