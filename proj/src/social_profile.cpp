// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/social_profile.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "egosocial/errors.hpp"

namespace egosocial {

SocialTraits compute_traits(std::span<const Interaction> interactions, std::span<const DayCoverage> coverage,
                            const std::string& wearer_id) {
  struct Day {
    const DayCoverage* coverage = nullptr;
    std::set<int> persons;
    long count = 0;
    double minutes = 0.0;
  };
  std::map<Date, Day> days;
  for (const auto& c : coverage)
    if (c.wearer_id == wearer_id) days[c.day].coverage = &c;
  if (days.empty()) throw ValidationError("no coverage for wearer '" + wearer_id + "'");

  std::vector<Interaction> own;
  for (const auto& it : interactions) {
    if (it.wearer_id != wearer_id) continue;
    auto found = days.find(it.day);
    if (found == days.end())
      throw ValidationError("no coverage for " + wearer_id + " on " + format_date(it.day));
    const DayCoverage& c = *found->second.coverage;
    if (it.start.utc < c.start.utc || c.end.utc < it.end.utc)
      throw ValidationError("interaction on " + format_date(it.day) + " lies outside the recorded span");
    found->second.persons.insert(it.person_cluster_id);
    ++found->second.count;
    found->second.minutes += it.duration_minutes();
    own.push_back(it);
  }

  SocialTraits t;
  t.wearer_id = wearer_id;
  t.days_analyzed = static_cast<int>(days.size());
  double persons = 0.0, count = 0.0, minutes = 0.0, alone = 0.0, per_person = 0.0;
  int days_with_company = 0;
  for (const auto& [date, d] : days) {
    persons += static_cast<double>(d.persons.size());
    count += static_cast<double>(d.count);
    minutes += d.minutes;
    double together = 0.0;
    for (const auto& span : daily_interaction_timeline(own, wearer_id, date)) together += span.minutes();
    alone += d.coverage->minutes() - together;
    if (!d.persons.empty()) {
      per_person += d.minutes / static_cast<double>(d.persons.size());
      ++days_with_company;
    }
  }
  const double n = static_cast<double>(days.size());
  t.num_p_day = persons / n;
  t.inter_day = count / n;
  t.t_alone = alone / n;
  t.no_interactions = count == 0.0;
  t.t_inter = t.no_interactions ? 0.0 : minutes / count;
  t.t_p = days_with_company ? per_person / days_with_company : 0.0;
  return t;
}

AxisVector trait_vector(const SocialTraits& t) { return {t.num_p_day, t.inter_day, t.t_inter, t.t_p, t.t_alone}; }

std::vector<SocialProfile> build_profiles(std::span<const SocialTraits> traits, const std::string& provenance) {
  std::vector<SocialProfile> out;
  if (traits.empty()) return out;
  AxisVector lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& t : traits) {
    const auto v = trait_vector(t);
    for (std::size_t a = 0; a < kAxisCount; ++a) lo[a] = std::min(lo[a], v[a]), hi[a] = std::max(hi[a], v[a]);
  }
  for (const auto& t : traits) {
    SocialProfile p;
    p.traits = t;
    p.provenance = provenance;
    const auto v = trait_vector(t);
    for (std::size_t a = 0; a < kAxisCount; ++a) {
      const double span = hi[a] - lo[a];
      double x = span > 0.0 ? (v[a] - lo[a]) / span : 0.5;
      if (a == kAxisCount - 1) x = 1.0 - x;
      p.axes[a] = std::clamp(x, 0.0, 1.0);
    }
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::ordered_json to_json(const SocialTraits& t) {
  nlohmann::ordered_json j;
  j["wearer_id"] = t.wearer_id;
  j["num_p_day"] = t.num_p_day;
  j["inter_day"] = t.inter_day;
  j["t_inter"] = t.t_inter;
  j["t_p"] = t.t_p;
  j["t_alone"] = t.t_alone;
  j["days_analyzed"] = t.days_analyzed;
  j["no_interactions"] = t.no_interactions;
  return j;
}

SocialTraits traits_from_json(const nlohmann::json& j) {
  try {
    SocialTraits t;
    t.wearer_id = j.at("wearer_id").get<std::string>();
    t.num_p_day = j.at("num_p_day").get<double>();
    t.inter_day = j.at("inter_day").get<double>();
    t.t_inter = j.at("t_inter").get<double>();
    t.t_p = j.at("t_p").get<double>();
    t.t_alone = j.at("t_alone").get<double>();
    t.days_analyzed = j.value("days_analyzed", 0);
    t.no_interactions = j.value("no_interactions", t.inter_day == 0.0);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad traits record: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const SocialProfile& p) {
  nlohmann::ordered_json j;
  j["traits"] = to_json(p.traits);
  auto axes = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < kAxisCount; ++a) axes.push_back({{"axis", kAxisLabels[a]}, {"value", p.axes[a]}});
  j["normalized_axes"] = std::move(axes);
  j["normalization"] = p.cohort_relative ? "cohort min-max" : "absolute";
  j["provenance"] = p.provenance;
  return j;
}

}  // namespace egosocial
