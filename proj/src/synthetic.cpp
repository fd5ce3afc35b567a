// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "egosocial/errors.hpp"

namespace egosocial {

namespace {

Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index size, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

Eigen::VectorXd random_direction(std::mt19937_64& rng, Eigen::Index size) {
  Eigen::VectorXd v;
  do {
    v = gaussian_vector(rng, size, 1.0);
  } while (!(v.norm() > 0.0));
  return v.normalized();
}

}  // namespace

std::string format_clock(std::chrono::seconds t) {
  const auto s = t.count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(s / 3600),
                static_cast<long long>(s / 60 % 60), static_cast<long long>(s % 60));
  return buf;
}

std::chrono::seconds parse_clock(const std::string& text) {
  int h = 0, m = 0, s = 0;
  char tail = 0;
  const int n = std::sscanf(text.c_str(), "%d:%d:%d%c", &h, &m, &s, &tail);
  if ((n != 2 && n != 3) || h < 0 || h > 24 || m < 0 || m > 59 || s < 0 || s > 59)
    throw FormatError("bad clock time '" + text + "', expected HH:MM[:SS]");
  const std::chrono::seconds out = std::chrono::hours{h} + std::chrono::minutes{m} + std::chrono::seconds{s};
  if (out > std::chrono::hours{24}) throw FormatError("clock time past midnight '" + text + "'");
  return out;
}

void SynthConfig::validate() const {
  if (n_days < 1) throw std::invalid_argument("n_days must be at least 1");
  if (n_identities < 1) throw std::invalid_argument("n_identities must be at least 1");
  if (!(identity_center_spread >= 0.0)) throw std::invalid_argument("identity_center_spread must be >= 0");
  if (!(within_person_noise >= 0.0)) throw std::invalid_argument("within_person_noise must be >= 0");
  if (frame_interval_min.count() <= 0 || frame_interval_max < frame_interval_min)
    throw std::invalid_argument("frame interval range must be positive and ordered");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw std::invalid_argument("dropout_rate must lie in [0, 1)");
  if (!coverage.empty() && coverage.size() != static_cast<std::size_t>(n_days))
    throw std::invalid_argument("coverage needs one window per day");
  for (int d = 0; d < n_days; ++d)
    if (!(window(d).start < window(d).end)) throw std::invalid_argument("coverage window must start before it ends");
  for (const auto& e : schedule) {
    if (e.identity < 0 || e.identity >= n_identities) throw std::invalid_argument("scheduled identity out of range");
    if (e.day < 0 || e.day >= n_days) throw std::invalid_argument("scheduled day out of range");
    if (e.end < e.start) throw std::invalid_argument("scheduled event ends before it starts");
    const DayWindow w = window(e.day);
    if (e.start < w.start || w.end < e.end)
      throw ValidationError("event of identity " + std::to_string(e.identity) + " on day " + std::to_string(e.day) +
                            " (" + format_clock(e.start) + "-" + format_clock(e.end) + ") lies outside coverage");
  }
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  SynthDataset out;

  const Eigen::VectorXd base = random_direction(rng, kDescriptorSize);
  out.centers.resize(config.n_identities, kDescriptorSize);
  for (int i = 0; i < config.n_identities; ++i)
    out.centers.row(i) = (base + config.identity_center_spread * random_direction(rng, kDescriptorSize)).normalized();

  std::vector<ScheduledInteraction> script = config.schedule;
  std::stable_sort(script.begin(), script.end(), [](const auto& a, const auto& b) {
    return std::tie(a.day, a.start, a.identity) < std::tie(b.day, b.start, b.identity);
  });

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Millis::rep> step(config.frame_interval_min.count(), config.frame_interval_max.count());
  std::vector<FaceObservation> observations;
  std::map<int, long> frames_per_day;
  for (std::size_t e = 0; e < script.size(); ++e) {
    const auto& ev = script[e];
    const Date date{std::chrono::sys_days{config.start_date} + std::chrono::days{ev.day}};
    RealizedInteraction real{ev, std::nullopt, std::nullopt, 0};
    std::size_t frame = 0;
    for (Millis t = ev.start; t <= ev.end; t += Millis{step(rng)}, ++frame) {
      const bool kept = unit(rng) >= config.dropout_rate;
      if (!kept) continue;
      FaceObservation o;
      o.wearer_id = config.wearer_id;
      o.day = date;
      o.timestamp = Timestamp{std::chrono::sys_days{date} + t - config.utc_offset, config.utc_offset};
      o.image_id = "d" + std::to_string(ev.day) + "-e" + std::to_string(e) + "-f" + std::to_string(frame);
      o.face_index = 0;
      Eigen::VectorXd v = out.centers.row(ev.identity).transpose();
      if (config.within_person_noise > 0.0) v += gaussian_vector(rng, kDescriptorSize, config.within_person_noise);
      o.descriptor = v.normalized();

      if (!real.first_frame) real.first_frame = o.timestamp;
      real.last_frame = o.timestamp;
      ++real.frames;
      ++frames_per_day[ev.day];
      out.truth.labels[o.key()] = "person-" + std::to_string(ev.identity);
      observations.push_back(std::move(o));
    }
    out.schedule_truth.push_back(real);
  }

  std::vector<DayCoverage> manifest;
  for (int d = 0; d < config.n_days; ++d) {
    const Date date{std::chrono::sys_days{config.start_date} + std::chrono::days{d}};
    const DayWindow w = config.window(d);
    manifest.push_back({config.wearer_id, date, local_time(date, w.start, config.utc_offset),
                        local_time(date, w.end, config.utc_offset), frames_per_day[d], false});
  }
  out.dataset = Dataset::build(std::move(observations), std::move(manifest));
  return out;
}

std::vector<ScheduledInteraction> make_schedule(const ScheduleRecipe& recipe) {
  if (recipe.n_identities < 1 || recipe.n_days < 1 || recipe.events_per_day < 0)
    throw std::invalid_argument("schedule recipe needs identities, days and a non-negative event count");
  if (recipe.min_length > recipe.max_length || recipe.min_pause > recipe.max_pause)
    throw std::invalid_argument("schedule recipe ranges must be ordered");
  std::mt19937_64 rng(recipe.seed);
  std::uniform_int_distribution<long> length(recipe.min_length.count(), recipe.max_length.count());
  std::uniform_int_distribution<long> pause(recipe.min_pause.count(), recipe.max_pause.count());
  std::uniform_int_distribution<int> who(0, recipe.n_identities - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Same-person encounters stay further apart than any sensible gap bridge.
  const std::chrono::seconds same_person_gap = recipe.min_pause;

  std::vector<ScheduledInteraction> out;
  for (int d = 0; d < recipe.n_days; ++d) {
    std::map<int, std::chrono::seconds> last_end;
    std::chrono::seconds cursor = recipe.window.start + std::chrono::seconds{pause(rng)} / 4;
    std::optional<ScheduledInteraction> prev;
    for (int n = 0; n < recipe.events_per_day; ++n) {
      std::chrono::seconds start = cursor;
      const bool overlap = prev && unit(rng) < recipe.overlap_probability;
      if (overlap) start = prev->start + (prev->end - prev->start) / 2;
      const std::chrono::seconds end = start + std::chrono::seconds{length(rng)};
      if (end > recipe.window.end) break;

      int identity = who(rng);
      int tries = 0;
      for (; tries < 4 * recipe.n_identities; ++tries, identity = who(rng)) {
        auto it = last_end.find(identity);
        if (it == last_end.end() || it->second + same_person_gap < start) break;
      }
      if (tries == 4 * recipe.n_identities) break;

      ScheduledInteraction ev{identity, d, start, end};
      last_end[identity] = end;
      out.push_back(ev);
      cursor = std::max(cursor, end + std::chrono::seconds{pause(rng)});
      prev = ev;
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["wearer_id"] = c.wearer_id;
  j["start_date"] = format_date(c.start_date);
  j["utc_offset_minutes"] = c.utc_offset.count();
  j["n_days"] = c.n_days;
  j["n_identities"] = c.n_identities;
  j["identity_center_spread"] = c.identity_center_spread;
  j["within_person_noise"] = c.within_person_noise;
  j["frame_interval_s"] = {std::chrono::duration<double>(c.frame_interval_min).count(),
                           std::chrono::duration<double>(c.frame_interval_max).count()};
  j["dropout_rate"] = c.dropout_rate;
  auto cov = nlohmann::ordered_json::array();
  for (const auto& w : c.coverage) cov.push_back({{"start", format_clock(w.start)}, {"end", format_clock(w.end)}});
  j["coverage"] = std::move(cov);
  auto sched = nlohmann::ordered_json::array();
  for (const auto& e : c.schedule)
    sched.push_back(
        {{"identity", e.identity}, {"day", e.day}, {"start", format_clock(e.start)}, {"end", format_clock(e.end)}});
  j["schedule"] = std::move(sched);
  return j;
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.wearer_id = j.value("wearer_id", c.wearer_id);
    if (j.contains("start_date")) c.start_date = parse_date(j.at("start_date").get<std::string>());
    c.utc_offset = std::chrono::minutes{j.value("utc_offset_minutes", c.utc_offset.count())};
    c.n_days = j.value("n_days", c.n_days);
    c.n_identities = j.value("n_identities", c.n_identities);
    c.identity_center_spread = j.value("identity_center_spread", c.identity_center_spread);
    c.within_person_noise = j.value("within_person_noise", c.within_person_noise);
    if (j.contains("frame_interval_s")) {
      const auto& f = j.at("frame_interval_s");
      auto ms = [](double s) { return Millis{static_cast<Millis::rep>(s * 1000.0 + 0.5)}; };
      c.frame_interval_min = ms(f.at(0).get<double>());
      c.frame_interval_max = ms(f.at(1).get<double>());
    }
    c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
    for (const auto& w : j.value("coverage", nlohmann::json::array()))
      c.coverage.push_back({parse_clock(w.at("start").get<std::string>()), parse_clock(w.at("end").get<std::string>())});
    for (const auto& e : j.value("schedule", nlohmann::json::array()))
      c.schedule.push_back({e.at("identity").get<int>(), e.at("day").get<int>(),
                            parse_clock(e.at("start").get<std::string>()), parse_clock(e.at("end").get<std::string>())});
    if (j.contains("random_schedule")) {
      const auto& r = j.at("random_schedule");
      ScheduleRecipe recipe;
      recipe.seed = r.value("seed", c.seed);
      recipe.n_identities = c.n_identities;
      recipe.n_days = c.n_days;
      recipe.events_per_day = r.value("events_per_day", recipe.events_per_day);
      recipe.min_length = std::chrono::seconds{r.value("min_length_s", recipe.min_length.count())};
      recipe.max_length = std::chrono::seconds{r.value("max_length_s", recipe.max_length.count())};
      recipe.min_pause = std::chrono::seconds{r.value("min_pause_s", recipe.min_pause.count())};
      recipe.max_pause = std::chrono::seconds{r.value("max_pause_s", recipe.max_pause.count())};
      recipe.overlap_probability = r.value("overlap_probability", recipe.overlap_probability);
      if (!c.coverage.empty()) recipe.window = c.coverage.front();
      auto extra = make_schedule(recipe);
      c.schedule.insert(c.schedule.end(), extra.begin(), extra.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad synthetic config: ") + e.what());
  }
  return c;
}

}  // namespace egosocial
