// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace egosocial {

using Millis = std::chrono::milliseconds;
using UtcTime = std::chrono::sys_time<Millis>;
using Date = std::chrono::year_month_day;

/// An instant plus the wearer-local UTC offset it was recorded in.
/// Ordering and equality look at the instant first, then the offset.
struct Timestamp {
  UtcTime utc{};
  std::chrono::minutes offset{0};

  /// Calendar day in the recorded local offset.
  Date local_date() const;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Parses `YYYY-MM-DD`. Throws FormatError.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Parses an RFC 3339 instant (`2017-03-01T09:00:00+01:00`, `...Z`, optional fraction).
/// Fractions finer than a millisecond are truncated. Throws FormatError.
Timestamp parse_timestamp(std::string_view text);
/// Canonical form: `Z` for a zero offset, fraction only when non-zero milliseconds.
std::string format_timestamp(const Timestamp& ts);

/// Local wall-clock time `since_midnight` on `date` at `offset`.
Timestamp local_time(Date date, std::chrono::seconds since_midnight, std::chrono::minutes offset);

/// `to - from` in fractional minutes.
inline double minutes_between(const Timestamp& from, const Timestamp& to) {
  return std::chrono::duration<double, std::ratio<60>>(to.utc - from.utc).count();
}

}  // namespace egosocial
