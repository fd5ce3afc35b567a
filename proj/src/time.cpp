// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#include "egosocial/time.hpp"

#include <charconv>
#include <cstdio>

#include "egosocial/errors.hpp"

namespace egosocial {

namespace {

int fixed_digits(std::string_view text, std::size_t pos, std::size_t count, std::string_view what) {
  if (pos + count > text.size()) throw FormatError("truncated " + std::string(what) + " in '" + std::string(text) + "'");
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') throw FormatError("bad " + std::string(what) + " in '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw FormatError("expected '" + std::string(1, c) + "' at offset " + std::to_string(pos) + " in '" +
                      std::string(text) + "'");
}

Date date_at(std::string_view text, std::size_t pos) {
  int y = fixed_digits(text, pos, 4, "year");
  expect_char(text, pos + 4, '-');
  int m = fixed_digits(text, pos + 5, 2, "month");
  expect_char(text, pos + 7, '-');
  int d = fixed_digits(text, pos + 8, 2, "day");
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) throw FormatError("invalid calendar date '" + std::string(text.substr(pos, 10)) + "'");
  return date;
}

}  // namespace

Date Timestamp::local_date() const {
  auto local = utc + offset;
  return Date{std::chrono::floor<std::chrono::days>(local)};
}

Date parse_date(std::string_view text) {
  if (text.size() != 10) throw FormatError("date must be YYYY-MM-DD, got '" + std::string(text) + "'");
  return date_at(text, 0);
}

std::string format_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  Date date = date_at(text, 0);
  if (text.size() < 11 || (text[10] != 'T' && text[10] != 't'))
    throw FormatError("expected 'T' after date in '" + std::string(text) + "'");
  int hh = fixed_digits(text, 11, 2, "hour");
  expect_char(text, 13, ':');
  int mm = fixed_digits(text, 14, 2, "minute");
  expect_char(text, 16, ':');
  int ss = fixed_digits(text, 17, 2, "second");
  if (hh > 23 || mm > 59 || ss > 59) throw FormatError("time of day out of range in '" + std::string(text) + "'");

  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (pos - start < 3) millis = millis * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == start) throw FormatError("empty fraction in '" + std::string(text) + "'");
    for (std::size_t n = pos - start; n < 3; ++n) millis *= 10;
  }

  if (pos >= text.size()) throw FormatError("missing UTC offset in '" + std::string(text) + "'");
  int offset_minutes = 0;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int sign = text[pos] == '-' ? -1 : 1;
    int oh = fixed_digits(text, pos + 1, 2, "offset hour");
    expect_char(text, pos + 3, ':');
    int om = fixed_digits(text, pos + 4, 2, "offset minute");
    if (oh > 23 || om > 59) throw FormatError("offset out of range in '" + std::string(text) + "'");
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    throw FormatError("bad UTC offset in '" + std::string(text) + "'");
  }
  if (pos != text.size()) throw FormatError("trailing characters in '" + std::string(text) + "'");

  using namespace std::chrono;
  auto local = sys_days{date} + hours{hh} + minutes{mm} + seconds{ss} + Millis{millis};
  return Timestamp{local - minutes{offset_minutes}, minutes{offset_minutes}};
}

std::string format_timestamp(const Timestamp& ts) {
  using namespace std::chrono;
  auto local = ts.utc + ts.offset;
  auto day = floor<days>(local);
  hh_mm_ss<Millis> tod{local - day};
  std::string out = format_date(Date{day});
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
  out += buf;
  if (auto ms = tod.subseconds().count(); ms != 0) {
    std::snprintf(buf, sizeof buf, ".%03d", static_cast<int>(ms));
    out += buf;
  }
  auto off = ts.offset.count();
  if (off == 0) {
    out += 'Z';
  } else {
    auto mag = off < 0 ? -off : off;
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", off < 0 ? '-' : '+', static_cast<int>(mag / 60),
                  static_cast<int>(mag % 60));
    out += buf;
  }
  return out;
}

Timestamp local_time(Date date, std::chrono::seconds since_midnight, std::chrono::minutes offset) {
  auto local = std::chrono::sys_days{date} + since_midnight;
  return Timestamp{std::chrono::time_point_cast<Millis>(local - offset), offset};
}

}  // namespace egosocial
