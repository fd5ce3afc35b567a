#include <doctest.h>

#include "egosocial/errors.hpp"
#include "egosocial/time.hpp"

using namespace egosocial;
using namespace std::chrono_literals;

TEST_CASE("timestamps keep their offset and round-trip") {
  const Timestamp t = parse_timestamp("2017-03-06T10:15:30+01:00");
  CHECK(t.offset == 60min);
  CHECK(format_timestamp(t) == "2017-03-06T10:15:30+01:00");
  CHECK(format_date(t.local_date()) == "2017-03-06");
  CHECK(t.utc == std::chrono::sys_days{parse_date("2017-03-06")} + 9h + 15min + 30s);
}

TEST_CASE("zero offset prints as Z and fractions keep milliseconds") {
  CHECK(format_timestamp(parse_timestamp("2017-03-06T23:59:59.5+00:00")) == "2017-03-06T23:59:59.500Z");
  CHECK(format_timestamp(parse_timestamp("2017-03-06T00:00:00.123456Z")) == "2017-03-06T00:00:00.123Z");
}

TEST_CASE("local date follows the offset, not UTC") {
  const Timestamp late = parse_timestamp("2017-03-06T23:30:00-05:00");
  CHECK(format_date(late.local_date()) == "2017-03-06");
  CHECK(format_date(std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(late.utc)}) == "2017-03-07");
}

TEST_CASE("local_time builds wall-clock instants") {
  const Timestamp t = local_time(parse_date("2017-03-06"), 9h, 60min);
  CHECK(format_timestamp(t) == "2017-03-06T09:00:00+01:00");
  CHECK(minutes_between(t, local_time(parse_date("2017-03-06"), 10h + 12min, 60min)) == 72.0);
}

TEST_CASE("malformed times are rejected") {
  CHECK_THROWS_AS(parse_timestamp("2017-03-06 10:00:00"), FormatError);
  CHECK_THROWS_AS(parse_timestamp("2017-03-06T10:00:00"), FormatError);
  CHECK_THROWS_AS(parse_timestamp("2017-02-30T10:00:00Z"), FormatError);
  CHECK_THROWS_AS(parse_date("2017-13-01"), FormatError);
}
