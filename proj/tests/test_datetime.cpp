#include <doctest.h>

#include <ctime>
#include <random>

#include "mkit/datetime.h"

using mkit::Timestamp;

TEST_SUITE("datetime") {
  TEST_CASE("http date parses and formats") {
    auto t = Timestamp::parse_http("Fri, 11 Feb 2011 07:22:57 GMT");
    REQUIRE(t);
    CHECK(t->to_14digit() == "20110211072257");
    CHECK(t->to_http() == "Fri, 11 Feb 2011 07:22:57 GMT");
    CHECK(t->to_iso8601() == "2011-02-11T07:22:57Z");
    CHECK(Timestamp::parse_http("Friday, 11-Feb-11 07:22:57 GMT") == t);
    CHECK(Timestamp::parse_http("Fri Feb 11 07:22:57 2011") == t);
    CHECK_FALSE(Timestamp::parse_http("not a date"));
  }

  TEST_CASE("short 14-digit prefixes pad to the earliest instant") {
    CHECK(Timestamp::parse_14digit("2009")->to_14digit() == "20090101000000");
    CHECK(Timestamp::parse_14digit("200905")->to_14digit() == "20090501000000");
    CHECK_FALSE(Timestamp::parse_14digit("2009x"));
    CHECK_FALSE(Timestamp::parse_14digit("20091301000000"));
  }

  TEST_CASE("random instants agree with timegm and round-trip every format") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dist(0, 4102444799);  // through 2099
    for (int i = 0; i < 500; ++i) {
      const std::time_t secs = static_cast<std::time_t>(dist(rng));
      std::tm tm{};
      gmtime_r(&secs, &tm);
      const Timestamp t = Timestamp::from_civil(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                                                tm.tm_hour, tm.tm_min, tm.tm_sec);
      REQUIRE(t.epoch_seconds() == secs);
      CHECK(t.civil().weekday == tm.tm_wday);
      char buf[64];
      std::strftime(buf, sizeof buf, "%a, %d %b %Y %H:%M:%S GMT", &tm);
      CHECK(t.to_http() == buf);
      CHECK(Timestamp::parse_http(t.to_http()) == t);
      CHECK(Timestamp::parse_14digit(t.to_14digit()) == t);
      CHECK(Timestamp::parse_iso8601(t.to_iso8601()) == t);
    }
  }
}
