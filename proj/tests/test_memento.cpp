#include <doctest.h>

#include <algorithm>
#include <random>

#include "mkit/errors.h"
#include "mkit/memento.h"

using namespace mkit;

namespace {

const char* kCnnUrim =
    "http://web.archive.org/web/20110211072257/http://news.blogs.cnn.com/category/world/"
    "egypt-world-latest-news/";
const char* kCnnUriR = "http://news.blogs.cnn.com/category/world/egypt-world-latest-news/";

std::string digits_after(const std::string& s) {
  // Independent scan: first "/" + 14 digits segment.
  for (std::size_t i = 0; i + 15 <= s.size(); ++i) {
    if (s[i] != '/') continue;
    bool ok = true;
    for (std::size_t k = 1; k <= 14; ++k) ok = ok && std::isdigit(static_cast<unsigned char>(s[i + k]));
    if (ok) return s.substr(i + 1, 14);
  }
  return {};
}

}  // namespace

TEST_SUITE("memento") {
  TEST_CASE("raw URI-M derivation") {
    const auto profiles = default_archive_profiles();
    CHECK(derive_raw_urim("https://www.webarchive.org.uk/wayback/archive/20090522221251/"
                          "http://blasttheory.co.uk/",
                          profiles) ==
          "https://www.webarchive.org.uk/wayback/archive/20090522221251im_/http://blasttheory.co.uk/");
    CHECK(derive_banner_free_urim(kCnnUrim, profiles) ==
          std::string("http://web.archive.org/web/20110211072257if_/") + kCnnUriR);
    CHECK(derive_raw_urim("https://wayback.archive-it.org/2950/20120101000000/http://occupy.example/",
                          profiles) ==
          "https://wayback.archive-it.org/2950/20120101000000id_/http://occupy.example/");
    CHECK_FALSE(derive_raw_urim("http://archive.example/memento/abc/http://x.example/", profiles));
  }

  TEST_CASE("rewrite keeps the datetime and is idempotent over generated URI-Ms") {
    const auto profiles = default_archive_profiles();
    std::mt19937 rng(11);
    const char* hosts[] = {"web.archive.org/web", "www.webarchive.org.uk/wayback/archive",
                           "arquivo.pt/wayback", "wayback.archive-it.org/1068"};
    for (int i = 0; i < 50; ++i) {
      const auto ts = Timestamp(std::uniform_int_distribution<std::int64_t>(631152000, 1893456000)(rng));
      const std::string urim = std::string("https://") + hosts[i % 4] + "/" + ts.to_14digit() +
                               "/http://site" + std::to_string(i) + ".example/page" +
                               std::to_string(i * 7) + ".html";
      const auto raw = derive_raw_urim(urim, profiles);
      REQUIRE(raw);
      CHECK(is_absolute_uri(*raw));
      CHECK(digits_after(*raw) == digits_after(urim));
      CHECK(digits_after(*raw) == ts.to_14digit());
      CHECK(derive_raw_urim(*raw, profiles) == raw);
    }
  }

  TEST_CASE("time travel URI") {
    const auto t = *Timestamp::parse_http("Fri, 11 Feb 2011 07:22:57 GMT");
    CHECK(build_timetravel_uri(kCnnUriR, t, "http://timetravel.mementoweb.org") ==
          "http://timetravel.mementoweb.org/list/20110211072257Z/http://news.blogs.cnn.com/category/"
          "world/egypt-world-latest-news/");
    CHECK(build_timetravel_uri("http://a.example/", Timestamp::from_civil(2000, 1, 1),
                               "http://tt.example/") ==
          "http://tt.example/list/20000101000000Z/http://a.example/");
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
      const Timestamp ts(std::uniform_int_distribution<std::int64_t>(0, 4102444799)(rng));
      const auto uri = build_timetravel_uri("http://a.example/", ts, "http://tt.example");
      const auto at = uri.find("/list/") + 6;
      CHECK(uri.substr(at + 14, 1) == "Z");
      CHECK(Timestamp::parse_14digit(uri.substr(at, 14)) == ts);
    }
  }

  TEST_CASE("link-format parsing") {
    const auto entries = parse_link_format(
        "<http://a.example/>; rel=\"original\",\n<http://tm.example/>; rel=\"self\"; "
        "type=\"application/link-format\",\n<http://m.example/1>; rel=\"first memento\"; "
        "datetime=\"Fri, 22 May 2009 22:12:51 GMT\"");
    REQUIRE(entries.size() == 3);
    CHECK(entries[2].has_rel("memento"));
    CHECK(entries[2].has_rel("first"));
    CHECK(entries[2].params.at("datetime") == "Fri, 22 May 2009 22:12:51 GMT");
    CHECK_THROWS_AS(parse_link_format("<http://a.example/; rel=original"), MalformedTimeMap);
  }

  TEST_CASE("TimeMap stats are permutation invariant") {
    std::vector<std::string> lines = {
        "<http://arc.example/20110601000000/http://a.example/>; rel=\"memento\"; "
        "datetime=\"Wed, 01 Jun 2011 00:00:00 GMT\"",
        "<http://arc.example/20090522221251/http://a.example/>; rel=\"memento\"; "
        "datetime=\"Fri, 22 May 2009 22:12:51 GMT\"",
        "<http://arc.example/20150101120000/http://a.example/>; rel=\"memento\"; "
        "datetime=\"Thu, 01 Jan 2015 12:00:00 GMT\"",
    };
    const std::string head =
        "<http://a.example/>; rel=\"original\",\n<http://arc.example/timemap/link/http://a.example/>;"
        " rel=\"self\"; type=\"application/link-format\",\n";
    auto join = [&](const std::vector<std::string>& ls) {
      std::string out = head;
      for (std::size_t i = 0; i < ls.size(); ++i) out += ls[i] + (i + 1 < ls.size() ? ",\n" : "\n");
      return out;
    };
    const auto stats = parse_timemap(join(lines));
    CHECK(stats.memento_count == 3);
    CHECK(stats.uri_r == "http://a.example/");
    CHECK(stats.uri_t == "http://arc.example/timemap/link/http://a.example/");
    CHECK(stats.first_memento_datetime->to_14digit() == "20090522221251");
    CHECK(stats.last_memento_datetime->to_14digit() == "20150101120000");
    CHECK(*stats.first_urim == "http://arc.example/20090522221251/http://a.example/");
    std::sort(lines.begin(), lines.end());
    do {
      const auto s = parse_timemap(join(lines));
      CHECK(s.first_urim == stats.first_urim);
      CHECK(s.last_urim == stats.last_urim);
      CHECK(s.memento_count == 3);
    } while (std::next_permutation(lines.begin(), lines.end()));

    const auto single = parse_timemap(head + lines[0] + "\n");
    CHECK(single.memento_count == 1);
    CHECK(single.first_urim == single.last_urim);
  }

  TEST_CASE("detect_memento reads the Memento headers") {
    FunctionFetcher fetcher([](const HttpRequest& req) {
      HttpResponse res;
      res.url = req.url;
      res.status = 200;
      res.headers.add("Content-Type", "text/html");
      if (req.url == kCnnUrim) {
        res.headers.add("Memento-Datetime", "Fri, 11 Feb 2011 07:22:57 GMT");
        res.headers.add("Link", std::string("<") + kCnnUriR + ">; rel=\"original\"");
      }
      res.body = "<html></html>";
      return res;
    });
    const auto rec = detect_memento(kCnnUrim, fetcher);
    CHECK(rec.uri_r == kCnnUriR);
    CHECK(rec.memento_datetime.to_http() == "Fri, 11 Feb 2011 07:22:57 GMT");
    CHECK(rec.archive_domain == "archive.org");
    CHECK(Timestamp::parse_14digit(rec.memento_datetime.to_14digit()) == rec.memento_datetime);
    CHECK_THROWS_AS(detect_memento("http://live.example/", fetcher), NotAMemento);
    CHECK_THROWS_AS(detect_memento("not a uri", fetcher), InvalidUri);
  }

  TEST_CASE("archive 5xx is a connection failure") {
    FunctionFetcher fetcher([](const HttpRequest& req) {
      HttpResponse res;
      res.url = req.url;
      res.status = 503;
      return res;
    });
    CHECK_THROWS_AS(detect_memento(kCnnUrim, fetcher), ConnectionFailed);
  }

  TEST_CASE("charset decoding") {
    CHECK(decode_to_utf8("caf\xE9", std::string("iso-8859-1")) == "caf\xC3\xA9");
    CHECK(decode_to_utf8("<meta charset=\"windows-1252\">\x93q\x94", std::nullopt) ==
          "<meta charset=\"windows-1252\">\xE2\x80\x9Cq\xE2\x80\x9D");
    CHECK(decode_to_utf8("ok\xFF", std::nullopt) == "ok\xEF\xBF\xBD");
  }
}
