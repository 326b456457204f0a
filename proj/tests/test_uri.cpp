#include <doctest.h>

#include "mkit/uri.h"

using namespace mkit;

TEST_SUITE("uri") {
  TEST_CASE("absolute URIs need scheme and host") {
    auto u = parse_absolute_uri("HTTP://Example.COM:8080/a/b?q=1#frag");
    REQUIRE(u);
    CHECK(u->scheme == "http");
    CHECK(u->host == "example.com");
    CHECK(u->port == "8080");
    CHECK(u->target() == "/a/b?q=1");
    CHECK(u->origin() == "http://example.com:8080");
    CHECK_FALSE(parse_absolute_uri("/relative/path"));
    CHECK_FALSE(parse_absolute_uri("http://"));
    CHECK_FALSE(parse_absolute_uri("http://a b.example/"));
    CHECK_FALSE(parse_absolute_uri("http://example.com:80x/"));
    CHECK_FALSE(parse_absolute_uri("not a uri"));
  }

  TEST_CASE("reference resolution follows the RFC 3986 examples") {
    const std::string base = "http://a/b/c/d;p?q";
    const std::pair<const char*, const char*> cases[] = {
        {"g:h", "g:h"},           {"g", "http://a/b/c/g"},       {"./g", "http://a/b/c/g"},
        {"g/", "http://a/b/c/g/"}, {"/g", "http://a/g"},          {"//g", "http://g"},
        {"?y", "http://a/b/c/d;p?y"}, {"g?y", "http://a/b/c/g?y"}, {"#s", "http://a/b/c/d;p?q#s"},
        {"", "http://a/b/c/d;p?q"}, {".", "http://a/b/c/"},       {"..", "http://a/b/"},
        {"../g", "http://a/b/g"},   {"../..", "http://a/"},      {"../../../g", "http://a/g"},
        {"/./g", "http://a/g"},     {"g/../h", "http://a/b/c/h"}, {"g;x=1/../y", "http://a/b/c/y"},
    };
    for (const auto& [ref, want] : cases) CHECK(resolve_reference(base, ref) == want);
  }

  TEST_CASE("registered domains") {
    CHECK(registered_domain("www.webarchive.org.uk") == "webarchive.org.uk");
    CHECK(registered_domain("web.archive.org") == "archive.org");
    CHECK(registered_domain("wayback.archive-it.org") == "archive-it.org");
    CHECK(registered_domain("news.blogs.cnn.com") == "cnn.com");
    CHECK(registered_domain("localhost") == "localhost");
    CHECK(registered_domain("127.0.0.1") == "127.0.0.1");
  }
}
