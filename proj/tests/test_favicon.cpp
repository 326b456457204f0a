#include <doctest.h>

#include "fake_web.h"
#include "mkit/favicon.h"
#include "mkit/image.h"

using namespace mkit;

namespace {

const std::string kPng = encode_png(RgbImage(16, 16, {200, 10, 10}));
const std::string kUrim = "http://arc.example/web/20110211072257/http://site.example/news/";

MementoRecord record_with(const std::string& html) {
  MementoRecord rec;
  rec.urim = rec.final_urim = kUrim;
  rec.uri_r = "http://site.example/news/";
  rec.memento_datetime = *Timestamp::parse_http("Fri, 11 Feb 2011 07:22:57 GMT");
  rec.timegate_uri = "http://arc.example/timegate/http://site.example/news/";
  rec.content_augmented = std::make_shared<const std::string>(html);
  return rec;
}

}  // namespace

TEST_SUITE("favicon") {
  TEST_CASE("archive favicon from the home page LINK element") {
    FakeWeb web;
    web.page("http://arc.example/", "<html><head><link rel=\"icon\" href=\"/fav.png\"></head></html>");
    web.page("http://arc.example/fav.png", kPng, "image/png");
    web.page("http://arc.example/favicon.ico", kPng, "image/x-icon");
    const auto r = discover_archive_favicon("http://arc.example/", web);
    CHECK(r.uri == "http://arc.example/fav.png");
    CHECK(r.source == FaviconSource::LinkElement);
  }

  TEST_CASE("archive favicon falls back to the well-known path, then the resolver") {
    FakeWeb web;
    web.page("http://arc.example/", "<html><head></head></html>");
    web.page("http://arc.example/favicon.ico", kPng, "image/x-icon");
    auto r = discover_archive_favicon("http://arc.example/", web);
    CHECK(r.source == FaviconSource::WellKnownPath);
    CHECK(r.uri == "http://arc.example/favicon.ico");

    FakeWeb empty;
    CHECK(discover_archive_favicon("http://arc.example/", empty).source == FaviconSource::None);
    CHECK_FALSE(discover_archive_favicon("http://arc.example/", empty).uri);
    const auto ext = discover_archive_favicon("http://www.arc.example/", empty, [](std::string_view d) {
      return std::optional<std::string>("http://icons.example/" + std::string(d));
    });
    CHECK(ext.source == FaviconSource::ExternalService);
    CHECK(ext.uri == "http://icons.example/arc.example");
  }

  TEST_CASE("soft-404 HTML favicons do not count") {
    FakeWeb web;
    web.page("http://arc.example/", "<html></html>");
    web.page("http://arc.example/favicon.ico", "<html>oops</html>", "text/html");
    CHECK(discover_archive_favicon("http://arc.example/", web).source == FaviconSource::None);
  }

  TEST_CASE("original favicon already archived in the LINK element") {
    FakeWeb web;
    const std::string fav = "http://arc.example/web/20110211072257im_/http://site.example/f.ico";
    web.memento(fav, kPng, "image/png");
    const auto r = discover_original_favicon(
        record_with("<link rel=\"shortcut icon\" href=\"" + fav + "\">"), web);
    CHECK(r.uri == fav);
    CHECK(r.source == FaviconSource::LinkElement);
  }

  TEST_CASE("original favicon by negotiation, then live, with strict order") {
    FakeWeb web;
    const std::string archived = "http://arc.example/web/20110101000000im_/http://site.example/favicon.ico";
    web.redirect("http://arc.example/timegate/http://site.example/favicon.ico", archived);
    web.memento(archived, kPng, "image/x-icon");
    web.page("http://site.example/favicon.ico", kPng, "image/x-icon");
    auto r = discover_original_favicon(record_with("<html></html>"), web);
    CHECK(r.source == FaviconSource::NegotiatedMemento);
    CHECK(r.uri == archived);

    FakeWeb live;
    live.page("http://site.example/favicon.ico", kPng, "image/x-icon");
    r = discover_original_favicon(record_with("<html></html>"), live);
    CHECK(r.source == FaviconSource::LiveOriginal);
    CHECK(r.uri == "http://site.example/favicon.ico");

    FakeWeb none;
    CHECK(discover_original_favicon(record_with("<html></html>"), none).source == FaviconSource::None);
  }
}
