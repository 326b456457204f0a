#include <doctest.h>

#include <json.hpp>

#include "fixtures.h"
#include "mkit/errors.h"
#include "mkit/image.h"
#include "mkit/service.h"

using namespace mkit;
using nlohmann::json;

namespace {

service::ServiceConfig config(std::chrono::milliseconds timeout = std::chrono::seconds(30)) {
  service::ServiceConfig c;
  c.fetcher = std::make_shared<mock::InProcessFetcher>(fixture_archive(), timeout);
  c.analysis = fixture_config();
  c.renderer = std::make_shared<StubRenderer>();
  c.service_base = "http://svc.test";
  return c;
}

const service::Service& svc() {
  static const service::Service s(config());
  return s;
}

service::Response get(const service::Service& s, const std::string& target, const char* prefer = nullptr) {
  HttpHeaders h;
  if (prefer) h.set("Prefer", prefer);
  return s.handle("GET", target, h);
}

service::Response get(const std::string& target, const char* prefer = nullptr) { return get(svc(), target, prefer); }

json body(const service::Response& r) { return json::parse(r.body); }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("contentdata") {
    const auto before = Timestamp::now();
    const auto r = get("/services/memento/contentdata/" + kBlastUrim);
    REQUIRE(r.status == 200);
    CHECK(r.content_type == "application/json");
    const auto j = body(r);
    CHECK(j["urim"] == kBlastUrim);
    CHECK(j["title"] == "Blast Theory");
    CHECK(j["memento-datetime"] == "2009-05-22T22:12:51Z");
    CHECK(j["snippet"].get<std::string>().rfind("Sam Pearson and Clara", 0) == 0);
    const auto generated = Timestamp::parse_iso8601(j["generation-time"].get<std::string>());
    REQUIRE(generated);
    CHECK(*generated >= before);
  }

  TEST_CASE("imagedata and bestimage") {
    const auto j = body(get("/services/memento/imagedata/" + kBlastUrim));
    CHECK(j["ranked images"].size() == 14);
    CHECK(j["processed urim"] ==
          "https://www.webarchive.org.uk/wayback/archive/20090522221251im_/http://blasttheory.co.uk/");
    const auto& ur = j["images"]["https://www.webarchive.org.uk/wayback/archive/20090522221251im_/"
                                 "http://blasttheory.co.uk/bt/i/uncleroy/ur_icon.jpg"];
    CHECK(ur["width"] == 168);
    CHECK(ur["blank columns in histogram"] == 463);
    CHECK(ur["colorcount"] == 4776);
    CHECK(ur["size in pixels"] == 16128);
    CHECK(ur["ratio width/height"] == 1.75);
    CHECK(ur["N"] == 14);
    CHECK(ur["n"] == 11);
    CHECK(ur["k3"] == 10);
    CHECK(ur["calculated score"] == 49580.625);
    CHECK(ur["is-a-memento"] == true);
    CHECK(ur["pHash"].get<std::string>().size() == 16);
    const auto best = body(get("/services/memento/bestimage/" + kBlastUrim));
    CHECK(best["best-image-uri"] == j["ranked images"][0]);
  }

  TEST_CASE("archivedata collection fields only for collection archives") {
    const auto occupy = body(get("/services/memento/archivedata/" + kNationUrim));
    CHECK(occupy["archive-name"] == "ARCHIVE-IT.ORG");
    CHECK(occupy["archive-collection-id"] == "2950");
    CHECK(occupy["archive-collection-name"] == "Occupy Movement 2011/2012");
    CHECK(occupy["archive-collection-uri"] == "https://archive-it.org/collections/2950");
    const auto blast = body(get("/services/memento/archivedata/" + kBlastUrim));
    CHECK(blast["archive-uri"] == "https://www.webarchive.org.uk/");
    CHECK_FALSE(blast.contains("archive-collection-id"));
    CHECK_FALSE(blast.contains("archive-collection-name"));
  }

  TEST_CASE("originalresourcedata, seeddata, page-metadata") {
    const auto o = body(get("/services/memento/originalresourcedata/" + kArrestsUrim));
    CHECK(o["original-uri"] == "http://occupyarrests.wordpress.com/");
    CHECK(o["original-domain"] == "occupyarrests.wordpress.com");
    CHECK(o["original-linkstatus"] == "Live");
    const auto s = body(get("/services/memento/seeddata/" + kNationUrim));
    CHECK(s["memento-count"] == 1);
    CHECK(s["first-urim"] == kNationUrim);
    CHECK(s["first-memento-datetime"] == "2012-05-10T20:55:01Z");
    CHECK(s["metadata"]["Language"] == json::array({"English"}));
    CHECK(s["timemap"].get<std::string>().find("/timemap/") != std::string::npos);
    const auto m = body(get("/services/memento/page-metadata/" + kArrestsUrim));
    CHECK(m["page-metadata"]["description"].get<std::string>().find("running total") != std::string::npos);
  }

  TEST_CASE("ranking endpoints echo their algorithms") {
    const auto r = get("/services/memento/sentencerank/" + kBlastUrim, "algorithm=justext/textrank");
    REQUIRE(r.status == 200);
    CHECK(r.headers.get("Preference-Applied") == "algorithm=justext/textrank");
    const auto j = body(r);
    CHECK(j["paragraph scoring algorithm"] == "justext");
    CHECK(j["sentence ranking algorithm"] == "textrank");
    CHECK_FALSE(j["scored sentences"].empty());
    const auto d = get("/services/memento/sentencerank/" + kBlastUrim);
    CHECK(d.headers.get("Preference-Applied") == "algorithm=readability/lede3");
    const auto p = body(get("/services/memento/paragraphrank/" + kBlastUrim));
    CHECK(p["algorithm"] == "readability");
    CHECK_FALSE(p["scored paragraphs"].empty());
    CHECK(get("/services/memento/sentencerank/" + kBlastUrim, "algorithm=bogus/lede3").status == 400);
  }

  TEST_CASE("status codes") {
    CHECK(get("/services/memento/contentdata/not-a-uri").status == 400);
    CHECK(get("/services/memento/contentdata/").status == 400);
    CHECK(get("/services/memento/contentdata/ftp://example.com/x").status == 400);
    CHECK(get("/services/memento/contentdata/http://live.example/").status == 404);
    CHECK(get("/services/memento/nosuch/" + kBlastUrim).status == 404);
    CHECK(get("/services/product/nosuch/" + kBlastUrim).status == 404);
    CHECK(get("/elsewhere").status == 404);
    CHECK(get("/services/memento/contentdata/http://web.archive.example/web/20200101000000/http://reset.example/")
              .status == 502);
    CHECK(get("/services/memento/contentdata/http://web.archive.example/web/20200101000000/http://broken.example/")
              .status == 502);
    CHECK(get("/services/product/wordcloud/" + kCloudUrim, "colormap=nope").status == 400);
    CHECK(get("/services/product/imagereel/" + kPlainUrim).status == 500);
    CHECK(svc().handle("POST", "/services/memento/contentdata/" + kBlastUrim, {}).status == 404);

    const service::Service quick(config(std::chrono::milliseconds(100)));
    const auto slow = get(quick, "/services/memento/contentdata/http://web.archive.example/web/20200101000000/http://slow.example/");
    CHECK(slow.status == 504);
    const auto err = body(slow);
    CHECK(err["status"] == 504);
    CHECK(err.contains("generation-time"));
    CHECK(err["urim"] == "http://web.archive.example/web/20200101000000/http://slow.example/");
  }

  TEST_CASE("the URI-M is taken verbatim") {
    const std::string odd = "http://web.archive.example/web/20110301000000/http://gate.example/?q=a%20b&x=#frag";
    const auto j = body(get("/services/memento/contentdata/" + odd));
    CHECK(j["urim"] == odd);
  }

  TEST_CASE("error bodies survive invalid UTF-8 in the request") {
    const auto r = get("/services/product/wordcloud/" + kCloudUrim, "colormap=ab\xDB\xFF");
    CHECK(r.status == 400);
    CHECK(body(r)["error"].get<std::string>().find("unknown colormap") != std::string::npos);
  }

  TEST_CASE("exception mapping is total") {
    CHECK(service::status_for(InvalidUri("x")) == 400);
    CHECK(service::status_for(UnknownAlgorithm("x")) == 400);
    CHECK(service::status_for(BadPreference("x")) == 400);
    CHECK(service::status_for(NotAMemento("x")) == 404);
    CHECK(service::status_for(UnknownEndpoint("x")) == 404);
    CHECK(service::status_for(ConnectionFailed("x")) == 502);
    CHECK(service::status_for(FetchTimeout("x")) == 504);
    CHECK(service::status_for(RenderTimeout("x")) == 504);
    CHECK(service::status_for(DeadlineExceeded("x")) == 504);
    CHECK(service::status_for(UndecodableImage("x")) == 500);
    CHECK(service::status_for(MalformedTimeMap("x")) == 500);
    CHECK(service::status_for(ProductUnsupported("x")) == 500);
    CHECK(service::status_for(RendererUnavailable("x")) == 500);
    CHECK(service::status_for(std::runtime_error("x")) == 500);
  }

  TEST_CASE("products") {
    const auto t = get("/services/product/thumbnail/" + kBlastUrim, "viewport_width=4096,thumbnail_width=2048");
    REQUIRE(t.status == 200);
    CHECK(t.content_type == "image/png");
    CHECK(t.headers.get("Preference-Applied") ==
          "viewport_width=4096,viewport_height=768,thumbnail_width=2048,thumbnail_height=156,timeout=60");
    CHECK(decode_image(t.body).width == 2048);

    const auto card = get("/services/product/socialcard/" + kNationUrim);
    CHECK(card.content_type == "text/html; charset=utf-8");
    CHECK(card.body.find("http://svc.test/static/js/mementoembed-card.js") != std::string::npos);
    CHECK(card.headers.get("Preference-Applied") ==
          "datauri_favicon=no,datauri_image=no,using_remote_javascript=yes,minify_markup=no");

    const auto reel = get("/services/product/imagereel/" + kReelUrim);
    CHECK(reel.content_type == "image/gif");
    CHECK(reel.headers.get("Preference-Applied") == "duration=100,imagecount=5,width=320,height=240");

    const auto words = get("/services/product/wordcloud/" + kCloudUrim, "textonly=yes");
    CHECK(words.content_type == "application/json");
    CHECK(json::parse(words.body) == json::array({"egypt", "protest"}));
  }

  TEST_CASE("static assets") {
    const auto js = get("/static/js/mementoembed-card.js");
    CHECK(js.status == 200);
    CHECK(js.content_type == "application/javascript");
    const auto globe = get("/static/images/default-globe.png");
    CHECK(decode_image(globe.body).width == 320);
  }

  TEST_CASE("one memento load per URI-M across endpoints") {
    const service::Service s(config());
    for (const char* e : {"contentdata", "archivedata", "originalresourcedata", "page-metadata"})
      CHECK(get(s, std::string("/services/memento/") + e + "/" + kArrestsUrim).status == 200);
    CHECK(s.cache().loads() == 1);
    CHECK(s.cache().size() == 1);
    get(s, "/services/memento/contentdata/http://live.example/");
    CHECK(s.cache().size() == 1);

    service::AnalysisCache tiny(1, std::chrono::seconds(600));
    tiny.get(kArrestsUrim, fixture_fetcher(), fixture_config());
    tiny.get(kNationUrim, fixture_fetcher(), fixture_config());
    tiny.get(kArrestsUrim, fixture_fetcher(), fixture_config());
    CHECK(tiny.loads() == 3);
    service::AnalysisCache expiring(4, std::chrono::seconds(0));
    expiring.get(kArrestsUrim, fixture_fetcher(), fixture_config());
    expiring.get(kArrestsUrim, fixture_fetcher(), fixture_config());
    CHECK(expiring.loads() == 2);
  }

  TEST_CASE("served over HTTP") {
    auto s = std::make_shared<service::Service>(config());
    service::Server server(s);
    const int port = server.start();
    HttplibFetcher client;
    HttpRequest req;
    req.url = "http://127.0.0.1:" + std::to_string(port) + "/services/product/thumbnail/" + kBlastUrim;
    req.headers.set("Prefer", "viewport_width=4096,thumbnail_width=2048");
    const auto res = client.fetch(req);
    CHECK(res.status == 200);
    CHECK(res.headers.get("Preference-Applied") ==
          "viewport_width=4096,viewport_height=768,thumbnail_width=2048,thumbnail_height=156,timeout=60");
    req.url = "http://127.0.0.1:" + std::to_string(port) + "/services/memento/contentdata/not-a-uri";
    req.headers.remove("Prefer");
    CHECK(client.fetch(req).status == 400);
    server.stop();
  }
}
