#include <doctest.h>

#include <algorithm>

#include "fixtures.h"
#include "mkit/errors.h"
#include "mkit/text.h"

using namespace mkit;

namespace {

const char* kBlastPrefix = "https://www.webarchive.org.uk/wayback/archive/20090522221251im_/http://blasttheory.co.uk/";

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("contentdata on the Blast Theory page") {
    auto a = fixture_analysis(kBlastUrim);
    const auto& c = a.content();
    CHECK(c.title == "Blast Theory");
    CHECK(c.snippet ==
          "Sam Pearson and Clara Garcia Fraile are in residence for one month Sam Pearson and Clara Garcia "
          "Fraile are in residence for one month working on a new project called In My Shoes. They are developin...");
    CHECK(text::code_point_count(c.snippet) == 200);
    CHECK(a.record().memento_datetime.to_iso8601() == "2009-05-22T22:12:51Z");
    CHECK(a.record().content_raw);
  }

  TEST_CASE("imagedata ranking on the Blast Theory page") {
    auto a = fixture_analysis(kBlastUrim);
    const auto& sel = a.images();
    REQUIRE(sel.candidates.size() == 14);
    const auto& ur = sel.candidates[11];
    CHECK(ur.urim == std::string(kBlastPrefix) + "bt/i/uncleroy/ur_icon.jpg");
    REQUIRE(ur.features);
    CHECK(ur.features->N == 14);
    CHECK(ur.features->n == 11);
    CHECK(ur.features->width == 168);
    CHECK(ur.features->height == 96);
    CHECK(ur.features->s == 16128);
    CHECK(ur.features->r == 1.75);
    CHECK(ur.features->h == 463);
    CHECK(ur.features->c == 4776);
    CHECK(*ur.score == doctest::Approx(49580.625).epsilon(1e-12));

    const std::vector<std::string> expected = {
        "bt/i/dotf/Untitled-1.jpg", "bt/i/yougetme/ygm_icon.jpg", "bt/i/cysmn/cy_icon.jpg",
        "bt/i/rider_spoke/rs_icon.jpg", "bt/i/ulrikeandeamon/ulrikeandeamon_small.jpg",
        "bt/i/trucold/trucold_icon.jpg", "bt/i/uncleroy/ur_icon.jpg", "bt/pe/bt_logo.gif", "bt/pe/latest.gif",
        "bt/pe/about.gif", "bt/pe/home.gif", "bt/pe/recent.gif", "bt/pe/types.gif", "bt/pe/chrono.gif"};
    REQUIRE(sel.ranking.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
      CHECK(sel.candidates[sel.ranking[i]].urim == std::string(kBlastPrefix) + expected[i]);
    CHECK(a.best_image().best_uri == std::string(kBlastPrefix) + "bt/i/dotf/Untitled-1.jpg");
  }

  TEST_CASE("og:image short-circuits scoring, imageless pages fall back to the default") {
    auto meta = fixture_analysis(kMetaUrim);
    CHECK(meta.best_image().source == ImageSelection::Source::Meta);
    CHECK(meta.best_image().best_uri == "http://web.archive.example/web/20130101000000im_/http://meta.example/card.png");
    CHECK(meta.best_image().candidates.empty());
    CHECK(meta.images().ranking.size() == 1);

    auto plain = fixture_analysis(kPlainUrim);
    CHECK(plain.best_image().source == ImageSelection::Source::Default);
    CHECK(plain.best_image().best_uri == fixture_config()->default_image_uri);
  }

  TEST_CASE("archivedata for Archive-It and other archives") {
    auto occupy = fixture_analysis(kNationUrim);
    const auto& a = occupy.archive();
    CHECK(a.archive_uri == "http://wayback.archive-it.org/");
    CHECK(a.archive_name == "ARCHIVE-IT.ORG");
    CHECK(a.archive_favicon.uri == "http://wayback.archive-it.org/favicon.ico");
    CHECK(a.collection_id == "2950");
    CHECK(a.collection_uri == "https://archive-it.org/collections/2950");
    CHECK(a.collection_name == "Occupy Movement 2011/2012");

    auto blast = fixture_analysis(kBlastUrim);
    const auto& b = blast.archive();
    CHECK(b.archive_name == "WEBARCHIVE.ORG.UK");
    CHECK(b.archive_favicon.uri == "https://www.webarchive.org.uk/static/ukwa.png");
    CHECK(b.archive_favicon.source == FaviconSource::LinkElement);
    CHECK_FALSE(b.collection_id);
    CHECK_FALSE(b.collection_name);
    CHECK_FALSE(b.collection_uri);
  }

  TEST_CASE("originalresourcedata") {
    auto blast = fixture_analysis(kBlastUrim);
    const auto& o = blast.original();
    CHECK(o.original_uri == "http://blasttheory.co.uk/");
    CHECK(o.original_domain == "blasttheory.co.uk");
    CHECK(o.original_favicon.source == FaviconSource::NegotiatedMemento);
    CHECK(o.original_favicon.uri ==
          "https://www.webarchive.org.uk/wayback/archive/20090527101500/http://blasttheory.co.uk/favicon.ico");
    CHECK(o.linkstatus == LinkStatus::Rotten);

    auto arrests = fixture_analysis(kArrestsUrim);
    CHECK(arrests.original().linkstatus == LinkStatus::Live);

    auto nation = fixture_analysis(kNationUrim);
    CHECK(nation.original().original_favicon.source == FaviconSource::LinkElement);
  }

  TEST_CASE("seeddata with collection metadata") {
    auto nation = fixture_analysis(kNationUrim);
    const auto& s = nation.seed();
    CHECK(s.original_url == "http://www.thenation.com/blog/167643/may-day-special-occupyusa-blog-may-1-frequent-updates/");
    REQUIRE(s.timemap);
    CHECK(s.timemap->memento_count == 1);
    REQUIRE(s.metadata);
    CHECK(s.metadata->at("Subject") == std::vector<std::string>{"Occupy movement", "Protest movements"});
    CHECK(s.metadata->at("Language") == std::vector<std::string>{"English"});

    auto timeline = fixture_analysis("http://web.archive.example/web/20110615080000/http://timeline.example/");
    const auto& t = timeline.seed();
    REQUIRE(t.timemap);
    CHECK(t.timemap->memento_count == 3);
    CHECK(t.timemap->first_memento_datetime->to_14digit() == "20090301120000");
    CHECK(t.timemap->last_urim == "http://web.archive.example/web/20150102030405/http://timeline.example/");
    CHECK_FALSE(t.metadata);
  }

  TEST_CASE("errors surface as typed exceptions") {
    auto live = fixture_analysis("http://live.example/");
    CHECK_THROWS_AS(live.content(), NotAMemento);
    auto junk = fixture_analysis("not-a-uri");
    CHECK_THROWS_AS(junk.record(), InvalidUri);
  }

  TEST_CASE("CNN sidebar is boilerplate") {
    auto cnn = fixture_analysis(kCnnUrim);
    const std::string text = remove_boilerplate(cnn.record().raw_or_augmented());
    CHECK(text.find("Tahrir Square") != std::string::npos);
    for (const char* s : {"Most Popular Stories", "Weather Forecast Today", "Sports Scores Live",
                          "Entertainment Gossip Column", "Travel Deals Weekly", "Technology Reviews Hub",
                          "Health Tips Daily", "Personal Finance Basics"})
      CHECK(text.find(s) == std::string::npos);
  }

  TEST_CASE("sentences and paragraphs") {
    auto blast = fixture_analysis(kBlastUrim);
    const auto lede = blast.sentences("readability/lede3");
    REQUIRE(lede.sentences.size() >= 3);
    CHECK(lede.paragraph_algorithm == "readability");
    CHECK(lede.sentence_algorithm == "lede3");
    const auto paragraphs = blast.paragraphs("justext");
    CHECK_FALSE(paragraphs.empty());
    CHECK_THROWS_AS(blast.sentences("nope/lede3"), UnknownAlgorithm);
  }
}
