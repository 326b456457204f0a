#include <doctest.h>

#include <json.hpp>

#include "fixtures.h"
#include "mkit/errors.h"
#include "mkit/gif.h"
#include "mkit/image.h"
#include "mkit/products.h"

using namespace mkit;

namespace {

PreferenceSet prefs(const char* endpoint, const char* header = nullptr) {
  return header ? parse_prefer(std::string_view(header), endpoint) : parse_prefer(std::nullopt, endpoint);
}

bool has_text(const std::vector<DrawRecord>& records, std::string_view needle) {
  for (const auto& r : records)
    if (r.kind == DrawRecord::Kind::Text && r.content.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("products") {
  TEST_CASE("imagereel frame arithmetic") {
    auto blast = fixture_analysis(kBlastUrim);
    const Reel five = build_imagereel(blast, prefs("imagereel"));
    CHECK(five.plan.entries.size() == 5);
    CHECK(five.plan.frame_count() == 105);
    const auto anim = gif::decode(five.gif);
    CHECK(anim.frames.size() == 105);
    CHECK(anim.width == 320);
    CHECK(anim.height == 240);
    CHECK(anim.loop_count == 0);

    const Reel two = build_imagereel(blast, prefs("imagereel", "imagecount=2,width=160,height=120"));
    CHECK(gif::decode(two.gif).frames.size() == 42);
    CHECK(gif::decode(two.gif).width == 160);

    auto reel = fixture_analysis(kReelUrim);
    CHECK(gif::decode(build_imagereel(reel, prefs("imagereel")).gif).frames.size() == 42);

    auto plain = fixture_analysis(kPlainUrim);
    CHECK_THROWS_AS(build_imagereel(plain, prefs("imagereel")), ProductUnsupported);
  }

  TEST_CASE("imagereel fades through black") {
    auto reel = fixture_analysis(kReelUrim);
    const auto anim = gif::decode(build_imagereel(reel, prefs("imagereel")).gif);
    auto brightness = [](const RgbImage& f) {
      double sum = 0;
      for (auto v : f.pixels) sum += v;
      return sum / static_cast<double>(f.pixels.size());
    };
    CHECK(brightness(anim.frames[0]) < 1.0);
    CHECK(brightness(anim.frames[10]) > brightness(anim.frames[5]));
    CHECK(brightness(anim.frames[20]) < brightness(anim.frames[10]));
    const FramePlanEntry e;
    CHECK(FramePlan::alpha(e, 0) == 0.0);
    CHECK(FramePlan::alpha(e, 10) == 1.0);
    CHECK(FramePlan::alpha(e, 20) == doctest::Approx(0.0));
    CHECK(frame_delay_for(100, e) == 5);
    CHECK(frame_delay_for(1, e) == 2);
  }

  TEST_CASE("docreel overlays attribution and respects counts") {
    auto blast = fixture_analysis(kBlastUrim);
    const Reel reel = build_docreel(blast, prefs("docreel", "imagecount=2,sentencecount=2"));
    CHECK(reel.plan.entries.size() == 4);
    CHECK(reel.plan.entries[0].kind == FramePlanEntry::Kind::Image);
    CHECK(reel.plan.entries[1].kind == FramePlanEntry::Kind::Sentence);
    CHECK(has_text(reel.overlay, "blasttheory.co.uk"));
    CHECK(has_text(reel.overlay, "WEBARCHIVE.ORG.UK"));
    CHECK(gif::decode(reel.gif).frames.size() == 84);

    const Reel images_only = build_docreel(blast, prefs("docreel", "imagecount=3,sentencecount=0"));
    for (const auto& e : images_only.plan.entries) CHECK(e.kind == FramePlanEntry::Kind::Image);
    CHECK(images_only.plan.frame_count() == 63);

    auto plain = fixture_analysis(kPlainUrim);
    CHECK_THROWS_AS(build_docreel(plain, prefs("docreel", "imagecount=0,sentencecount=1")), ProductUnsupported);
  }

  TEST_CASE("social card for the CNN memento") {
    auto cnn = fixture_analysis(kCnnUrim);
    const SocialCard card = build_social_card(cnn, SocialCardOptions{});
    CHECK(card.html.find("Egypt | CNN") != std::string::npos);
    CHECK(card.html.find("news.blogs.cnn.com") != std::string::npos);
    CHECK(card.html.find("ARCHIVE-IT.ORG") != std::string::npos);
    CHECK(card.html.find("2011-02-11 07:22:57") != std::string::npos);
    CHECK(card.html.find("<script") != std::string::npos);
    CHECK(card.html.find(kCnnUrim) != std::string::npos);
  }

  TEST_CASE("social card preferences") {
    auto nation = fixture_analysis(kNationUrim);
    SocialCardOptions o = SocialCardOptions::from(
        prefs("socialcard", "datauri_favicon=yes,datauri_image=yes,using_remote_javascript=no,minify_markup=yes"),
        "http://svc.test");
    const SocialCard card = build_social_card(nation, o);
    CHECK(card.html.find("<script") == std::string::npos);
    CHECK(card.html.find("<style") != std::string::npos);
    CHECK(card.html.find("src=\"data:image/png;base64,") != std::string::npos);
    CHECK(card.html.find("> <") == std::string::npos);
    CHECK(card.html.find('\n') == std::string::npos);
    CHECK(card.bundle.collection_name == "Occupy Movement 2011/2012");

    // The archive and the original are attributed in separate regions.
    const auto original = card.html.find("me-original");
    const auto archive = card.html.find("me-archive");
    REQUIRE(original != std::string::npos);
    REQUIRE(archive != std::string::npos);
    CHECK(card.html.substr(original, archive - original).find("ARCHIVE-IT.ORG") == std::string::npos);
  }

  TEST_CASE("thumbnail with the stub renderer") {
    auto blast = fixture_analysis(kBlastUrim);
    StubRenderer stub;
    auto p = prefs("thumbnail", "viewport_width=4096,thumbnail_width=2048");
    const std::string png = render_thumbnail(blast, p, stub);
    const RgbImage img = decode_image(png);
    CHECK(img.width == 2048);
    CHECK(img.height == 156);
    CHECK(p.applied_header() == "viewport_width=4096,viewport_height=768,thumbnail_width=2048,thumbnail_height=156,timeout=60");

    auto d = prefs("thumbnail");
    const RgbImage small = decode_image(render_thumbnail(blast, d, stub));
    CHECK(small.width == 208);
    CHECK(small.height == 156);
    CHECK(render_thumbnail(blast, d, stub) == render_thumbnail(blast, d, stub));

    auto rb = prefs("thumbnail", "remove_banner=yes");
    render_thumbnail(blast, rb, stub);
    CHECK(rb.applied_header().find("remove_banner=yes") != std::string::npos);
  }

  TEST_CASE("word cloud sizes follow counts") {
    auto cloud = fixture_analysis(kCloudUrim);
    const WordCloud text = build_wordcloud(cloud, prefs("wordcloud", "textonly=yes"));
    CHECK_FALSE(text.png);
    REQUIRE(text.json);
    CHECK(nlohmann::json::parse(*text.json) == nlohmann::json::array({"egypt", "protest"}));

    const WordCloud img = build_wordcloud(cloud, prefs("wordcloud", "colormap=viridis,background_color=#102030"));
    REQUIRE(img.png);
    REQUIRE(img.layout.size() == 2);
    CHECK(img.layout[0].content == "egypt");
    CHECK(img.layout[0].font_scale == doctest::Approx(2 * img.layout[1].font_scale));
    const RgbImage decoded = decode_image(*img.png);
    CHECK(decoded.width == kWordCloudWidth);
    CHECK(decoded.height == kWordCloudHeight);
    CHECK(decoded.at(0, 0)[0] == 0x10);
    CHECK(decoded.at(0, 0)[2] == 0x30);

    CHECK_THROWS_AS(build_wordcloud(cloud, prefs("wordcloud", "colormap=nope")), BadPreference);
  }

  TEST_CASE("word cloud layout keeps terms inside and apart") {
    std::vector<std::pair<std::string, std::size_t>> terms;
    for (int i = 0; i < 50; ++i) terms.emplace_back("term" + std::to_string(i), 60 - i);
    const auto layout = layout_wordcloud(terms, 800, 400, "inferno");
    CHECK(layout.size() >= 30);
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const auto& a = layout[i];
      CHECK(a.x >= 0);
      CHECK(a.y >= 0);
      CHECK(a.x + a.width <= 800);
      CHECK(a.y + a.height <= 400);
      for (std::size_t j = i + 1; j < layout.size(); ++j) {
        const auto& b = layout[j];
        const bool overlap = a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height;
        CHECK_FALSE(overlap);
      }
    }
    for (std::size_t i = 1; i < layout.size(); ++i) CHECK(layout[i].font_scale <= layout[i - 1].font_scale);
  }

  TEST_CASE("deadlines abort long builds") {
    auto blast = fixture_analysis(kBlastUrim);
    const auto past = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    CHECK_THROWS_AS(build_imagereel(blast, prefs("imagereel"), past), DeadlineExceeded);
  }
}
