#include <doctest.h>

#include <random>

#include "mkit/color.h"
#include "mkit/errors.h"
#include "mkit/preferences.h"

using namespace mkit;

TEST_SUITE("preferences") {
  TEST_CASE("thumbnail golden header") {
    const auto p = parse_prefer("viewport_width=4096,thumbnail_width=2048", "thumbnail");
    CHECK(p.applied_header() ==
          "viewport_width=4096,viewport_height=768,thumbnail_width=2048,thumbnail_height=156,timeout=60");
    CHECK(p.get_int("thumbnail_width") == 2048);
  }

  TEST_CASE("defaults when no header") {
    const auto p = parse_prefer(std::nullopt, "thumbnail");
    CHECK(p.get_int("viewport_width") == 1024);
    CHECK(p.get_int("thumbnail_width") == 208);
    CHECK_FALSE(p.get_flag("remove_banner"));
    CHECK(p.applied_header().find("remove_banner") == std::string::npos);
    CHECK(parse_prefer(std::nullopt, "imagereel").applied_header() ==
          "duration=100,imagecount=5,width=320,height=240");
    CHECK(parse_prefer(std::nullopt, "wordcloud").applied_header() ==
          "colormap=inferno,background_color=white,textonly=no");
    CHECK(parse_prefer(std::nullopt, "socialcard").applied_header() ==
          "datauri_favicon=no,datauri_image=no,using_remote_javascript=yes,minify_markup=no");
    CHECK(parse_prefer(std::nullopt, "contentdata").applied_header().empty());
  }

  TEST_CASE("clamping, fallback and unknown names") {
    auto p = parse_prefer("viewport_width=99999, viewport_height=-5, timeout=abc, bogus=1", "thumbnail");
    CHECK(p.get_int("viewport_width") == 5120);
    CHECK(p.get_int("viewport_height") == 1);
    CHECK(p.get_int("timeout") == 60);
    CHECK(parse_prefer("imagecount=50", "imagereel").get_int("imagecount") == 10);
    CHECK(parse_prefer("thumbnail_width=99999999999999999999999", "thumbnail").get_int("thumbnail_width") == 5120);
  }

  TEST_CASE("remove_banner echoes only when requested") {
    auto p = parse_prefer("remove_banner=yes", "thumbnail");
    CHECK(p.get_flag("remove_banner"));
    CHECK(p.applied_header().find("remove_banner=yes") != std::string::npos);
    p.set_applied("remove_banner", "no");
    CHECK(p.applied_header().find("remove_banner=no") != std::string::npos);
  }

  TEST_CASE("quoted values and parameters") {
    const auto pairs = split_prefer_header(R"(Colormap="a,b"; x=1, textonly = yes ,, =bad)");
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].first == "colormap");
    CHECK(pairs[0].second == "a,b");
    CHECK(pairs[1].second == "yes");
  }

  TEST_CASE("algorithm and text validation") {
    CHECK(parse_prefer("algorithm=justext/textrank", "sentencerank").applied_header() ==
          "algorithm=justext/textrank");
    CHECK_THROWS_AS(parse_prefer("algorithm=lsa", "sentencerank"), UnknownAlgorithm);
    CHECK_THROWS_AS(parse_prefer("colormap=nope", "wordcloud"), BadPreference);
    CHECK_THROWS_AS(parse_prefer("background_color=#12", "wordcloud"), BadPreference);
    CHECK(parse_prefer("colormap=viridis_r,background_color=#000", "wordcloud").get("colormap") == "viridis_r");
  }

  TEST_CASE("re-sending the applied header is idempotent") {
    std::mt19937 rng(11);
    const char* endpoints[] = {"thumbnail", "imagereel", "docreel", "socialcard"};
    for (int i = 0; i < 200; ++i) {
      const std::string ep = endpoints[rng() % 4];
      std::string header;
      for (const auto& spec : preference_specs(ep)) {
        if (rng() % 2) continue;
        if (!header.empty()) header += ",";
        header += spec.name + "=";
        if (spec.type == PreferenceType::Int)
          header += std::to_string(static_cast<long>(rng() % 12000) - 100);
        else
          header += (rng() % 3 == 0) ? "maybe" : (rng() % 2 ? "yes" : "no");
      }
      const auto first = parse_prefer(header, ep);
      const auto second = parse_prefer(first.applied_header(), ep);
      CHECK(first.applied() == second.applied());
    }
  }
}

TEST_SUITE("color") {
  TEST_CASE("css color forms") {
    CHECK(parse_color("white") == Rgb{255, 255, 255});
    CHECK(parse_color("RebeccaPurple") == Rgb{102, 51, 153});
    CHECK(parse_color("#0f8") == Rgb{0, 255, 136});
    CHECK(parse_color("#102030") == Rgb{16, 32, 48});
    CHECK(parse_color("rgb(1, 2, 3)") == Rgb{1, 2, 3});
    CHECK(parse_color("rgb(100%,0%,50%)") == Rgb{255, 0, 128});
    CHECK(parse_color("hsl(120, 100%, 50%)") == Rgb{0, 255, 0});
    CHECK(parse_color("hsl(0, 0%, 50%)") == Rgb{128, 128, 128});
    CHECK(parse_color("hsv(240, 100%, 100%)") == Rgb{0, 0, 255});
    CHECK_FALSE(parse_color("#12345"));
    CHECK_FALSE(parse_color("blurple"));
    CHECK_FALSE(parse_color("rgb(1,2)"));
  }

  TEST_CASE("colormap endpoints and reversal") {
    CHECK(has_colormap("inferno"));
    CHECK(has_colormap("inferno_r"));
    CHECK_FALSE(has_colormap("nope_r"));
    CHECK(sample_colormap("inferno", 0.0) == Rgb{0, 0, 4});
    CHECK(sample_colormap("inferno", 1.0) == Rgb{252, 255, 164});
    CHECK(sample_colormap("inferno_r", 0.0) == Rgb{252, 255, 164});
    CHECK(sample_colormap("gray", 1.0) == Rgb{255, 255, 255});
    CHECK_THROWS_AS(sample_colormap("nope", 0.5), BadPreference);
  }
}
