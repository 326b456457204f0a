#pragma once

#include <memory>
#include <string>

#include "mkit/analysis.h"
#include "mkit/mock_archive.h"

// The checked-in manifest, loaded once per process.
inline std::shared_ptr<const mkit::mock::Archive> fixture_archive() {
  static const auto archive = std::make_shared<const mkit::mock::Archive>(
      mkit::mock::Manifest::load(std::string(MKIT_DATA_DIR) + "/fixtures/manifest.json"));
  return archive;
}

inline std::shared_ptr<const mkit::Fetcher> fixture_fetcher() {
  static const auto fetcher = std::make_shared<const mkit::mock::InProcessFetcher>(fixture_archive());
  return fetcher;
}

inline std::shared_ptr<const mkit::AnalysisConfig> fixture_config() {
  static const auto config = [] {
    auto c = std::make_shared<mkit::AnalysisConfig>();
    c->default_image_uri = "http://service.test/static/images/default-globe.png";
    return std::shared_ptr<const mkit::AnalysisConfig>(c);
  }();
  return config;
}

inline mkit::MementoAnalysis fixture_analysis(const std::string& urim) {
  return mkit::MementoAnalysis(urim, fixture_fetcher(), fixture_config());
}

inline const std::string kBlastUrim =
    "https://www.webarchive.org.uk/wayback/archive/20090522221251/http://blasttheory.co.uk/";
inline const std::string kCnnUrim =
    "http://wayback.archive-it.org/2358/20110211072257/http://news.blogs.cnn.com/category/world/egypt-world-latest-news/";
inline const std::string kNationUrim =
    "http://wayback.archive-it.org/2950/20120510205501/http://www.thenation.com/blog/167643/"
    "may-day-special-occupyusa-blog-may-1-frequent-updates/";
inline const std::string kArrestsUrim =
    "http://wayback.archive-it.org/2950/20120814042704/http://occupyarrests.wordpress.com/";
inline const std::string kReelUrim = "http://web.archive.example/web/20140101000000/http://reel.example/";
inline const std::string kPlainUrim = "http://web.archive.example/web/20130101000000/http://plain.example/";
inline const std::string kMetaUrim = "http://web.archive.example/web/20130101000000/http://meta.example/";
inline const std::string kCloudUrim = "http://web.archive.example/web/20130101000000/http://cloud.example/";
