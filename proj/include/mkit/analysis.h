#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mkit/content.h"
#include "mkit/favicon.h"
#include "mkit/http.h"
#include "mkit/image_selection.h"
#include "mkit/memento.h"

namespace mkit {

struct AnalysisConfig {
  std::vector<ArchiveProfile> profiles = default_archive_profiles();
  std::string timetravel_base = "http://timetravel.mementoweb.org";
  std::string default_image_uri;
  FaviconResolver favicon_resolver;
  ScoringWeights weights;
  unsigned max_parallel_fetches = 8;
  StopwordList stopwords = default_stopwords();
};

struct ContentData {
  std::string title;
  std::string snippet;
};

struct ArchiveData {
  std::string archive_uri;
  std::string archive_name;
  FaviconResult archive_favicon;
  std::optional<std::string> collection_id;
  std::optional<std::string> collection_name;
  std::optional<std::string> collection_uri;
};

enum class LinkStatus { Live, Rotten };
std::string to_string(LinkStatus status);

struct OriginalData {
  std::string original_uri;
  std::string original_domain;
  FaviconResult original_favicon;
  LinkStatus linkstatus = LinkStatus::Rotten;
};

// Seed metadata: field name -> values, as listed on the collection page.
using SeedMetadata = std::map<std::string, std::vector<std::string>>;

struct SeedData {
  std::string original_url;
  std::optional<std::string> timemap_uri;
  std::optional<std::string> timegate_uri;
  std::optional<TimeMapStats> timemap;
  std::optional<SeedMetadata> metadata;
};

struct CollectionPage {
  std::optional<std::string> name;
  std::map<std::string, SeedMetadata> seeds;  // keyed by seed URI
};

// Collection id from a "/<id>/<datetime>/..." path, when the profile has one.
std::optional<std::string> collection_id_of(std::string_view urim, const ArchiveProfile& profile);

// Name from og:title, else the first H1. Seeds are elements with class "seed"
// and a data-uri attribute, holding dt/dd pairs.
CollectionPage parse_collection_page(std::string_view html);

// Upper-case registered domain unless the profile overrides it.
std::string archive_name_of(const MementoRecord& record, const std::vector<ArchiveProfile>& profiles);

// Everything derived from one URI-M. Each facet is computed on first use and
// kept; concurrent callers of the same facet wait for the first computation.
class MementoAnalysis {
 public:
  MementoAnalysis(std::string urim, std::shared_ptr<const Fetcher> fetcher,
                  std::shared_ptr<const AnalysisConfig> config);

  const std::string& urim() const { return urim_; }
  const Fetcher& fetcher() const { return *fetcher_; }
  const AnalysisConfig& config() const { return *config_; }

  // Throws InvalidUri, NotAMemento, ConnectionFailed, FetchTimeout.
  const MementoRecord& record();
  const ContentData& content();
  const std::map<std::string, std::string>& page_metadata();
  // Meta shortcut, then the scored ranking, then the default image.
  const ImageSelection& best_image();
  // Every candidate scored, no meta shortcut.
  const ImageSelection& images();
  const ArchiveData& archive();
  const OriginalData& original();
  const SeedData& seed();
  std::vector<ScoredParagraph> paragraphs(std::string_view algorithm);
  SentenceRanking sentences(std::string_view algorithm_pair);
  const std::vector<std::pair<std::string, std::size_t>>& word_frequencies();
  std::string timetravel_uri();

 private:
  template <typename T>
  struct Slot {
    std::mutex mutex;
    std::optional<T> value;
    template <typename F>
    const T& get(F&& compute) {
      std::lock_guard lock(mutex);
      if (!value) value.emplace(compute());
      return *value;
    }
  };

  std::string urim_;
  std::shared_ptr<const Fetcher> fetcher_;
  std::shared_ptr<const AnalysisConfig> config_;
  Slot<MementoRecord> record_;
  Slot<ContentData> content_;
  Slot<std::map<std::string, std::string>> metadata_;
  Slot<ImageSelection> best_image_;
  Slot<ImageSelection> images_;
  Slot<ArchiveData> archive_;
  Slot<OriginalData> original_;
  Slot<SeedData> seed_;
  Slot<std::vector<std::pair<std::string, std::size_t>>> words_;
  Slot<CollectionPage> collection_page_;

  const CollectionPage* collection_page();
};

}  // namespace mkit
