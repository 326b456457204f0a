#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mkit/http.h"
#include "mkit/image.h"
#include "mkit/memento.h"

namespace mkit {

struct ScoringWeights {
  double k1 = 0.1;
  double k2 = 0.4;
  double k3 = 10;
  double k4 = 0.5;
  double k5 = 10;
};

inline constexpr std::size_t kHistogramColumns = 768;  // 256 bins per RGB channel

struct ImageFeatures {
  std::size_t N = 0;
  std::size_t n = 0;
  int width = 0;
  int height = 0;
  double s = 0;          // width * height
  std::size_t h = 0;     // zero-valued histogram columns
  double r = 0;          // width / height
  std::size_t c = 0;     // distinct RGB triples
  std::size_t byte_size = 0;
  std::string content_type;
  bool is_a_memento = false;
  std::map<std::string, std::string> hashes;  // perceptual hashes, informational
};

// Throws UndecodableImage.
ImageFeatures compute_image_features(std::string_view bytes, std::size_t n, std::size_t N);
// Features of an already decoded image.
void fill_pixel_features(const RgbImage& image, ImageFeatures& features);

double score_image(const ImageFeatures& f, const ScoringWeights& w);

// IMG src values, then srcset entries, resolved and de-duplicated.
std::vector<std::string> extract_image_candidates(std::string_view html, std::string_view base_uri);

enum class FetchStatus { Ok, Failed, NotAMemento };
std::string to_string(FetchStatus status);

struct ImageCandidate {
  std::string urim;          // as found in the page
  std::string fetched_uri;   // URI actually fetched (after negotiation)
  std::optional<ImageFeatures> features;
  std::optional<double> score;
  FetchStatus fetch_status = FetchStatus::Failed;
  std::string detail;        // failure reason
};

inline constexpr int kMinImageDimension = 32;

struct SelectionOptions {
  std::string default_image_uri;
  ScoringWeights weights;
  int min_dimension = kMinImageDimension;
  unsigned max_parallel_fetches = 8;
  // When false, the meta-tag shortcut is skipped and every candidate is scored.
  bool use_meta = true;
};

struct ImageSelection {
  std::string best_uri;
  enum class Source { Meta, Scored, Default } source = Source::Default;
  std::string meta_key;                 // e.g. "og:image" when source is Meta
  std::vector<ImageCandidate> candidates;  // page order
  std::vector<std::size_t> ranking;     // indices into candidates, best first
};

// Scores every candidate of the augmented content of `record`.
ImageSelection analyze_images(const MementoRecord& record, const Fetcher& fetcher,
                              const SelectionOptions& options);

struct MetaImage {
  std::string uri;
  std::string key;
};
// First of og:image, twitter:image, twitter:image:src, image that is a memento answering 200.
std::optional<MetaImage> find_meta_image(const MementoRecord& record, const Fetcher& fetcher);

// Meta shortcut first, then analyze_images, then the default image.
ImageSelection select_best_image(const MementoRecord& record, const Fetcher& fetcher,
                                 const SelectionOptions& options);

}  // namespace mkit
