#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "mkit/analysis.h"
#include "mkit/color.h"
#include "mkit/image.h"
#include "mkit/preferences.h"

namespace mkit {

using Deadline = std::chrono::steady_clock::time_point;
// Throws DeadlineExceeded once the deadline has passed.
void check_deadline(const std::optional<Deadline>& deadline, const char* what);

// Card-facing facts for one memento.
struct SurrogateBundle {
  std::string urim;
  std::string uri_r;
  Timestamp memento_datetime;
  std::string title;
  std::string snippet;
  std::string best_image_uri;
  bool best_image_is_default = false;
  std::string archive_name;
  std::string archive_uri;
  std::optional<std::string> archive_favicon;
  std::optional<std::string> original_favicon;
  std::string original_domain;
  LinkStatus original_linkstatus = LinkStatus::Rotten;
  std::string timetravel_uri;
  std::optional<TimeMapStats> timemap;
  std::optional<std::string> collection_id;
  std::optional<std::string> collection_name;
  std::optional<std::string> collection_uri;
};

SurrogateBundle build_bundle(MementoAnalysis& analysis);

// ---- social card

struct SocialCardOptions {
  bool datauri_favicon = false;
  bool datauri_image = false;
  bool using_remote_javascript = true;
  bool minify_markup = false;
  // Where the card script and the default image are served from.
  std::string service_base = "http://localhost:5550";

  static SocialCardOptions from(const PreferenceSet& prefs, std::string service_base);
};

struct SocialCard {
  std::string html;
  SurrogateBundle bundle;
};

inline constexpr const char* kCardScriptPath = "/static/js/mementoembed-card.js";
inline constexpr const char* kDefaultImagePath = "/static/images/default-globe.png";

SocialCard build_social_card(MementoAnalysis& analysis, const SocialCardOptions& options);
// Whitespace between tags removed, runs of whitespace collapsed outside <pre>.
std::string minify_html(std::string_view html);
// The script referenced by cards built with using_remote_javascript=yes.
const std::string& card_script();

// ---- thumbnail

struct RenderRequest {
  std::string uri;
  int viewport_width = 1024;
  int viewport_height = 768;
  std::chrono::seconds timeout{60};
};

// Screenshot backend: PNG bytes of the viewport. Throws RendererUnavailable
// or RenderTimeout.
class Renderer {
 public:
  virtual ~Renderer() = default;
  virtual std::string render(const RenderRequest& request) const = 0;
};

// Runs `<argv...> --url U --width W --height H --timeout T` and reads a PNG
// from its standard output. Killed when the timeout passes.
class CommandRenderer final : public Renderer {
 public:
  explicit CommandRenderer(std::vector<std::string> argv) : argv_(std::move(argv)) {}
  std::string render(const RenderRequest& request) const override;

 private:
  std::vector<std::string> argv_;
};

// Deterministic test pattern derived from the URI.
class StubRenderer final : public Renderer {
 public:
  std::string render(const RenderRequest& request) const override;
};

RgbImage test_pattern(std::string_view uri, int width, int height);

// Uses the banner-free URI-M when remove_banner=yes and the archive has a
// rewrite for it; otherwise records remove_banner=no in prefs.
std::string render_thumbnail(MementoAnalysis& analysis, PreferenceSet& prefs, const Renderer& renderer);

// ---- imagereel and docreel

inline constexpr int kFadeInFrames = 10;
inline constexpr int kHoldFrames = 1;
inline constexpr int kFadeOutFrames = 10;

struct FramePlanEntry {
  enum class Kind { Image, Sentence } kind = Kind::Image;
  std::string source;  // image URI-M or sentence text
  int fade_in = kFadeInFrames;
  int hold = kHoldFrames;
  int fade_out = kFadeOutFrames;

  int frames() const { return fade_in + hold + fade_out; }
};

struct FramePlan {
  std::vector<FramePlanEntry> entries;
  int width = 320;
  int height = 240;
  int frame_delay_cs = 5;

  std::size_t frame_count() const;
  // Brightness of frame i of an entry: fade in i/n, full hold, fade out.
  static double alpha(const FramePlanEntry& entry, int frame);
};

// Per-frame delay: duration spread evenly over one entry's frames, at least 2 cs.
int frame_delay_for(int duration_cs, const FramePlanEntry& entry);

// A piece of text or an image placed on the canvas.
struct DrawRecord {
  enum class Kind { Text, Image } kind = Kind::Text;
  std::string content;  // text, or image URI
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  double font_scale = 0;
  Rgb color{0, 0, 0};
  std::size_t count = 0;  // word cloud term count
};

struct Reel {
  std::string gif;
  FramePlan plan;
  std::vector<DrawRecord> overlay;  // drawn on every frame (docreel only)
};

// Top `imagecount` images by score, letterboxed on black. Throws
// ProductUnsupported with fewer than two usable images.
Reel build_imagereel(MementoAnalysis& analysis, const PreferenceSet& prefs,
                     std::optional<Deadline> deadline = std::nullopt);

// Images and readability/textrank sentences interleaved, image first, with an
// attribution band on every frame.
Reel build_docreel(MementoAnalysis& analysis, const PreferenceSet& prefs,
                   std::optional<Deadline> deadline = std::nullopt);

// ---- word cloud

inline constexpr std::size_t kWordCloudTerms = 50;
inline constexpr int kWordCloudWidth = 800;
inline constexpr int kWordCloudHeight = 400;

struct WordCloud {
  std::optional<std::string> png;            // absent when textonly
  std::optional<std::string> json;           // textonly: JSON array of words
  std::vector<DrawRecord> layout;            // placed terms, largest first
};

// Font scale is proportional to count; the common factor shrinks until the
// terms fit. Throws BadPreference for unknown colormaps or colors.
std::vector<DrawRecord> layout_wordcloud(const std::vector<std::pair<std::string, std::size_t>>& terms,
                                         int width, int height, std::string_view colormap);
WordCloud build_wordcloud(MementoAnalysis& analysis, const PreferenceSet& prefs);
RgbImage render_wordcloud(const std::vector<DrawRecord>& layout, int width, int height, Rgb background);

}  // namespace mkit
