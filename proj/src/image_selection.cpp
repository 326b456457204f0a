#include "mkit/image_selection.h"

#include <algorithm>
#include <atomic>
#include <bitset>
#include <thread>
#include <unordered_set>

#include "mkit/content.h"
#include "mkit/errors.h"
#include "mkit/html.h"
#include "mkit/imagehash.h"
#include "mkit/text.h"

namespace mkit {

void fill_pixel_features(const RgbImage& image, ImageFeatures& f) {
  f.width = image.width;
  f.height = image.height;
  f.s = static_cast<double>(image.width) * image.height;
  f.r = image.height ? static_cast<double>(image.width) / image.height : 0.0;
  std::bitset<kHistogramColumns> seen;
  std::unordered_set<std::uint32_t> colors;
  colors.reserve(4096);
  for (std::size_t i = 0; i + 2 < image.pixels.size(); i += 3) {
    const auto r = image.pixels[i], g = image.pixels[i + 1], b = image.pixels[i + 2];
    seen.set(r);
    seen.set(256 + g);
    seen.set(512 + b);
    colors.insert((std::uint32_t{r} << 16) | (std::uint32_t{g} << 8) | b);
  }
  f.h = kHistogramColumns - seen.count();
  f.c = colors.size();
}

ImageFeatures compute_image_features(std::string_view bytes, std::size_t n, std::size_t N) {
  ImageFeatures f;
  f.n = n;
  f.N = N;
  f.byte_size = bytes.size();
  f.content_type = sniff_image_type(bytes);
  const RgbImage image = decode_image(bytes);
  fill_pixel_features(image, f);
  f.hashes = perceptual_hashes(image);
  return f;
}

double score_image(const ImageFeatures& f, const ScoringWeights& w) {
  return w.k1 * (static_cast<double>(f.N) - static_cast<double>(f.n)) + w.k2 * f.s -
         w.k3 * static_cast<double>(f.h) - w.k4 * f.r + w.k5 * static_cast<double>(f.c);
}

namespace {

std::vector<std::string> srcset_urls(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; };
  while (i < s.size()) {
    while (i < s.size() && (space(s[i]) || s[i] == ',')) ++i;
    const std::size_t start = i;
    while (i < s.size() && !space(s[i])) ++i;
    std::string_view url = s.substr(start, i - start);
    bool ended = false;
    while (!url.empty() && url.back() == ',') {
      url.remove_suffix(1);
      ended = true;
    }
    if (!url.empty()) out.emplace_back(url);
    if (ended) continue;
    // Descriptors run to the next comma outside parentheses.
    int depth = 0;
    while (i < s.size() && (s[i] != ',' || depth > 0)) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')' && depth > 0) --depth;
      ++i;
    }
  }
  return out;
}

bool fetchable(std::string_view uri) {
  const auto u = parse_absolute_uri(uri);
  return u && (u->scheme == "http" || u->scheme == "https");
}

bool is_memento_response(const HttpResponse& res) {
  return res.status == 200 && res.headers.has("Memento-Datetime");
}

ImageCandidate process_candidate(const std::string& uri, std::size_t n, std::size_t N,
                                 const MementoRecord& record, const std::optional<std::string>& gate,
                                 const Fetcher& fetcher, const SelectionOptions& options) {
  ImageCandidate cand;
  cand.urim = uri;
  cand.fetched_uri = uri;
  try {
    HttpResponse res = http_get(fetcher, uri);
    bool memento = is_memento_response(res);
    if (!memento) {
      std::optional<std::string> negotiated;
      if (gate) {
        const auto original = original_from_urim(uri).value_or(uri);
        negotiated = negotiate_datetime(original, record.memento_datetime, *gate, fetcher);
      }
      if (!negotiated) {
        cand.fetch_status = FetchStatus::NotAMemento;
        cand.detail = "no memento of image";
        return cand;
      }
      cand.fetched_uri = *negotiated;
      res = http_get(fetcher, *negotiated);
      memento = is_memento_response(res);
      if (!memento) {
        cand.fetch_status = FetchStatus::NotAMemento;
        cand.detail = "negotiated URI is not a memento";
        return cand;
      }
    }
    ImageFeatures f = compute_image_features(res.body, n, N);
    f.is_a_memento = true;
    if (const auto ct = res.media_type(); !ct.empty() && ct.rfind("image/", 0) == 0) f.content_type = ct;
    if (f.width < options.min_dimension || f.height < options.min_dimension) {
      cand.fetch_status = FetchStatus::Failed;
      cand.detail = "smaller than " + std::to_string(options.min_dimension) + "x" +
                    std::to_string(options.min_dimension);
      return cand;
    }
    cand.score = score_image(f, options.weights);
    cand.features = std::move(f);
    cand.fetch_status = FetchStatus::Ok;
  } catch (const Error& e) {
    cand.fetch_status = FetchStatus::Failed;
    cand.detail = e.what();
  }
  return cand;
}

}  // namespace

std::vector<std::string> extract_image_candidates(std::string_view page, std::string_view base_uri) {
  const auto doc = html::Document::parse(page);
  const auto images = doc.elements_by_tag("img");
  std::vector<std::string> raw;
  for (const html::Node* img : images)
    if (const std::string* src = img->attr("src"); src && !text::trim(*src).empty())
      raw.emplace_back(text::trim(*src));
  for (const html::Node* img : images)
    if (const std::string* set = img->attr("srcset"))
      for (auto& u : srcset_urls(*set)) raw.push_back(std::move(u));

  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : raw) {
    std::string resolved = resolve_reference(base_uri, r);
    if (resolved.empty() || !fetchable(resolved)) continue;
    if (seen.insert(resolved).second) out.push_back(std::move(resolved));
  }
  return out;
}

std::string to_string(FetchStatus status) {
  switch (status) {
    case FetchStatus::Ok:
      return "ok";
    case FetchStatus::Failed:
      return "failed";
    case FetchStatus::NotAMemento:
      return "not_a_memento";
  }
  return "failed";
}

ImageSelection analyze_images(const MementoRecord& record, const Fetcher& fetcher,
                              const SelectionOptions& options) {
  ImageSelection sel;
  const std::string base = record.final_urim.empty() ? record.urim : record.final_urim;
  const auto uris = extract_image_candidates(*record.content_augmented, base);
  const auto gate = timegate_base_of(record);
  sel.candidates.resize(uris.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < uris.size(); i = next++)
      sel.candidates[i] = process_candidate(uris[i], i, uris.size(), record, gate, fetcher, options);
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.max_parallel_fetches, static_cast<unsigned>(uris.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < sel.candidates.size(); ++i)
    if (sel.candidates[i].score) sel.ranking.push_back(i);
  std::stable_sort(sel.ranking.begin(), sel.ranking.end(), [&](std::size_t a, std::size_t b) {
    return *sel.candidates[a].score > *sel.candidates[b].score;
  });
  if (!sel.ranking.empty()) {
    sel.best_uri = sel.candidates[sel.ranking.front()].urim;
    sel.source = ImageSelection::Source::Scored;
  } else {
    sel.best_uri = options.default_image_uri;
    sel.source = ImageSelection::Source::Default;
  }
  return sel;
}

std::optional<MetaImage> find_meta_image(const MementoRecord& record, const Fetcher& fetcher) {
  const std::string base = record.final_urim.empty() ? record.urim : record.final_urim;
  const auto meta = page_metadata(*record.content_augmented);
  for (const char* key : {"og:image", "twitter:image", "twitter:image:src", "image"}) {
    auto it = meta.find(key);
    if (it == meta.end() || it->second.empty()) continue;
    const std::string uri = resolve_reference(base, it->second);
    if (!fetchable(uri)) continue;
    try {
      if (is_memento_response(http_get(fetcher, uri))) return MetaImage{uri, key};
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

ImageSelection select_best_image(const MementoRecord& record, const Fetcher& fetcher,
                                 const SelectionOptions& options) {
  if (options.use_meta)
    if (auto meta = find_meta_image(record, fetcher)) {
      ImageSelection sel;
      sel.best_uri = std::move(meta->uri);
      sel.source = ImageSelection::Source::Meta;
      sel.meta_key = std::move(meta->key);
      return sel;
    }
  return analyze_images(record, fetcher, options);
}

}  // namespace mkit
