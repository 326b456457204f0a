#include "mkit/analysis.h"

#include <functional>

#include "mkit/errors.h"
#include "mkit/html.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit {

std::string to_string(LinkStatus status) { return status == LinkStatus::Live ? "Live" : "Rotten"; }

std::optional<std::string> collection_id_of(std::string_view urim, const ArchiveProfile& profile) {
  if (!profile.collection_in_path) return std::nullopt;
  const auto seg = find_datetime_segment(urim);
  if (!seg || seg->offset < 2 || urim[seg->offset - 1] != '/') return std::nullopt;
  const std::size_t end = seg->offset - 1;
  const std::size_t start = urim.rfind('/', end - 1);
  if (start == std::string_view::npos) return std::nullopt;
  const std::string_view id = urim.substr(start + 1, end - start - 1);
  if (id.empty()) return std::nullopt;
  for (char c : id)
    if (c < '0' || c > '9') return std::nullopt;
  return std::string(id);
}

CollectionPage parse_collection_page(std::string_view page) {
  CollectionPage out;
  const auto doc = html::Document::parse(page);
  const auto meta = mkit::page_metadata(page);
  if (auto og = meta.find("og:title"); og != meta.end() && !text::trim(og->second).empty())
    out.name = text::collapse_whitespace(og->second);
  if (!out.name)
    if (const html::Node* h1 = doc.first_by_tag("h1")) {
      std::string t = text::collapse_whitespace(h1->text_content());
      if (!t.empty()) out.name = std::move(t);
    }
  std::vector<const html::Node*> seeds;
  doc.for_each_element([&](const html::Node& node) {
    const std::string* cls = node.attr("class");
    if (!cls || !node.attr("data-uri")) return;
    for (const auto& c : text::split(*cls, ' '))
      if (c == "seed") {
        seeds.push_back(&node);
        return;
      }
  });
  for (const html::Node* node : seeds) {
    SeedMetadata meta;
    std::string key;
    std::function<void(const html::Node&)> walk = [&](const html::Node& n) {
      if (n.is_element("dt")) key = text::collapse_whitespace(n.text_content());
      if (n.is_element("dd") && !key.empty()) meta[key].push_back(text::collapse_whitespace(n.text_content()));
      for (const auto& child : n.children) walk(*child);
    };
    walk(*node);
    out.seeds.emplace(std::string(text::trim(*node->attr("data-uri"))), std::move(meta));
  }
  return out;
}

std::string archive_name_of(const MementoRecord& record, const std::vector<ArchiveProfile>& profiles) {
  if (const ArchiveProfile* p = match_profile(record.urim, profiles); p && p->display_name_override)
    return *p->display_name_override;
  return to_upper_ascii(record.archive_domain);
}

MementoAnalysis::MementoAnalysis(std::string urim, std::shared_ptr<const Fetcher> fetcher,
                                 std::shared_ptr<const AnalysisConfig> config)
    : urim_(std::move(urim)), fetcher_(std::move(fetcher)), config_(std::move(config)) {}

const MementoRecord& MementoAnalysis::record() {
  return record_.get([&] { return load_memento(urim_, *fetcher_, config_->profiles); });
}

const ContentData& MementoAnalysis::content() {
  return content_.get([&] {
    const std::string& html = record().raw_or_augmented();
    return ContentData{extract_title(html), extract_description(html)};
  });
}

const std::map<std::string, std::string>& MementoAnalysis::page_metadata() {
  return metadata_.get([&] { return mkit::page_metadata(record().raw_or_augmented()); });
}

const ImageSelection& MementoAnalysis::images() {
  return images_.get([&] {
    SelectionOptions opt;
    opt.default_image_uri = config_->default_image_uri;
    opt.weights = config_->weights;
    opt.max_parallel_fetches = config_->max_parallel_fetches;
    opt.use_meta = false;
    return analyze_images(record(), *fetcher_, opt);
  });
}

const ImageSelection& MementoAnalysis::best_image() {
  return best_image_.get([&] {
    if (auto meta = find_meta_image(record(), *fetcher_)) {
      ImageSelection sel;
      sel.best_uri = std::move(meta->uri);
      sel.source = ImageSelection::Source::Meta;
      sel.meta_key = std::move(meta->key);
      return sel;
    }
    return images();
  });
}

const CollectionPage* MementoAnalysis::collection_page() {
  const ArchiveData& a = archive();
  if (!a.collection_uri) return nullptr;
  // archive() stores the page when it could fetch it.
  return &collection_page_.get([] { return CollectionPage{}; });
}

const ArchiveData& MementoAnalysis::archive() {
  return archive_.get([&] {
    const MementoRecord& rec = record();
    ArchiveData a;
    a.archive_uri = rec.archive_home();
    a.archive_name = archive_name_of(rec, config_->profiles);
    a.archive_favicon = discover_archive_favicon(a.archive_uri, *fetcher_, config_->favicon_resolver);
    if (const ArchiveProfile* p = match_profile(rec.urim, config_->profiles)) {
      a.collection_id = collection_id_of(rec.urim, *p);
      if (a.collection_id && p->collection_uri_template) {
        std::string uri = *p->collection_uri_template;
        if (const auto pos = uri.find("{id}"); pos != std::string::npos) uri.replace(pos, 4, *a.collection_id);
        a.collection_uri = std::move(uri);
        try {
          const auto res = http_get(*fetcher_, *a.collection_uri);
          if (res.status == 200) {
            auto page = parse_collection_page(res.body);
            a.collection_name = page.name;
            collection_page_.get([&] { return std::move(page); });
          }
        } catch (const Error&) {
        }
      }
    }
    return a;
  });
}

const OriginalData& MementoAnalysis::original() {
  return original_.get([&] {
    const MementoRecord& rec = record();
    OriginalData o;
    o.original_uri = rec.uri_r;
    if (const auto u = parse_absolute_uri(rec.uri_r)) o.original_domain = u->host;
    o.original_favicon = discover_original_favicon(rec, *fetcher_, config_->favicon_resolver);
    try {
      if (http_get(*fetcher_, rec.uri_r).status == 200) o.linkstatus = LinkStatus::Live;
    } catch (const Error&) {
    }
    return o;
  });
}

const SeedData& MementoAnalysis::seed() {
  return seed_.get([&] {
    const MementoRecord& rec = record();
    SeedData s;
    s.original_url = rec.uri_r;
    s.timemap_uri = rec.timemap_uri;
    s.timegate_uri = rec.timegate_uri;
    if (rec.timemap_uri) {
      const auto res = http_get(*fetcher_, *rec.timemap_uri);
      if (res.status == 200) {
        s.timemap = parse_timemap(res.body);
        if (s.timemap->uri_t.empty()) s.timemap->uri_t = *rec.timemap_uri;
        if (s.timemap->uri_r.empty()) s.timemap->uri_r = rec.uri_r;
      }
    }
    if (const CollectionPage* page = collection_page()) {
      auto it = page->seeds.find(rec.uri_r);
      if (it == page->seeds.end()) {
        // Seeds are often listed with or without a trailing slash.
        const std::string alt = !rec.uri_r.empty() && rec.uri_r.back() == '/'
                                    ? rec.uri_r.substr(0, rec.uri_r.size() - 1)
                                    : rec.uri_r + "/";
        it = page->seeds.find(alt);
      }
      if (it != page->seeds.end()) s.metadata = it->second;
    }
    return s;
  });
}

std::vector<ScoredParagraph> MementoAnalysis::paragraphs(std::string_view algorithm) {
  return rank_paragraphs(record().raw_or_augmented(), algorithm);
}

SentenceRanking MementoAnalysis::sentences(std::string_view algorithm_pair) {
  return rank_sentences(record().raw_or_augmented(), algorithm_pair);
}

const std::vector<std::pair<std::string, std::size_t>>& MementoAnalysis::word_frequencies() {
  return words_.get([&] { return mkit::word_frequencies(record().raw_or_augmented(), config_->stopwords); });
}

std::string MementoAnalysis::timetravel_uri() {
  const MementoRecord& rec = record();
  return build_timetravel_uri(rec.uri_r, rec.memento_datetime, config_->timetravel_base);
}

}  // namespace mkit
