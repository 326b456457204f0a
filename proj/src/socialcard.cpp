#include <sstream>

#include "mkit/draw.h"
#include "mkit/errors.h"
#include "mkit/html.h"
#include "mkit/products.h"
#include "mkit/text.h"

namespace mkit {

void check_deadline(const std::optional<Deadline>& deadline, const char* what) {
  if (deadline && std::chrono::steady_clock::now() > *deadline)
    throw DeadlineExceeded(std::string(what) + " did not finish before its deadline");
}

SurrogateBundle build_bundle(MementoAnalysis& analysis) {
  const MementoRecord& rec = analysis.record();
  SurrogateBundle b;
  b.urim = rec.urim;
  b.uri_r = rec.uri_r;
  b.memento_datetime = rec.memento_datetime;
  b.title = analysis.content().title;
  b.snippet = analysis.content().snippet;
  const auto& img = analysis.best_image();
  b.best_image_uri = img.best_uri;
  b.best_image_is_default = img.source == ImageSelection::Source::Default;
  const auto& archive = analysis.archive();
  b.archive_name = archive.archive_name;
  b.archive_uri = archive.archive_uri;
  b.archive_favicon = archive.archive_favicon.uri;
  b.collection_id = archive.collection_id;
  b.collection_name = archive.collection_name;
  b.collection_uri = archive.collection_uri;
  const auto& original = analysis.original();
  b.original_domain = original.original_domain;
  b.original_favicon = original.original_favicon.uri;
  b.original_linkstatus = original.linkstatus;
  b.timetravel_uri = analysis.timetravel_uri();
  return b;
}

SocialCardOptions SocialCardOptions::from(const PreferenceSet& prefs, std::string service_base) {
  SocialCardOptions o;
  o.datauri_favicon = prefs.get_flag("datauri_favicon");
  o.datauri_image = prefs.get_flag("datauri_image");
  o.using_remote_javascript = prefs.get_flag("using_remote_javascript");
  o.minify_markup = prefs.get_flag("minify_markup");
  o.service_base = std::move(service_base);
  return o;
}

namespace {

std::optional<std::string> as_data_uri(const std::string& uri, const Fetcher& fetcher) {
  try {
    const auto res = http_get(fetcher, uri);
    if (res.status != 200 || res.body.empty()) return std::nullopt;
    std::string type = res.media_type();
    if (type.rfind("image/", 0) != 0) type = sniff_image_type(res.body);
    if (type.empty()) return std::nullopt;
    return text::data_uri(type, res.body);
  } catch (const Error&) {
    return std::nullopt;
  }
}

const char* kInlineStyle =
    ".mementoembed-card{font-family:sans-serif;border:1px solid #ccc;border-radius:4px;max-width:500px;"
    "padding:8px;margin:0}"
    ".me-content{display:block}"
    ".me-title{font-weight:bold;font-size:1.1em;color:#1a0dab;text-decoration:none}"
    ".me-image{float:left;max-width:96px;max-height:96px;margin:4px 8px 4px 0}"
    ".me-snippet{margin:4px 0;font-size:.9em;color:#222}"
    ".me-original,.me-archive{clear:both;font-size:.8em;color:#555;margin-top:4px}"
    ".me-favicon{width:16px;height:16px;vertical-align:middle;margin-right:4px}";

}  // namespace

SocialCard build_social_card(MementoAnalysis& analysis, const SocialCardOptions& options) {
  SocialCard card;
  card.bundle = build_bundle(analysis);
  const SurrogateBundle& b = card.bundle;
  const Fetcher& fetcher = analysis.fetcher();
  using html::escape;

  std::string image = b.best_image_uri;
  if (b.best_image_is_default || image.empty()) image = options.service_base + kDefaultImagePath;
  if (options.datauri_image) {
    if (b.best_image_is_default || b.best_image_uri.empty() ||
        b.best_image_uri == options.service_base + kDefaultImagePath)
      image = text::data_uri("image/png", draw::default_image_png());
    else if (auto d = as_data_uri(image, fetcher))
      image = *d;
    else
      image = text::data_uri("image/png", draw::default_image_png());
  }
  auto favicon = [&](const std::optional<std::string>& uri) -> std::optional<std::string> {
    if (!uri || !options.datauri_favicon) return uri;
    return as_data_uri(*uri, fetcher);
  };
  const auto archive_favicon = favicon(b.archive_favicon);
  const auto original_favicon = favicon(b.original_favicon);
  const std::string when = b.memento_datetime.to_iso8601();

  std::ostringstream o;
  o << "<blockquote class=\"mementoembed-card\" data-urim=\"" << escape(b.urim) << "\" data-uri-r=\""
    << escape(b.uri_r) << "\" data-memento-datetime=\"" << when << "\">\n";
  if (!options.using_remote_javascript) o << "  <style>" << kInlineStyle << "</style>\n";
  o << "  <div class=\"me-content\">\n";
  o << "    <a class=\"me-title\" href=\"" << escape(b.urim) << "\">" << escape(b.title) << "</a>\n";
  o << "    <img class=\"me-image\" src=\"" << escape(image) << "\" alt=\"\">\n";
  o << "    <p class=\"me-snippet\">" << escape(b.snippet) << "</p>\n";
  o << "  </div>\n";
  o << "  <div class=\"me-original\">\n";
  if (original_favicon)
    o << "    <img class=\"me-favicon me-original-favicon\" src=\"" << escape(*original_favicon) << "\" alt=\"\">\n";
  if (b.original_linkstatus == LinkStatus::Live)
    o << "    <a class=\"me-original-link\" href=\"" << escape(b.uri_r) << "\">" << escape(b.original_domain)
      << "</a>\n";
  else
    o << "    <span class=\"me-original-domain\">" << escape(b.original_domain) << "</span>\n";
  o << "  </div>\n";
  o << "  <div class=\"me-archive\">\n";
  if (archive_favicon)
    o << "    <img class=\"me-favicon me-archive-favicon\" src=\"" << escape(*archive_favicon) << "\" alt=\"\">\n";
  o << "    <span class=\"me-preserved\">Preserved by</span> <a class=\"me-archive-name\" href=\""
    << escape(b.archive_uri) << "\">" << escape(b.archive_name) << "</a>\n";
  o << "    <time class=\"me-memento-datetime\" datetime=\"" << when << "\">"
    << b.memento_datetime.to_iso8601().substr(0, 10) << " " << when.substr(11, 8) << "</time>\n";
  o << "    <a class=\"me-timetravel\" href=\"" << escape(b.timetravel_uri) << "\">Other Versions</a>\n";
  o << "  </div>\n";
  o << "</blockquote>\n";
  if (options.using_remote_javascript)
    o << "<script async src=\"" << escape(options.service_base + kCardScriptPath)
      << "\" charset=\"utf-8\"></script>\n";
  card.html = o.str();
  if (options.minify_markup) card.html = minify_html(card.html);
  return card;
}

std::string minify_html(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  bool in_tag = false;
  int pre = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '<') {
      in_tag = true;
      if (in.substr(i, 4) == "<pre") ++pre;
      if (in.substr(i, 5) == "</pre" && pre > 0) --pre;
    }
    if (c == '>') in_tag = false;
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space || pre > 0) {
      out += c;
      continue;
    }
    // Skip whitespace that only separates tags.
    std::size_t j = i;
    while (j < in.size() && (in[j] == ' ' || in[j] == '\n' || in[j] == '\t' || in[j] == '\r')) ++j;
    const bool between_tags = !in_tag && (out.empty() || out.back() == '>') && (j == in.size() || in[j] == '<');
    if (!between_tags) out += ' ';
    i = j - 1;
  }
  return out;
}

const std::string& card_script() {
  static const std::string js =
      "(function(){\n"
      "  var cards = document.querySelectorAll('blockquote.mementoembed-card');\n"
      "  for (var i = 0; i < cards.length; i++) {\n"
      "    var c = cards[i];\n"
      "    c.style.fontFamily = 'sans-serif';\n"
      "    c.style.border = '1px solid #ccc';\n"
      "    c.style.borderRadius = '4px';\n"
      "    c.style.maxWidth = '500px';\n"
      "    c.style.padding = '8px';\n"
      "    var img = c.querySelector('.me-image');\n"
      "    if (img) { img.style.float = 'left'; img.style.maxWidth = '96px'; img.style.marginRight = '8px'; }\n"
      "    var favs = c.querySelectorAll('.me-favicon');\n"
      "    for (var j = 0; j < favs.length; j++) { favs[j].style.width = '16px'; favs[j].style.height = '16px'; }\n"
      "  }\n"
      "})();\n";
  return js;
}

}  // namespace mkit
