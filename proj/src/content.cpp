#include "mkit/content.h"

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>

#include "mkit/errors.h"
#include "mkit/html.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit {

namespace detail {
extern const std::string_view kEnglishStopwords[];
extern const std::size_t kEnglishStopwordCount;
}  // namespace detail

const StopwordList& default_stopwords() {
  static const StopwordList list = [] {
    StopwordList out;
    for (std::size_t i = 0; i < detail::kEnglishStopwordCount; ++i)
      out.emplace(detail::kEnglishStopwords[i]);
    return out;
  }();
  return list;
}

StopwordList load_stopwords(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read stopword list " + file.string());
  StopwordList out;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = text::trim(line);
    if (word.empty() || word.front() == '#') continue;
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(word.data(), static_cast<int32_t>(word.size())));
    u.toLower(icu::Locale::getRoot());
    std::string lowered;
    u.toUTF8String(lowered);
    out.insert(std::move(lowered));
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 24> kStripped = {
    "aside",  "audio",  "button",  "canvas",   "datalist", "embed",    "footer", "form",
    "head",   "header", "iframe",  "map",      "nav",      "noscript", "object", "option",
    "script", "select", "style",   "svg",      "template", "textarea", "title",  "video"};

bool stripped(std::string_view tag) {
  return std::find(kStripped.begin(), kStripped.end(), tag) != kStripped.end();
}

class BlockCollector {
 public:
  void walk(const html::Node& node, bool in_link) {
    switch (node.kind) {
      case html::Node::Kind::Comment:
        return;
      case html::Node::Kind::Text:
        buffer_ += node.text;
        if (in_link) {
          link_buffer_ += ' ';
          link_buffer_ += node.text;
        }
        return;
      case html::Node::Kind::Document:
        for (const auto& c : node.children) walk(*c, in_link);
        return;
      case html::Node::Kind::Element:
        break;
    }
    if (stripped(node.name)) return;
    const bool block = html::is_block_element(node.name);
    if (block) flush();
    for (const auto& c : node.children) walk(*c, in_link || node.name == "a");
    if (block) flush();
  }

  void flush() {
    std::string collapsed = text::collapse_whitespace(buffer_);
    const std::string link = text::collapse_whitespace(link_buffer_);
    buffer_.clear();
    link_buffer_.clear();
    if (collapsed.empty()) return;
    TextBlock b;
    b.index = blocks_.size();
    b.length = text::code_point_count(collapsed);
    b.link_density =
        std::min(1.0, static_cast<double>(text::code_point_count(link)) / static_cast<double>(b.length));
    b.words = tokenize_words(collapsed).size();
    b.content = b.link_density < kMaxContentLinkDensity && b.words >= kMinContentWords;
    b.text = std::move(collapsed);
    blocks_.push_back(std::move(b));
  }

  std::vector<TextBlock> take() { return std::move(blocks_); }

 private:
  std::string buffer_;
  std::string link_buffer_;
  std::vector<TextBlock> blocks_;
};

std::string meta_value(const std::map<std::string, std::string>& meta, std::string_view key) {
  auto it = meta.find(std::string(key));
  return it == meta.end() ? std::string{} : it->second;
}

std::vector<ScoredParagraph> sorted_by_score(std::vector<ScoredParagraph> paragraphs) {
  std::stable_sort(paragraphs.begin(), paragraphs.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return paragraphs;
}

std::size_t count_commas(std::string_view s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), ','));
}

double stopword_density(std::string_view s, const StopwordList& stopwords) {
  const auto words = tokenize_words(s);
  if (words.empty()) return 0;
  std::size_t hits = 0;
  for (const auto& w : words) hits += stopwords.count(w);
  return static_cast<double>(hits) / static_cast<double>(words.size());
}

}  // namespace

std::vector<TextBlock> extract_text_blocks(std::string_view html_text) {
  const auto doc = html::Document::parse(html_text);
  const html::Node* start = doc.first_by_tag("body");
  BlockCollector collector;
  collector.walk(start ? *start : doc.root(), false);
  collector.flush();
  return collector.take();
}

std::string remove_boilerplate(std::string_view html_text) {
  std::string out;
  for (const auto& b : extract_text_blocks(html_text)) {
    if (!b.content) continue;
    if (!out.empty()) out += '\n';
    out += b.text;
  }
  return out;
}

std::map<std::string, std::string> page_metadata(std::string_view html_text) {
  std::map<std::string, std::string> out;
  const auto doc = html::Document::parse(html_text);
  for (const html::Node* meta : doc.elements_by_tag("meta")) {
    const std::string* content = meta->attr("content");
    if (!content) continue;
    for (const char* key_attr : {"property", "name", "itemprop"}) {
      const std::string* key = meta->attr(key_attr);
      if (!key || key->empty()) continue;
      out.emplace(to_lower_ascii(text::trim(*key)), text::collapse_whitespace(*content));
    }
  }
  return out;
}

std::string extract_title(std::string_view html_text) {
  const auto meta = page_metadata(html_text);
  for (const char* key : {"og:title", "twitter:title"}) {
    auto value = meta_value(meta, key);
    if (!value.empty()) return value;
  }
  const auto doc = html::Document::parse(html_text);
  if (const html::Node* title = doc.first_by_tag("title"))
    return text::collapse_whitespace(title->text_content());
  return {};
}

std::string make_snippet(std::string_view content) {
  std::u32string cps = text::to_code_points(content);
  if (cps.empty()) return {};
  if (cps.size() > kSnippetLength) cps.resize(kSnippetLength);
  std::string out = text::from_code_points(cps);
  if (kSnippetPunctuation.find(cps.back()) == std::u32string_view::npos) out += "...";
  return out;
}

std::string extract_description(std::string_view html_text) {
  const auto meta = page_metadata(html_text);
  for (const char* key : {"og:description", "twitter:description"}) {
    auto value = meta_value(meta, key);
    if (!value.empty()) return value;
  }
  return make_snippet(text::collapse_whitespace(remove_boilerplate(html_text)));
}

std::optional<ParagraphAlgorithm> parse_paragraph_algorithm(std::string_view name) {
  if (name == "readability") return ParagraphAlgorithm::Readability;
  if (name == "justext") return ParagraphAlgorithm::Justext;
  return std::nullopt;
}

std::string to_string(ParagraphAlgorithm algorithm) {
  return algorithm == ParagraphAlgorithm::Readability ? "readability" : "justext";
}

double readability_score(std::size_t length, std::size_t commas, double link_density) {
  const double length_points = std::min(
      std::floor(static_cast<double>(length) / kReadabilityCharsPerPoint), kReadabilityMaxLengthPoints);
  return kReadabilityBase + static_cast<double>(commas) + length_points -
         kReadabilityLinkPenalty * link_density;
}

std::vector<JustextBlock> classify_justext(const std::vector<TextBlock>& blocks,
                                           const StopwordList& stopwords) {
  std::vector<JustextBlock> out(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    auto& j = out[i];
    j.stopword_density = stopword_density(b.text, stopwords);
    if (b.link_density > kJustextMaxLinkDensity || b.text.find("\xC2\xA9") != std::string::npos)
      j.context_free = JustextClass::Bad;
    else if (b.length < kJustextLengthLow)
      j.context_free = JustextClass::Short;
    else if (j.stopword_density >= kJustextStopwordsHigh)
      j.context_free = b.length > kJustextLengthHigh ? JustextClass::Good : JustextClass::NearGood;
    else if (j.stopword_density >= kJustextStopwordsLow)
      j.context_free = JustextClass::NearGood;
    else
      j.context_free = JustextClass::Bad;
    j.final_class = j.context_free;
  }

  // Nearest neighbour class, skipping short (and optionally neargood) blocks;
  // document edges count as bad.
  auto neighbour = [&](std::size_t i, int step, bool ignore_neargood) {
    for (long k = static_cast<long>(i) + step; k >= 0 && k < static_cast<long>(out.size()); k += step) {
      const auto c = out[static_cast<std::size_t>(k)].final_class;
      if (c == JustextClass::Short) continue;
      if (ignore_neargood && c == JustextClass::NearGood) continue;
      return c;
    }
    return JustextClass::Bad;
  };

  std::vector<JustextClass> revised(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    revised[i] = out[i].final_class;
    if (out[i].final_class != JustextClass::Short) continue;
    const auto prev = neighbour(i, -1, true);
    const auto next = neighbour(i, +1, true);
    if (prev == JustextClass::Good && next == JustextClass::Good)
      revised[i] = JustextClass::Good;
    else if (prev == JustextClass::Bad && next == JustextClass::Bad)
      revised[i] = JustextClass::Bad;
    else if ((prev == JustextClass::Bad && neighbour(i, -1, false) == JustextClass::NearGood) ||
             (next == JustextClass::Bad && neighbour(i, +1, false) == JustextClass::NearGood))
      revised[i] = JustextClass::Good;
    else
      revised[i] = JustextClass::Bad;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].final_class = revised[i];

  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].final_class != JustextClass::NearGood) continue;
    const auto prev = neighbour(i, -1, true);
    const auto next = neighbour(i, +1, true);
    revised[i] = (prev == JustextClass::Bad && next == JustextClass::Bad) ? JustextClass::Bad
                                                                          : JustextClass::Good;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].final_class = revised[i];
  return out;
}

namespace {

std::vector<ScoredParagraph> score_blocks(const std::vector<TextBlock>& blocks,
                                          ParagraphAlgorithm algorithm) {
  std::vector<ScoredParagraph> out;
  out.reserve(blocks.size());
  if (algorithm == ParagraphAlgorithm::Readability) {
    for (const auto& b : blocks)
      out.push_back({b.text, readability_score(b.length, count_commas(b.text), b.link_density), b.index});
    return out;
  }
  // Good blocks land in [1, 2), bad ones in [0, 1), ordered by stopword density.
  const auto classes = classify_justext(blocks, default_stopwords());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double base = classes[i].final_class == JustextClass::Good ? 1.0 : 0.0;
    out.push_back({blocks[i].text, base + classes[i].stopword_density, blocks[i].index});
  }
  return out;
}

}  // namespace

std::vector<ScoredParagraph> rank_paragraphs(std::string_view html_text, std::string_view algorithm) {
  const auto parsed = parse_paragraph_algorithm(algorithm);
  if (!parsed) throw UnknownAlgorithm("unknown paragraph algorithm '" + std::string(algorithm) + "'");
  return sorted_by_score(score_blocks(extract_text_blocks(html_text), *parsed));
}

std::vector<std::string> tokenize_words(std::string_view s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(
      icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw Error("ICU word break iterator unavailable");
  const icu::UnicodeString u =
      icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  it->setText(u);
  int32_t start = it->first();
  for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
    if (it->getRuleStatus() == UBRK_WORD_NONE) continue;
    icu::UnicodeString word = u.tempSubStringBetween(start, end);
    word.toLower(icu::Locale::getRoot());
    std::string utf8;
    word.toUTF8String(utf8);
    out.push_back(std::move(utf8));
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 22> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "inc", "ltd",
    "co", "corp", "no", "fig", "gen", "gov", "sen", "rep", "mt", "approx"};

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool is_abbreviation(std::string_view word) {
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\''))
    word.remove_prefix(1);
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) return true;
  // Dotted forms such as "e.g" or "U.S".
  if (word.find('.') != std::string_view::npos) return true;
  const std::string lower = to_lower_ascii(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view paragraph) {
  std::vector<std::string> out;
  const std::string s = text::collapse_whitespace(paragraph);
  std::size_t begin = 0;
  auto emit = [&](std::size_t end) {
    auto piece = text::trim(std::string_view(s).substr(begin, end - begin));
    if (!piece.empty()) out.emplace_back(piece);
    begin = end;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    while (j < s.size() && (s[j] == '.' || s[j] == '!' || s[j] == '?' || is_closer(s[j]))) ++j;
    if (j < s.size() && s[j] != ' ') continue;
    if (j + 1 < s.size() && std::islower(static_cast<unsigned char>(s[j + 1]))) continue;
    if (c == '.' && j == i + 1) {
      const std::size_t word_start = s.rfind(' ', i);
      const std::size_t from = word_start == std::string::npos ? 0 : word_start + 1;
      if (is_abbreviation(std::string_view(s).substr(from, i - from))) continue;
    }
    emit(j);
    i = j;
  }
  emit(s.size());
  return out;
}

std::vector<std::vector<double>> sentence_similarity(const std::vector<std::string>& sentences,
                                                     const StopwordList& stopwords) {
  const std::size_t n = sentences.size();
  std::vector<std::map<std::string, double>> tf(n);
  std::vector<double> norms(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& w : tokenize_words(sentences[i]))
      if (!stopwords.count(w)) tf[i][std::move(w)] += 1;
    for (const auto& [w, f] : tf[i]) norms[i] += f * f;
    norms[i] = std::sqrt(norms[i]);
  }
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norms[i] == 0 || norms[j] == 0) continue;
      double dot = 0;
      for (const auto& [w, f] : tf[i])
        if (auto it = tf[j].find(w); it != tf[j].end()) dot += f * it->second;
      const double cosine = dot / (norms[i] * norms[j]);
      if (cosine >= kTextRankEdgeThreshold) sim[i][j] = sim[j][i] = cosine;
    }
  }
  return sim;
}

std::vector<double> textrank(const std::vector<std::vector<double>>& w) {
  const std::size_t n = w.size();
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  std::vector<double> out_weight(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    out_weight[j] = std::accumulate(w[j].begin(), w[j].end(), 0.0);

  std::vector<double> s(n, 1.0 / nn), next(n);
  for (int iter = 0; iter < kTextRankMaxIterations; ++iter) {
    double dangling = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (out_weight[j] == 0) dangling += s[j];
    for (std::size_t i = 0; i < n; ++i) {
      double flow = dangling / nn;
      for (std::size_t j = 0; j < n; ++j)
        if (out_weight[j] > 0 && w[j][i] > 0) flow += s[j] * w[j][i] / out_weight[j];
      next[i] = (1 - kTextRankDamping) / nn + kTextRankDamping * flow;
    }
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - s[i]);
    s.swap(next);
    if (delta < kTextRankTolerance) break;
  }
  return s;
}

SentenceRanking rank_sentences(std::string_view html_text, std::string_view algorithm_pair) {
  SentenceRanking out;
  const auto slash = algorithm_pair.find('/');
  const std::string pair(algorithm_pair);
  if (pair != "readability/lede3" && pair != "readability/textrank" && pair != "justext/textrank")
    throw UnknownAlgorithm("unknown sentence algorithm '" + pair + "'");
  out.paragraph_algorithm = pair.substr(0, slash);
  out.sentence_algorithm = pair.substr(slash + 1);

  const auto blocks = extract_text_blocks(html_text);
  std::vector<const TextBlock*> chosen;
  if (out.paragraph_algorithm == "justext") {
    const auto classes = classify_justext(blocks, default_stopwords());
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (classes[i].final_class == JustextClass::Good) chosen.push_back(&blocks[i]);
  }
  if (chosen.empty())
    for (const auto& b : blocks)
      if (b.content) chosen.push_back(&b);
  if (chosen.empty())
    for (const auto& b : blocks) chosen.push_back(&b);

  std::vector<ScoredSentence> sentences;
  for (const TextBlock* b : chosen)
    for (auto& s : split_sentences(b->text)) sentences.push_back({std::move(s), b->index, 0, 0});
  if (sentences.empty()) return out;

  if (out.sentence_algorithm == "lede3") {
    const TextBlock* top = nullptr;
    double best = 0;
    for (const TextBlock* b : chosen) {
      const double score = readability_score(b->length, count_commas(b->text), b->link_density);
      if (!top || score > best) top = b, best = score;
    }
    double next_score = 3;
    for (auto& s : sentences)
      if (s.paragraph_index == top->index && next_score > 0) s.score = next_score--;
  } else {
    std::vector<std::string> texts;
    for (const auto& s : sentences) texts.push_back(s.text);
    const auto scores = textrank(sentence_similarity(texts, default_stopwords()));
    for (std::size_t i = 0; i < sentences.size(); ++i) sentences[i].score = scores[i];
  }

  std::stable_sort(sentences.begin(), sentences.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  for (std::size_t i = 0; i < sentences.size(); ++i) sentences[i].rank = i + 1;
  out.sentences = std::move(sentences);
  return out;
}

std::vector<std::pair<std::string, std::size_t>> count_terms(std::string_view s,
                                                            const StopwordList& stopwords) {
  std::map<std::string, std::size_t> counts;
  for (auto& w : tokenize_words(s)) {
    if (text::code_point_count(w) < 2 || stopwords.count(w)) continue;
    ++counts[std::move(w)];
  }
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::vector<std::pair<std::string, std::size_t>> word_frequencies(std::string_view html_text,
                                                                  const StopwordList& stopwords) {
  return count_terms(remove_boilerplate(html_text), stopwords);
}

}  // namespace mkit
