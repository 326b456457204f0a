#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mkit {

using StopwordList = std::unordered_set<std::string>;

const StopwordList& default_stopwords();
// One word per line, UTF-8; blank lines and lines starting with '#' ignored.
StopwordList load_stopwords(const std::filesystem::path& file);

// A run of text between block boundaries, after structural stripping.
struct TextBlock {
  std::string text;         // whitespace collapsed
  std::size_t index = 0;    // document order among all blocks
  std::size_t length = 0;   // code points
  double link_density = 0;  // share of code points inside <a>
  std::size_t words = 0;
  bool content = false;     // survived boilerplate filtering
};

// Splits the body into text blocks. script, style, nav, header, footer, form
// and similar elements are dropped together with their descendants.
std::vector<TextBlock> extract_text_blocks(std::string_view html);

// Blocks whose link density is under 0.5 and that hold at least two words.
inline constexpr double kMaxContentLinkDensity = 0.5;
inline constexpr std::size_t kMinContentWords = 2;

// Content blocks joined by newlines.
std::string remove_boilerplate(std::string_view html);

// meta name/property/itemprop -> content, first occurrence wins, keys lowercased.
std::map<std::string, std::string> page_metadata(std::string_view html);

std::string extract_title(std::string_view html);

inline constexpr std::size_t kSnippetLength = 197;
// Ellipsis is appended unless the last kept character is one of these.
inline constexpr std::u32string_view kSnippetPunctuation = U".!?;:,\"')";

std::string extract_description(std::string_view html);
// The truncation rule on its own, applied to already-extracted text.
std::string make_snippet(std::string_view text);

struct ScoredParagraph {
  std::string text;
  double score = 0;
  std::size_t index = 0;
};

enum class ParagraphAlgorithm { Readability, Justext };
std::optional<ParagraphAlgorithm> parse_paragraph_algorithm(std::string_view name);
std::string to_string(ParagraphAlgorithm algorithm);

// Readability: 1 + commas + min(floor(length / 100), 3) - 5 * link_density.
inline constexpr double kReadabilityBase = 1.0;
inline constexpr double kReadabilityCharsPerPoint = 100.0;
inline constexpr double kReadabilityMaxLengthPoints = 3.0;
inline constexpr double kReadabilityLinkPenalty = 5.0;
double readability_score(std::size_t length, std::size_t commas, double link_density);

// jusText classification parameters.
inline constexpr std::size_t kJustextLengthLow = 70;
inline constexpr std::size_t kJustextLengthHigh = 200;
inline constexpr double kJustextStopwordsLow = 0.30;
inline constexpr double kJustextStopwordsHigh = 0.32;
inline constexpr double kJustextMaxLinkDensity = 0.2;

enum class JustextClass { Bad, Short, NearGood, Good };

struct JustextBlock {
  JustextClass context_free = JustextClass::Bad;
  JustextClass final_class = JustextClass::Bad;
  double stopword_density = 0;
};
std::vector<JustextBlock> classify_justext(const std::vector<TextBlock>& blocks,
                                           const StopwordList& stopwords);

// Sorted by score descending, document order on ties. Throws UnknownAlgorithm.
std::vector<ScoredParagraph> rank_paragraphs(std::string_view html, std::string_view algorithm);

struct ScoredSentence {
  std::string text;
  std::size_t paragraph_index = 0;
  double score = 0;
  std::size_t rank = 0;  // 1-based
};

struct SentenceRanking {
  std::string paragraph_algorithm;
  std::string sentence_algorithm;
  std::vector<ScoredSentence> sentences;  // in rank order
};

// "readability/lede3", "readability/textrank" or "justext/textrank".
// Throws UnknownAlgorithm.
SentenceRanking rank_sentences(std::string_view html, std::string_view algorithm_pair);

std::vector<std::string> split_sentences(std::string_view paragraph);

// Lowercased Unicode word tokens.
std::vector<std::string> tokenize_words(std::string_view text);

// Edges below this cosine similarity are dropped.
inline constexpr double kTextRankEdgeThreshold = 0.1;
inline constexpr double kTextRankDamping = 0.85;
inline constexpr double kTextRankTolerance = 1e-6;
inline constexpr int kTextRankMaxIterations = 100;

// Cosine similarity over term-frequency vectors, stopwords removed.
std::vector<std::vector<double>> sentence_similarity(const std::vector<std::string>& sentences,
                                                     const StopwordList& stopwords);
// Weighted PageRank by power iteration. Rows with no edges spread uniformly.
std::vector<double> textrank(const std::vector<std::vector<double>>& similarity);

// Terms by descending count, alphabetical on ties.
std::vector<std::pair<std::string, std::size_t>> word_frequencies(std::string_view html,
                                                                  const StopwordList& stopwords);
std::vector<std::pair<std::string, std::size_t>> count_terms(std::string_view text,
                                                            const StopwordList& stopwords);

}  // namespace mkit
