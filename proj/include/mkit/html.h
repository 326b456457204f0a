#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mkit::html {

struct Node {
  enum class Kind { Document, Element, Text, Comment };

  Kind kind = Kind::Document;
  std::string name;  // lowercase tag name for elements
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // decoded character data for Text, raw body for Comment
  std::vector<std::unique_ptr<Node>> children;
  Node* parent = nullptr;

  bool is_element(std::string_view tag) const { return kind == Kind::Element && name == tag; }
  // Attribute lookup by lowercase name; nullptr when absent.
  const std::string* attr(std::string_view key) const;
  // Concatenated descendant text (script/style excluded).
  std::string text_content() const;
};

// Lenient HTML parse: never throws, recovers from unclosed or misnested tags,
// decodes character references, and treats script/style/title/textarea as raw text.
class Document {
 public:
  static Document parse(std::string_view utf8);

  const Node& root() const { return *root_; }

  // Depth-first, document order.
  void for_each_element(const std::function<void(const Node&)>& fn) const;
  std::vector<const Node*> elements_by_tag(std::string_view tag) const;
  const Node* first_by_tag(std::string_view tag) const;

 private:
  std::unique_ptr<Node> root_ = std::make_unique<Node>();
};

// Re-emits markup for a subtree. Elements for which `skip` returns true are
// dropped along with their descendants.
std::string serialize(const Node& node, const std::function<bool(const Node&)>& skip = {});

// Decodes named and numeric character references.
std::string decode_entities(std::string_view text);
std::string escape(std::string_view text);

// Block-level elements that break text flow.
bool is_block_element(std::string_view tag);

}  // namespace mkit::html
