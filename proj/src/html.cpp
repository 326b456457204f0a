#include "mkit/html.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit::html {

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t code_point;
};

constexpr NamedEntity kEntities[] = {
#include "html_entities.inc"
};

const std::unordered_map<std::string_view, char32_t>& entity_map() {
  static const auto* map = [] {
    auto* m = new std::unordered_map<std::string_view, char32_t>();
    for (const auto& e : kEntities) m->emplace(e.name, e.code_point);
    return m;
  }();
  return *map;
}

constexpr std::array<std::string_view, 18> kVoid = {
    "area",  "base", "basefont", "bgsound", "br",   "col",   "embed", "frame",  "hr",
    "image", "img",  "input",    "keygen",  "link", "meta",  "param", "source", "track"};

constexpr std::array<std::string_view, 8> kRawText = {
    "script", "style", "xmp", "iframe", "noembed", "noframes", "noscript", "plaintext"};

constexpr std::array<std::string_view, 2> kEscapableRawText = {"title", "textarea"};

// Opening one of these closes an open <p>.
constexpr std::array<std::string_view, 33> kClosesParagraph = {
    "address", "article", "aside",  "blockquote", "center", "details", "dialog", "dir",
    "div",     "dl",      "fieldset", "figcaption", "figure", "footer", "form",   "h1",
    "h2",      "h3",      "h4",     "h5",         "h6",     "header",  "hgroup", "hr",
    "main",    "menu",    "nav",    "ol",         "p",      "pre",     "section", "table",
    "ul"};

constexpr std::array<std::string_view, 45> kBlock = {
    "address", "article", "aside",  "blockquote", "body",  "br",      "caption", "center",
    "dd",      "details", "dialog", "dir",        "div",   "dl",      "dt",      "fieldset",
    "figcaption", "figure", "footer", "form",     "h1",    "h2",      "h3",      "h4",
    "h5",      "h6",      "header", "hgroup",     "hr",    "html",    "li",      "main",
    "menu",    "nav",     "ol",     "p",          "pre",   "section", "table",   "tbody",
    "td",      "th",      "thead",  "tr",         "ul"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

class TreeBuilder {
 public:
  explicit TreeBuilder(Node& root) { stack_.push_back(&root); }

  void text(std::string data) {
    if (data.empty()) return;
    Node* cur = stack_.back();
    if (!cur->children.empty() && cur->children.back()->kind == Node::Kind::Text) {
      cur->children.back()->text += data;
      return;
    }
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Text;
    node->text = std::move(data);
    append(std::move(node));
  }

  void comment(std::string data) {
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Comment;
    node->text = std::move(data);
    append(std::move(node));
  }

  Node* start_tag(std::string name, std::vector<std::pair<std::string, std::string>> attrs,
                  bool self_closing) {
    implicit_closes(name);
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Element;
    node->name = std::move(name);
    node->attributes = std::move(attrs);
    Node* raw = node.get();
    append(std::move(node));
    if (!self_closing && !contains(kVoid, raw->name)) stack_.push_back(raw);
    return raw;
  }

  void end_tag(std::string_view name) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) {
        stack_.resize(i);
        return;
      }
      // Do not let a stray end tag escape a table cell or list item's container.
      if (name != "table" && (stack_[i]->name == "table")) return;
    }
  }

 private:
  void append(std::unique_ptr<Node> node) {
    Node* parent = stack_.back();
    node->parent = parent;
    parent->children.push_back(std::move(node));
  }

  bool in_scope(std::string_view name, std::initializer_list<std::string_view> barriers) const {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) return true;
      if (std::find(barriers.begin(), barriers.end(), stack_[i]->name) != barriers.end())
        return false;
    }
    return false;
  }

  void implicit_closes(std::string_view name) {
    if (contains(kClosesParagraph, name) && in_scope("p", {"button", "table", "td", "th"}))
      end_tag("p");
    if (name == "li" && in_scope("li", {"ul", "ol", "table"})) end_tag("li");
    if ((name == "dt" || name == "dd")) {
      if (in_scope("dd", {"dl", "table"})) end_tag("dd");
      if (in_scope("dt", {"dl", "table"})) end_tag("dt");
    }
    if (name == "tr" && in_scope("tr", {"table"})) end_tag("tr");
    if ((name == "td" || name == "th" || name == "tr")) {
      if (in_scope("td", {"table"})) end_tag("td");
      if (in_scope("th", {"table"})) end_tag("th");
    }
    if (name == "option" && in_scope("option", {"select"})) end_tag("option");
    if (name == "a" && in_scope("a", {"table", "td"})) end_tag("a");
  }

  std::vector<Node*> stack_;
};

std::vector<std::pair<std::string, std::string>> parse_attributes(std::string_view s,
                                                                  std::size_t& pos,
                                                                  bool& self_closing) {
  std::vector<std::pair<std::string, std::string>> attrs;
  self_closing = false;
  while (pos < s.size()) {
    while (pos < s.size() && is_space(s[pos])) ++pos;
    if (pos >= s.size()) break;
    if (s[pos] == '>') {
      ++pos;
      return attrs;
    }
    if (s[pos] == '/') {
      ++pos;
      if (pos < s.size() && s[pos] == '>') {
        self_closing = true;
        ++pos;
        return attrs;
      }
      continue;
    }
    const std::size_t name_start = pos;
    while (pos < s.size() && !is_space(s[pos]) && s[pos] != '=' && s[pos] != '>' &&
           !(s[pos] == '/' && pos + 1 < s.size() && s[pos + 1] == '>'))
      ++pos;
    std::string name = to_lower_ascii(s.substr(name_start, pos - name_start));
    while (pos < s.size() && is_space(s[pos])) ++pos;
    std::string value;
    if (pos < s.size() && s[pos] == '=') {
      ++pos;
      while (pos < s.size() && is_space(s[pos])) ++pos;
      if (pos < s.size() && (s[pos] == '"' || s[pos] == '\'')) {
        const char quote = s[pos++];
        const auto end = s.find(quote, pos);
        const std::size_t stop = end == std::string_view::npos ? s.size() : end;
        value = decode_entities(s.substr(pos, stop - pos));
        pos = end == std::string_view::npos ? s.size() : end + 1;
      } else {
        const std::size_t vstart = pos;
        while (pos < s.size() && !is_space(s[pos]) && s[pos] != '>') ++pos;
        value = decode_entities(s.substr(vstart, pos - vstart));
      }
    }
    if (!name.empty() &&
        std::none_of(attrs.begin(), attrs.end(), [&](const auto& a) { return a.first == name; }))
      attrs.emplace_back(std::move(name), std::move(value));
  }
  return attrs;
}

}  // namespace

const std::string* Node::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

std::string Node::text_content() const {
  if (kind == Kind::Text) return text;
  std::string out;
  for (const auto& child : children) {
    if (child->kind == Kind::Element && (child->name == "script" || child->name == "style"))
      continue;
    if (child->kind == Kind::Comment) continue;
    out += child->text_content();
  }
  return out;
}

Document Document::parse(std::string_view s) {
  Document doc;
  TreeBuilder builder(*doc.root_);
  std::size_t pos = 0;
  std::string pending;
  auto flush_text = [&] {
    if (!pending.empty()) {
      builder.text(decode_entities(pending));
      pending.clear();
    }
  };
  // Skip a UTF-8 byte order mark.
  if (s.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  while (pos < s.size()) {
    const char c = s[pos];
    if (c != '<' || pos + 1 >= s.size()) {
      const auto next = s.find('<', pos + 1);
      const std::size_t stop = next == std::string_view::npos ? s.size() : next;
      pending.append(s.substr(pos, stop - pos));
      pos = stop;
      continue;
    }
    const char n = s[pos + 1];
    if (s.substr(pos, 4) == "<!--") {
      flush_text();
      const auto end = s.find("-->", pos + 4);
      const std::size_t stop = end == std::string_view::npos ? s.size() : end;
      builder.comment(std::string(s.substr(pos + 4, stop - pos - 4)));
      pos = end == std::string_view::npos ? s.size() : end + 3;
      continue;
    }
    if (n == '!' || n == '?') {
      flush_text();
      const auto end = s.find('>', pos + 2);
      pos = end == std::string_view::npos ? s.size() : end + 1;
      continue;
    }
    if (n == '/') {
      if (pos + 2 < s.size() && is_name_start(s[pos + 2])) {
        flush_text();
        std::size_t p = pos + 2;
        while (p < s.size() && !is_space(s[p]) && s[p] != '>' && s[p] != '/') ++p;
        const std::string name = to_lower_ascii(s.substr(pos + 2, p - pos - 2));
        const auto end = s.find('>', p);
        pos = end == std::string_view::npos ? s.size() : end + 1;
        if (name == "br") {
          builder.start_tag("br", {}, true);
        } else {
          builder.end_tag(name);
        }
        continue;
      }
      // "</>" or "</ " are dropped / kept as text respectively.
      pending += c;
      ++pos;
      continue;
    }
    if (!is_name_start(n)) {
      pending += c;
      ++pos;
      continue;
    }
    flush_text();
    std::size_t p = pos + 1;
    while (p < s.size() && !is_space(s[p]) && s[p] != '>' && s[p] != '/') ++p;
    std::string name = to_lower_ascii(s.substr(pos + 1, p - pos - 1));
    bool self_closing = false;
    auto attrs = parse_attributes(s, p, self_closing);
    pos = p;
    Node* el = builder.start_tag(name, std::move(attrs), self_closing);
    if (self_closing || contains(kVoid, name)) continue;

    const bool raw = contains(kRawText, name);
    const bool escapable = contains(kEscapableRawText, name);
    if (raw || escapable) {
      // Find the matching close tag case-insensitively.
      std::size_t search = pos;
      std::size_t close = std::string_view::npos;
      while (true) {
        const auto lt = s.find("</", search);
        if (lt == std::string_view::npos) break;
        if (text::starts_with_icase(s.substr(lt + 2), name)) {
          const std::size_t after = lt + 2 + name.size();
          if (after >= s.size() || is_space(s[after]) || s[after] == '>' || s[after] == '/') {
            close = lt;
            break;
          }
        }
        search = lt + 2;
      }
      const std::size_t stop = close == std::string_view::npos ? s.size() : close;
      std::string body(s.substr(pos, stop - pos));
      if (!body.empty()) {
        auto t = std::make_unique<Node>();
        t->kind = Node::Kind::Text;
        t->text = escapable ? decode_entities(body) : std::move(body);
        t->parent = el;
        el->children.push_back(std::move(t));
      }
      if (close == std::string_view::npos) {
        pos = s.size();
      } else {
        const auto gt = s.find('>', close);
        pos = gt == std::string_view::npos ? s.size() : gt + 1;
      }
      builder.end_tag(name);
    }
  }
  flush_text();
  return doc;
}

void Document::for_each_element(const std::function<void(const Node&)>& fn) const {
  std::vector<const Node*> stack{root_.get()};
  while (!stack.empty()) {
    const Node* node = stack.back();
    stack.pop_back();
    if (node->kind == Node::Kind::Element) fn(*node);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it)
      stack.push_back(it->get());
  }
}

std::vector<const Node*> Document::elements_by_tag(std::string_view tag) const {
  std::vector<const Node*> out;
  for_each_element([&](const Node& n) {
    if (n.name == tag) out.push_back(&n);
  });
  return out;
}

const Node* Document::first_by_tag(std::string_view tag) const {
  const auto all = elements_by_tag(tag);
  return all.empty() ? nullptr : all.front();
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      const auto amp = s.find('&', i);
      const std::size_t stop = amp == std::string_view::npos ? s.size() : amp;
      out.append(s.substr(i, stop - i));
      i = stop;
      continue;
    }
    std::size_t j = i + 1;
    if (j < s.size() && s[j] == '#') {
      ++j;
      const bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
      if (hex) ++j;
      const std::size_t digits_start = j;
      char32_t cp = 0;
      bool overflow = false;
      while (j < s.size() && (hex ? std::isxdigit(static_cast<unsigned char>(s[j]))
                                  : std::isdigit(static_cast<unsigned char>(s[j])))) {
        const int d = std::isdigit(static_cast<unsigned char>(s[j]))
                          ? s[j] - '0'
                          : std::tolower(static_cast<unsigned char>(s[j])) - 'a' + 10;
        if (cp > 0x10FFFF) overflow = true;
        else cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
        ++j;
      }
      if (j == digits_start) {
        out += '&';
        ++i;
        continue;
      }
      if (j < s.size() && s[j] == ';') ++j;
      if (overflow || cp == 0) cp = 0xFFFD;
      // Windows-1252 remapping for the C1 range, as browsers do.
      static constexpr char32_t kC1[32] = {
          0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
          0x2039, 0x0152, 0x8D,   0x017D, 0x8F,   0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
          0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178};
      if (cp >= 0x80 && cp <= 0x9F) cp = kC1[cp - 0x80];
      text::append_utf8(out, cp);
      i = j;
      continue;
    }
    while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j])) && j - i <= 32) ++j;
    const std::string_view name = s.substr(i + 1, j - i - 1);
    const auto& map = entity_map();
    if (auto it = map.find(name); it != map.end()) {
      text::append_utf8(out, it->second);
      i = j < s.size() && s[j] == ';' ? j + 1 : j;
      continue;
    }
    out += '&';
    ++i;
  }
  return out;
}

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 8);
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

bool is_block_element(std::string_view tag) { return contains(kBlock, tag); }

std::string serialize(const Node& node, const std::function<bool(const Node&)>& skip) {
  std::string out;
  std::function<void(const Node&)> emit = [&](const Node& n) {
    switch (n.kind) {
      case Node::Kind::Document:
        for (const auto& c : n.children) emit(*c);
        return;
      case Node::Kind::Comment:
        out += "<!--" + n.text + "-->";
        return;
      case Node::Kind::Text: {
        const bool raw = n.parent && n.parent->kind == Node::Kind::Element &&
                         (contains(kRawText, n.parent->name));
        out += raw ? n.text : escape(n.text);
        return;
      }
      case Node::Kind::Element:
        if (skip && skip(n)) return;
        out += "<" + n.name;
        for (const auto& [k, v] : n.attributes) out += " " + k + "=\"" + escape(v) + "\"";
        out += ">";
        if (contains(kVoid, n.name)) return;
        for (const auto& c : n.children) emit(*c);
        out += "</" + n.name + ">";
        return;
    }
  };
  emit(node);
  return out;
}

}  // namespace mkit::html
