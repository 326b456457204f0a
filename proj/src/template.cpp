#include "mkit/template.h"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "mkit/errors.h"

namespace mkit::story {

using Json = nlohmann::json;

namespace {

struct Token {
  enum class Kind { Text, Var, Block, Comment } kind = Kind::Text;
  std::string content;
  std::size_t line = 1;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw TemplateError("template line " + std::to_string(line) + ": " + msg);
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::vector<std::pair<bool, bool>> trims;  // per token: trim before, trim after
  std::size_t pos = 0;
  std::size_t line = 1;
  auto count_lines = [](std::string_view s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
  };
  while (pos < src.size()) {
    std::size_t open = pos;
    while (true) {
      open = src.find('{', open);
      if (open == std::string_view::npos || open + 1 >= src.size()) {
        open = std::string_view::npos;
        break;
      }
      const char c = src[open + 1];
      if (c == '{' || c == '%' || c == '#') break;
      ++open;
    }
    const std::string_view text = src.substr(pos, open == std::string_view::npos ? src.npos : open - pos);
    if (!text.empty()) {
      out.push_back({Token::Kind::Text, std::string(text), line});
      trims.emplace_back(false, false);
      line += count_lines(text);
    }
    if (open == std::string_view::npos) break;
    const char kind = src[open + 1];
    const char closer = kind == '{' ? '}' : kind;
    const std::string close_seq{closer, '}'};
    const std::size_t close = src.find(close_seq, open + 2);
    if (close == std::string_view::npos) fail(line, std::string("unclosed '{") + kind + "'");
    std::string_view inner = src.substr(open + 2, close - open - 2);
    bool trim_before = false;
    bool trim_after = false;
    if (kind != '#') {
      if (!inner.empty() && inner.front() == '-') {
        trim_before = true;
        inner.remove_prefix(1);
      }
      if (!inner.empty() && inner.back() == '-') {
        trim_after = true;
        inner.remove_suffix(1);
      }
    }
    const auto k = kind == '{' ? Token::Kind::Var : kind == '%' ? Token::Kind::Block : Token::Kind::Comment;
    out.push_back({k, std::string(trim(inner)), line});
    trims.emplace_back(trim_before, trim_after);
    line += count_lines(src.substr(open, close + 2 - open));
    pos = close + 2;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (trims[i].first && i > 0 && out[i - 1].kind == Token::Kind::Text) {
      auto& t = out[i - 1].content;
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    }
    if (trims[i].second && i + 1 < out.size() && out[i + 1].kind == Token::Kind::Text) {
      auto& t = out[i + 1].content;
      std::size_t n = 0;
      while (n < t.size() && std::isspace(static_cast<unsigned char>(t[n]))) ++n;
      t.erase(0, n);
    }
  }
  return out;
}

// Position of `needle` in `s` outside single or double quotes.
std::size_t find_unquoted(std::string_view s, std::string_view needle) {
  char quote = 0;
  for (std::size_t i = 0; i + needle.size() <= s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      continue;
    }
    if (s.substr(i, needle.size()) == needle) return i;
  }
  return std::string_view::npos;
}

std::string unquote(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || (s.front() != '\'' && s.front() != '"') || s.back() != s.front())
    fail(line, "expected a quoted string, got '" + std::string(s) + "'");
  return std::string(s.substr(1, s.size() - 2));
}

std::vector<std::string> parse_path(std::string_view s, std::size_t line) {
  s = trim(s);
  std::vector<std::string> path;
  std::size_t i = 0;
  auto ident = [&] {
    const std::size_t start = i;
    if (i >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      fail(line, "bad variable '" + std::string(s) + "'");
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    path.emplace_back(s.substr(start, i - start));
  };
  ident();
  while (i < s.size()) {
    if (s[i] == '.') {
      ++i;
      ident();
    } else if (s[i] == '[') {
      const std::size_t end = s.find(']', i);
      if (end == std::string_view::npos) fail(line, "unclosed '[' in '" + std::string(s) + "'");
      path.push_back(unquote(s.substr(i + 1, end - i - 1), line));
      i = end + 1;
    } else {
      fail(line, "bad variable '" + std::string(s) + "'");
    }
  }
  return path;
}

const std::set<std::string>& preferable() {
  static const std::set<std::string> s = {"thumbnail", "imagereel", "image", "sentence"};
  return s;
}

struct Parser {
  const std::vector<Token>& toks;
  std::size_t pos = 0;
  std::size_t end = 0;
  bool element_bound = false;

  VarRef parse_var(std::string_view expr, std::size_t line) const {
    VarRef v;
    v.line = line;
    const std::size_t bar = find_unquoted(expr, "|");
    v.path = parse_path(expr.substr(0, bar), line);
    if (bar != std::string_view::npos) {
      std::string_view filter = trim(expr.substr(bar + 1));
      if (filter.substr(0, 6) != "prefer" || (filter.size() > 6 && !std::isspace(static_cast<unsigned char>(filter[6]))))
        fail(line, "unknown filter '" + std::string(filter) + "'");
      std::string_view args = trim(filter.substr(6));
      if (args.empty()) fail(line, "prefer needs name=value arguments");
      while (!args.empty()) {
        const std::size_t comma = args.find(',');
        const std::string_view item = trim(args.substr(0, comma));
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) fail(line, "bad prefer argument '" + std::string(item) + "'");
        v.prefer.emplace_back(std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1))));
        if (comma == std::string_view::npos) break;
        args = args.substr(comma + 1);
      }
    }
    check(v);
    return v;
  }

  void check(const VarRef& v) const {
    if (!known_variable(v.path)) fail(v.line, "unknown variable '" + v.dotted() + "'");
    const bool element_scoped = v.path[0] == "element";
    if (element_scoped && !element_bound) fail(v.line, "'" + v.dotted() + "' used outside an element block");
    if (!v.prefer.empty()) {
      const bool ok = element_scoped &&
                      ((v.path.size() == 2 && v.path[1] == "thumbnail") ||
                       (v.path.size() == 3 && v.path[1] == "surrogate" && preferable().count(v.path[2])));
      if (!ok) fail(v.line, "'" + v.dotted() + "' does not take preferences");
    }
  }

  Condition parse_condition(std::string_view s, std::size_t line) const {
    Condition c;
    s = trim(s);
    if (s.substr(0, 4) == "not " ) {
      c.negate = true;
      s = trim(s.substr(4));
    }
    if (const auto is = find_unquoted(s, " is "); is != std::string_view::npos) {
      c.subject = parse_var(s.substr(0, is), line);
      std::string_view rest = trim(s.substr(is + 4));
      if (rest.substr(0, 4) == "not ") {
        c.negate = !c.negate;
        rest = trim(rest.substr(4));
      }
      if (rest == "none") {
        c.op = Condition::Op::IsNone;
      } else if (rest.substr(0, 11) == "divisibleby") {
        c.op = Condition::Op::DivisibleBy;
        std::string_view n = trim(rest.substr(11));
        if (!n.empty() && n.front() == '(' && n.back() == ')') n = trim(n.substr(1, n.size() - 2));
        try {
          c.divisor = std::stol(std::string(n));
        } catch (const std::exception&) {
          fail(line, "divisibleby needs an integer");
        }
        if (c.divisor <= 0) fail(line, "divisibleby needs a positive integer");
      } else {
        fail(line, "unknown test '" + std::string(rest) + "'");
      }
      return c;
    }
    for (const std::string_view op : {"==", "!="}) {
      if (const auto at = find_unquoted(s, op); at != std::string_view::npos) {
        c.op = Condition::Op::Equals;
        c.subject = parse_var(s.substr(0, at), line);
        c.literal = unquote(s.substr(at + 2), line);
        if (op == "!=") c.negate = !c.negate;
        return c;
      }
    }
    c.subject = parse_var(s, line);
    return c;
  }

  static std::pair<std::string, std::string> split_block(const std::string& content) {
    const std::string_view s = content;
    const std::size_t sp = s.find_first_of(" \t\n");
    if (sp == std::string_view::npos) return {content, ""};
    return {std::string(s.substr(0, sp)), std::string(trim(s.substr(sp)))};
  }

  // Parses until one of `stops` (a block keyword) or the end. Returns the
  // stop keyword found, empty at the end of input.
  std::string parse(std::vector<Node>& out, const std::set<std::string>& stops, std::string* stop_rest) {
    while (pos < end) {
      const Token& t = toks[pos];
      switch (t.kind) {
        case Token::Kind::Text:
          out.push_back(Node{Node::Kind::Text, t.content, {}, {}, {}, {}});
          ++pos;
          break;
        case Token::Kind::Comment:
          ++pos;
          break;
        case Token::Kind::Var: {
          Node n;
          n.kind = Node::Kind::Variable;
          n.var = parse_var(t.content, t.line);
          out.push_back(std::move(n));
          ++pos;
          break;
        }
        case Token::Kind::Block: {
          auto [kw, rest] = split_block(t.content);
          if (stops.count(kw)) {
            ++pos;
            if (stop_rest) *stop_rest = rest;
            return kw;
          }
          ++pos;
          if (kw == "if") {
            out.push_back(parse_if(rest, t.line));
          } else if (kw == "for") {
            out.push_back(parse_for(rest, t.line));
          } else {
            fail(t.line, "unexpected '{% " + t.content + " %}'");
          }
          break;
        }
      }
    }
    return {};
  }

  Node parse_if(const std::string& first_cond, std::size_t line) {
    Node n;
    n.kind = Node::Kind::If;
    std::string cond = first_cond;
    std::size_t cond_line = line;
    while (true) {
      Condition c = parse_condition(cond, cond_line);
      std::vector<Node> body;
      std::string rest;
      const std::size_t here = pos < end ? toks[pos].line : line;
      const std::string kw = parse(body, {"elif", "else", "endif"}, &rest);
      n.branches.emplace_back(std::move(c), std::move(body));
      if (kw.empty()) fail(line, "'if' without 'endif'");
      if (kw == "endif") return n;
      if (kw == "else") {
        const std::string k2 = parse(n.otherwise, {"endif", "elif", "else"}, nullptr);
        if (k2 != "endif") fail(line, "'if' without 'endif'");
        return n;
      }
      cond = rest;
      cond_line = pos > 0 ? toks[pos - 1].line : here;
    }
  }

  Node parse_for(const std::string& spec, std::size_t line) {
    const std::string_view s = trim(spec);
    const std::size_t in = find_unquoted(s, " in ");
    if (in == std::string_view::npos || trim(s.substr(0, in)) != "element" || trim(s.substr(in + 4)) != "elements")
      fail(line, "only 'for element in elements' is supported");
    if (element_bound) fail(line, "nested element loops are not supported");
    Node n;
    n.kind = Node::Kind::For;
    element_bound = true;
    const std::string kw = parse(n.body, {"endfor"}, nullptr);
    element_bound = false;
    if (kw.empty()) fail(line, "'for' without 'endfor'");
    return n;
  }

  std::vector<Node> parse_all() {
    std::vector<Node> nodes;
    std::string rest;
    const std::string kw = parse(nodes, {"endif", "endfor", "elif", "else"}, &rest);
    if (!kw.empty()) fail(toks[pos - 1].line, "unexpected '" + kw + "'");
    return nodes;
  }
};

std::vector<Node> parse_range(const std::vector<Token>& toks, std::size_t from, std::size_t to, bool element_bound) {
  Parser p{toks, from, to, element_bound};
  return p.parse_all();
}

bool is_marker(const Token& t, std::string_view marker) {
  return t.kind == Token::Kind::Comment && t.content == marker;
}

struct Context {
  std::optional<std::size_t> element;
  std::size_t loop_index = 0;  // 0-based
  std::size_t loop_length = 0;
  bool in_loop = false;
};

Json lookup(const Json& j, const std::vector<std::string>& path, std::size_t from) {
  const Json* cur = &j;
  for (std::size_t i = from; i < path.size(); ++i) {
    if (!cur->is_object()) return nullptr;
    const auto it = cur->find(path[i]);
    if (it == cur->end()) return nullptr;
    cur = &*it;
  }
  return *cur;
}

Json resolve(const VarRef& v, const RenderScope& scope, const Context& ctx) {
  const auto& root = v.path[0];
  if (root == "loop") {
    if (!ctx.in_loop) return nullptr;
    const auto& f = v.path[1];
    if (f == "index") return ctx.loop_index + 1;
    if (f == "index0") return ctx.loop_index;
    if (f == "first") return ctx.loop_index == 0;
    if (f == "last") return ctx.loop_index + 1 == ctx.loop_length;
    if (f == "length") return ctx.loop_length;
    if (f == "revindex") return ctx.loop_length - ctx.loop_index;
    return nullptr;
  }
  if (root == "element") {
    if (!ctx.element) return nullptr;
    const auto& f = v.path[1];
    if (f == "type" || f == "value" || f == "text") {
      return scope.element ? lookup(scope.element(*ctx.element), v.path, 1) : Json(nullptr);
    }
    return scope.surrogate ? scope.surrogate(*ctx.element, v) : Json(nullptr);
  }
  return lookup(scope.globals, v.path, 0);
}

std::string to_text(const Json& j) {
  if (j.is_null()) return {};
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool truthy(const Json& j) {
  if (j.is_null()) return false;
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) return !j.get<std::string>().empty();
  if (j.is_number_integer()) return j.get<long long>() != 0;
  if (j.is_number()) return j.get<double>() != 0.0;
  return !j.empty();
}

bool evaluate(const Condition& c, const RenderScope& scope, const Context& ctx) {
  const Json v = resolve(c.subject, scope, ctx);
  bool r = false;
  switch (c.op) {
    case Condition::Op::Truthy:
      r = truthy(v);
      break;
    case Condition::Op::IsNone:
      r = v.is_null();
      break;
    case Condition::Op::DivisibleBy:
      r = v.is_number_integer() && v.get<long long>() % c.divisor == 0;
      break;
    case Condition::Op::Equals:
      r = !v.is_null() && to_text(v) == c.literal;
      break;
  }
  return c.negate ? !r : r;
}

void render(const std::vector<Node>& nodes, const RenderScope& scope, const Context& ctx, std::string& out) {
  for (const auto& n : nodes) {
    switch (n.kind) {
      case Node::Kind::Text:
        out += n.text;
        break;
      case Node::Kind::Variable:
        out += to_text(resolve(n.var, scope, ctx));
        break;
      case Node::Kind::If: {
        bool taken = false;
        for (const auto& [cond, body] : n.branches) {
          if (evaluate(cond, scope, ctx)) {
            render(body, scope, ctx, out);
            taken = true;
            break;
          }
        }
        if (!taken) render(n.otherwise, scope, ctx, out);
        break;
      }
      case Node::Kind::For: {
        Context inner = ctx;
        inner.in_loop = true;
        inner.loop_length = scope.element_count;
        for (std::size_t i = 0; i < scope.element_count; ++i) {
          inner.element = i;
          inner.loop_index = i;
          render(n.body, scope, inner, out);
        }
        break;
      }
    }
  }
}

void collect(const std::vector<Node>& nodes, std::vector<VarRef>& out) {
  for (const auto& n : nodes) {
    switch (n.kind) {
      case Node::Kind::Text:
        break;
      case Node::Kind::Variable:
        out.push_back(n.var);
        break;
      case Node::Kind::If:
        for (const auto& [cond, body] : n.branches) {
          out.push_back(cond.subject);
          collect(body, out);
        }
        collect(n.otherwise, out);
        break;
      case Node::Kind::For:
        collect(n.body, out);
        break;
    }
  }
}

}  // namespace

std::string VarRef::dotted() const {
  std::string s;
  for (const auto& p : path) {
    if (!s.empty()) s += '.';
    s += p;
  }
  return s;
}

std::string VarRef::prefer_string() const {
  std::string s;
  for (const auto& [k, v] : prefer) {
    if (!s.empty()) s += ',';
    s += k + "=" + v;
  }
  return s;
}

const std::vector<std::string>& surrogate_variables() {
  static const std::vector<std::string> v = {
      "archive_collection_id", "archive_collection_name", "archive_collection_uri", "archive_favicon",
      "archive_name", "archive_uri", "best_image_uri", "first_memento_datetime", "first_urim", "image",
      "imagereel", "last_memento_datetime", "last_urim", "memento_count", "memento_datetime",
      "memento_datetime_14num", "metadata", "original_domain", "original_favicon", "original_linkstatus",
      "original_uri", "sentence", "snippet", "thumbnail", "timegate_uri", "timemap_uri", "title", "urim"};
  return v;
}

bool known_variable(const std::vector<std::string>& path) {
  if (path.empty()) return false;
  const auto& root = path[0];
  if (root == "title" || root == "generated_by" || root == "collection_url") return path.size() == 1;
  if (root == "metadata") return true;
  if (root == "loop") {
    static const std::set<std::string> f = {"index", "index0", "first", "last", "length", "revindex"};
    return path.size() == 2 && f.count(path[1]);
  }
  if (root != "element" || path.size() < 2) return false;
  const auto& f = path[1];
  if (f == "type" || f == "value" || f == "text" || f == "thumbnail") return path.size() == 2;
  if (f != "surrogate" || path.size() < 3) return false;
  const auto& vars = surrogate_variables();
  if (std::find(vars.begin(), vars.end(), path[2]) == vars.end()) return false;
  return path.size() == 3 || path[2] == "metadata";
}

Template parse_template(std::string_view text) {
  const auto toks = tokenize(text);
  Template t;
  const auto marker = std::find_if(toks.begin(), toks.end(), [](const Token& k) { return is_marker(k, kMultipartMarker); });
  if (marker == toks.end()) {
    t.kind = Template::Kind::Single;
    t.nodes = parse_range(toks, 0, toks.size(), false);
    return t;
  }
  t.kind = Template::Kind::Multipart;
  const std::string_view order[] = {kTitlePartMarker, kElementPartMarker, kElementMediaMarker};
  std::size_t at[3];
  std::size_t search = static_cast<std::size_t>(marker - toks.begin()) + 1;
  for (int i = 0; i < 3; ++i) {
    std::size_t j = search;
    while (j < toks.size() && !is_marker(toks[j], order[i])) ++j;
    if (j == toks.size()) fail(marker->line, "multipart template lacks '" + std::string(order[i]) + "' after the previous part");
    at[i] = j;
    search = j + 1;
  }
  for (std::size_t j = static_cast<std::size_t>(marker - toks.begin()) + 1; j < at[0]; ++j) {
    if (toks[j].kind != Token::Kind::Comment && !(toks[j].kind == Token::Kind::Text && trim(toks[j].content).empty()))
      fail(toks[j].line, "content before the title part");
  }
  t.title_part = parse_range(toks, at[0] + 1, at[1], false);
  t.element_part = parse_range(toks, at[1] + 1, at[2], true);
  t.element_media = parse_range(toks, at[2] + 1, toks.size(), true);
  return t;
}

std::vector<VarRef> template_variables(const Template& t) {
  std::vector<VarRef> out;
  collect(t.nodes, out);
  collect(t.title_part, out);
  collect(t.element_part, out);
  collect(t.element_media, out);
  return out;
}

std::string render_nodes(const std::vector<Node>& nodes, const RenderScope& scope) {
  std::string out;
  render(nodes, scope, Context{}, out);
  return out;
}

std::string render_for_element(const std::vector<Node>& nodes, const RenderScope& scope, std::size_t index) {
  std::string out;
  Context ctx;
  ctx.element = index;
  render(nodes, scope, ctx, out);
  return out;
}

}  // namespace mkit::story
