#pragma once

#include <functional>
#include <json.hpp>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mkit::story {

// Template grammar (a Jinja subset):
//   {{ path }}                      variable
//   {{ path|prefer a=1,b=yes }}     variable with preferences for its endpoint
//   {# ... #}                       comment
//   {% for element in elements %} ... {% endfor %}
//   {% if cond %} ... {% elif cond %} ... {% else %} ... {% endif %}
// where cond is `[not] path`, `path is [not] none`, `path is [not] divisibleby N`,
// `path == 'text'` or `path != 'text'`. A "-" just inside a delimiter trims
// whitespace on that side. Paths are dotted names with optional ["key"]
// subscripts.

using Prefer = std::vector<std::pair<std::string, std::string>>;

struct VarRef {
  std::vector<std::string> path;
  Prefer prefer;
  std::size_t line = 0;

  std::string dotted() const;
  // "name=value,name=value" in the order written.
  std::string prefer_string() const;
};

struct Condition {
  enum class Op { Truthy, IsNone, DivisibleBy, Equals };
  Op op = Op::Truthy;
  bool negate = false;
  VarRef subject;
  std::string literal;
  long divisor = 1;
};

struct Node {
  enum class Kind { Text, Variable, If, For };
  Kind kind = Kind::Text;
  std::string text;
  VarRef var;
  // If: one (condition, body) per if/elif, then the else body.
  std::vector<std::pair<Condition, std::vector<Node>>> branches;
  std::vector<Node> otherwise;
  // For: the loop body.
  std::vector<Node> body;
};

struct Template {
  enum class Kind { Single, Multipart } kind = Kind::Single;
  std::vector<Node> nodes;  // Single
  std::vector<Node> title_part;
  std::vector<Node> element_part;
  std::vector<Node> element_media;
};

inline constexpr std::string_view kMultipartMarker = "RAINTALE MULTIPART TEMPLATE";
inline constexpr std::string_view kTitlePartMarker = "RAINTALE TITLE PART";
inline constexpr std::string_view kElementPartMarker = "RAINTALE ELEMENT PART";
inline constexpr std::string_view kElementMediaMarker = "RAINTALE ELEMENT MEDIA";

// Throws TemplateError for unbalanced blocks, bad syntax and paths outside
// the vocabulary.
Template parse_template(std::string_view text);

// True when the path is part of the template vocabulary.
bool known_variable(const std::vector<std::string>& path);
// Names usable after "element.surrogate.".
const std::vector<std::string>& surrogate_variables();

// Every variable node, in document order, across all parts.
std::vector<VarRef> template_variables(const Template& t);

// Values are JSON: strings render verbatim, null as nothing, numbers and
// containers as JSON text.
struct RenderScope {
  nlohmann::json globals;  // title, generated_by, collection_url, metadata
  std::size_t element_count = 0;
  // Fields of element i: type, value, text.
  std::function<nlohmann::json(std::size_t index)> element;
  // element.surrogate.* and element.thumbnail for element i.
  std::function<nlohmann::json(std::size_t index, const VarRef& var)> surrogate;
};

std::string render_nodes(const std::vector<Node>& nodes, const RenderScope& scope);
// Renders nodes with `element` bound to index i outside any loop.
std::string render_for_element(const std::vector<Node>& nodes, const RenderScope& scope, std::size_t index);

}  // namespace mkit::story
