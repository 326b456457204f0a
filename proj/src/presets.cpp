#include <map>

#include "mkit/story.h"

namespace mkit::story {

namespace {

constexpr std::string_view kHeader = R"(<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>{{ title }}</title>
)";

constexpr std::string_view kStoryFields = R"({% if generated_by is not none %}
<p><strong>Story By:</strong> {{ generated_by }}</p>
{% endif %}
{% if collection_url is not none %}
<p><strong>Collection URI:</strong> <a href="{{ collection_url }}">{{ collection_url }}</a></p>
{% endif %}
)";

std::string social_cards() {
  std::string t(kHeader);
  t += R"(<style>
.card { border: 1px solid #ccc; border-radius: 6px; width: 500px; margin: 12px 0; padding: 8px; font-family: sans-serif; }
.card img.striking { max-width: 96px; max-height: 96px; float: left; margin-right: 8px; }
.card .title { font-weight: bold; }
.card .snippet { font-size: 90%; color: #333; }
.card .archive { clear: both; font-size: 80%; color: #666; }
.card .archive img { width: 16px; height: 16px; vertical-align: middle; }
</style>
</head>
<body>
<h1>{{ title }}</h1>
)";
  t += kStoryFields;
  t += R"(<hr>
{% for element in elements %}
{% if element.type == 'link' %}
<div class="card">
{% if element.surrogate.image is not none %}<img class="striking" src="{{ element.surrogate.image|prefer rank=1 }}">{% endif %}
<div class="title"><a href="{{ element.surrogate.urim }}">{{ element.surrogate.title }}</a></div>
<div class="snippet">{{ element.surrogate.snippet }}</div>
<div class="archive">
{% if element.surrogate.original_favicon is not none %}<img src="{{ element.surrogate.original_favicon }}"> {% endif %}{{ element.surrogate.original_domain }}
&middot;
{% if element.surrogate.archive_favicon is not none %}<img src="{{ element.surrogate.archive_favicon }}"> {% endif %}<a href="{{ element.surrogate.archive_uri }}">{{ element.surrogate.archive_name }}</a>
&middot; Preserved {{ element.surrogate.memento_datetime }}
</div>
</div>
{% else %}
<p>{{ element.text }}</p>
{% endif %}
{% endfor %}
</body>
</html>
)";
  return t;
}

std::string bootstrap_cards() {
  std::string t(kHeader);
  t += R"(<link rel="stylesheet" href="https://cdn.jsdelivr.net/npm/bootstrap@4.6.2/dist/css/bootstrap.min.css">
</head>
<body>
<div class="container">
<h1 class="display-4">{{ title }}</h1>
)";
  t += kStoryFields;
  t += R"(<hr>
{% for element in elements %}
{% if element.type == 'link' %}
<div class="card mb-3" style="max-width: 540px;">
<div class="row no-gutters">
<div class="col-md-4">{% if element.surrogate.image is not none %}<img class="card-img" src="{{ element.surrogate.image|prefer rank=1 }}">{% endif %}</div>
<div class="col-md-8">
<div class="card-body">
<h5 class="card-title"><a href="{{ element.surrogate.urim }}">{{ element.surrogate.title }}</a></h5>
<p class="card-text">{{ element.surrogate.snippet }}</p>
<p class="card-text"><small class="text-muted">{{ element.surrogate.original_domain }} &middot; {{ element.surrogate.archive_name }} &middot; {{ element.surrogate.memento_datetime }}</small></p>
</div>
</div>
</div>
</div>
{% else %}
<p class="lead">{{ element.text }}</p>
{% endif %}
{% endfor %}
</div>
</body>
</html>
)";
  return t;
}

std::string thumbnail_grid(int columns) {
  const std::string n = std::to_string(columns);
  std::string t = R"(<p><h1>{{ title }}</h1></p>
)";
  t += kStoryFields;
  t += R"(<hr>
<table border="0">
<tr>
{% for element in elements %}
{% if element.type == 'link' %}
<td><a href="{{ element.surrogate.urim }}"><img src="{{ element.surrogate.thumbnail|prefer remove_banner=yes }}"></a></td>
{% if loop.index is divisibleby )" + n + R"( %}
</tr><tr>
{% endif %}
{% else %}
<!-- Element type {{ element.type }} is unsupported by the thumbnails)" + n + R"(col template -->
{% endif %}
{% endfor %}
</tr>
</table>
)";
  return t;
}

constexpr std::string_view kMarkdown = R"(# {{ title }}
{% if generated_by is not none %}
**Story By:** {{ generated_by }}
{% endif %}
{% if collection_url is not none %}
**Collection URI:** <{{ collection_url }}>
{% endif %}

---
{% for element in elements %}
{% if element.type == 'link' %}
### [{{ element.surrogate.title }}]({{ element.surrogate.urim }})
{% if element.surrogate.image is not none %}
![]({{ element.surrogate.image|prefer rank=1 }})
{% endif %}

{{ element.surrogate.snippet }}

*{{ element.surrogate.original_domain }} preserved by {{ element.surrogate.archive_name }} on {{ element.surrogate.memento_datetime }}*
{% else %}

{{ element.text }}
{% endif %}
{% endfor %}
)";

constexpr std::string_view kMediaWiki = R"(= {{ title }} =
{% if generated_by is not none %}
'''Story By:''' {{ generated_by }}
{% endif %}
{% if collection_url is not none %}
'''Collection URI:''' [{{ collection_url }}]
{% endif %}

----
{% for element in elements %}
{% if element.type == 'link' %}
== [{{ element.surrogate.urim }} {{ element.surrogate.title }}] ==
{{ element.surrogate.snippet }}

''{{ element.surrogate.original_domain }} preserved by {{ element.surrogate.archive_name }} on {{ element.surrogate.memento_datetime }}''
{% else %}

{{ element.text }}
{% endif %}
{% endfor %}
)";

constexpr std::string_view kTwitter = R"({# RAINTALE MULTIPART TEMPLATE #}
{# RAINTALE TITLE PART #}
{{ title }}
{% if generated_by is not none %}
Story By: {{ generated_by }}
{% endif %}
{% if collection_url is not none %}
{{ collection_url }}
{% endif %}
{# RAINTALE ELEMENT PART #}
{{ element.surrogate.title }}

{{ element.surrogate.memento_datetime }}

{{ element.surrogate.urim }}
{# RAINTALE ELEMENT MEDIA #}
{{ element.surrogate.thumbnail|prefer thumbnail_width=1024,remove_banner=yes }}
{{ element.surrogate.image|prefer rank=1 }}
{{ element.surrogate.image|prefer rank=2 }}
{{ element.surrogate.image|prefer rank=3 }}
)";

constexpr std::string_view kFacebook = R"({# RAINTALE MULTIPART TEMPLATE #}
{# RAINTALE TITLE PART #}
{{ title }}
{% if generated_by is not none %}
Story By: {{ generated_by }}
{% endif %}
{% if collection_url is not none %}
Collection: {{ collection_url }}
{% endif %}
{# RAINTALE ELEMENT PART #}
{{ element.surrogate.title }}

{{ element.surrogate.snippet }}

{{ element.surrogate.original_domain }} preserved by {{ element.surrogate.archive_name }} on {{ element.surrogate.memento_datetime }}
{{ element.surrogate.urim }}
{# RAINTALE ELEMENT MEDIA #}
{{ element.surrogate.thumbnail|prefer remove_banner=yes }}
{{ element.surrogate.image|prefer rank=1 }}
{{ element.surrogate.image|prefer rank=2 }}
{{ element.surrogate.image|prefer rank=3 }}
)";

const std::map<std::string, std::string, std::less<>>& presets() {
  static const std::map<std::string, std::string, std::less<>> m = {
      {"html", social_cards()},
      {"vbsir", bootstrap_cards()},
      {"thumbnails3col", thumbnail_grid(3)},
      {"thumbnails4col", thumbnail_grid(4)},
      {"markdown", std::string(kMarkdown)},
      {"mediawiki", std::string(kMediaWiki)},
      {"mock-twitter", std::string(kTwitter)},
      {"mock-facebook", std::string(kFacebook)},
  };
  return m;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

std::optional<std::string_view> preset_template(std::string_view name) {
  const auto it = presets().find(name);
  if (it == presets().end()) return std::nullopt;
  return it->second;
}

}  // namespace mkit::story
