#include "mkit/preferences.h"

#include <algorithm>
#include <charconv>
#include <climits>

#include "mkit/color.h"
#include "mkit/errors.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit {

namespace {

PreferenceSpec int_pref(std::string name, long min, long max, long def) {
  PreferenceSpec s;
  s.name = std::move(name);
  s.type = PreferenceType::Int;
  s.min = min;
  s.max = max;
  s.default_value = std::to_string(def);
  return s;
}

PreferenceSpec flag_pref(std::string name, bool def, bool echo_only_if_requested = false) {
  PreferenceSpec s;
  s.name = std::move(name);
  s.type = PreferenceType::YesNo;
  s.default_value = def ? "yes" : "no";
  s.echo_only_if_requested = echo_only_if_requested;
  return s;
}

PreferenceSpec choice_pref(std::string name, std::vector<std::string> choices) {
  PreferenceSpec s;
  s.name = std::move(name);
  s.type = PreferenceType::Choice;
  s.default_value = choices.front();
  s.choices = std::move(choices);
  return s;
}

PreferenceSpec text_pref(std::string name, std::string def,
                         std::function<std::string(std::string_view)> normalize) {
  PreferenceSpec s;
  s.name = std::move(name);
  s.type = PreferenceType::Text;
  s.default_value = std::move(def);
  s.normalize = std::move(normalize);
  return s;
}

std::string normalize_colormap(std::string_view v) {
  const std::string name(text::trim(v));
  if (!has_colormap(name)) throw BadPreference("unknown colormap '" + name + "'");
  return name;
}

std::string normalize_color(std::string_view v) {
  const std::string color = to_lower_ascii(text::trim(v));
  if (!parse_color(color)) throw BadPreference("cannot parse color '" + color + "'");
  return color;
}

const std::map<std::string, std::vector<PreferenceSpec>, std::less<>>& table() {
  static const std::map<std::string, std::vector<PreferenceSpec>, std::less<>> t = {
      {"socialcard",
       {flag_pref("datauri_favicon", false), flag_pref("datauri_image", false),
        flag_pref("using_remote_javascript", true), flag_pref("minify_markup", false)}},
      {"thumbnail",
       {int_pref("viewport_width", 1, 5120, 1024), int_pref("viewport_height", 1, 2880, 768),
        int_pref("thumbnail_width", 1, 5120, 208), int_pref("thumbnail_height", 1, 2880, 156),
        int_pref("timeout", 1, 300, 60), flag_pref("remove_banner", false, true)}},
      {"imagereel",
       {int_pref("duration", 1, 300, 100), int_pref("imagecount", 1, 10, 5),
        int_pref("width", 1, 5120, 320), int_pref("height", 1, 2880, 240)}},
      {"wordcloud",
       {text_pref("colormap", "inferno", normalize_colormap),
        text_pref("background_color", "white", normalize_color), flag_pref("textonly", false)}},
      {"docreel",
       {int_pref("duration", 1, 300, 100), int_pref("imagecount", 0, 10, 5),
        int_pref("sentencecount", 0, 10, 5), int_pref("width", 1, 5120, 320),
        int_pref("height", 1, 2880, 240)}},
      {"sentencerank",
       {choice_pref("algorithm", {"readability/lede3", "readability/textrank", "justext/lede3",
                                  "justext/textrank"})}},
      {"paragraphrank", {choice_pref("algorithm", {"readability", "justext"})}},
  };
  return t;
}

std::string unquote(std::string_view v) {
  v = text::trim(v);
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return std::string(v);
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\' && i + 2 < v.size()) ++i;
    out += v[i];
  }
  return out;
}

std::optional<long> parse_long(std::string_view v) {
  v = text::trim(v);
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ptr != v.data() + v.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) return v.front() == '-' ? LONG_MIN : LONG_MAX;
  if (ec != std::errc()) return std::nullopt;
  return out;
}

std::optional<std::string> parse_flag(std::string_view v) {
  const std::string s = to_lower_ascii(text::trim(v));
  if (s == "yes" || s == "true" || s == "1" || s == "on") return "yes";
  if (s == "no" || s == "false" || s == "0" || s == "off") return "no";
  return std::nullopt;
}

}  // namespace

const std::vector<PreferenceSpec>& preference_specs(std::string_view endpoint) {
  static const std::vector<PreferenceSpec> none;
  const auto it = table().find(endpoint);
  return it == table().end() ? none : it->second;
}

std::vector<std::pair<std::string, std::string>> split_prefer_header(std::string_view header) {
  // Commas inside quoted strings do not separate preferences.
  std::vector<std::string> tokens(1);
  bool quoted = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const char c = header[i];
    if (c == '"') quoted = !quoted;
    if (quoted && c == '\\' && i + 1 < header.size()) {
      tokens.back() += c;
      tokens.back() += header[++i];
      continue;
    }
    if (c == ',' && !quoted)
      tokens.emplace_back();
    else
      tokens.back() += c;
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& token : tokens) {
    std::string_view t = token;
    // Drop ";param" parts that sit outside quotes.
    bool q = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '"') q = !q;
      if (t[i] == ';' && !q) {
        t = t.substr(0, i);
        break;
      }
    }
    t = text::trim(t);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    std::string name = to_lower_ascii(text::trim(t.substr(0, eq)));
    if (name.empty()) continue;
    out.emplace_back(std::move(name), eq == std::string_view::npos ? "" : unquote(t.substr(eq + 1)));
  }
  return out;
}

const std::string& PreferenceSet::get(std::string_view name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw Error("no preference '" + std::string(name) + "' on " + endpoint_);
  return it->second;
}

long PreferenceSet::get_int(std::string_view name) const { return std::stol(get(name)); }

bool PreferenceSet::get_flag(std::string_view name) const { return get(name) == "yes"; }

void PreferenceSet::set_applied(std::string_view name, std::string value) {
  values_[std::string(name)] = std::move(value);
}

std::vector<std::pair<std::string, std::string>> PreferenceSet::applied() const {
  std::vector<std::pair<std::string, std::string>> out;
  if (!specs_) return out;
  for (const auto& spec : *specs_) {
    if (spec.echo_only_if_requested && !requested(spec.name)) continue;
    out.emplace_back(spec.name, values_.at(spec.name));
  }
  return out;
}

std::string PreferenceSet::applied_header() const {
  std::string out;
  for (const auto& [name, value] : applied()) {
    if (!out.empty()) out += ',';
    const bool plain = std::all_of(value.begin(), value.end(), [](char c) {
      return c != ',' && c != ';' && c != '"' && c != ' ' && c != '=';
    });
    out += name + "=";
    if (plain) {
      out += value;
    } else {
      out += '"';
      for (char c : value) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
    }
  }
  return out;
}

PreferenceSet parse_prefer(std::optional<std::string_view> header, std::string_view endpoint) {
  PreferenceSet set;
  set.endpoint_ = std::string(endpoint);
  set.specs_ = &preference_specs(endpoint);
  for (const auto& spec : *set.specs_) set.values_[spec.name] = spec.default_value;
  if (!header) return set;

  for (const auto& [name, raw] : split_prefer_header(*header)) {
    const auto spec = std::find_if(set.specs_->begin(), set.specs_->end(),
                                   [&](const PreferenceSpec& s) { return s.name == name; });
    if (spec == set.specs_->end()) continue;
    set.requested_.insert(name);
    std::string value = spec->default_value;
    switch (spec->type) {
      case PreferenceType::Int:
        if (const auto v = parse_long(raw)) value = std::to_string(std::clamp(*v, spec->min, spec->max));
        break;
      case PreferenceType::YesNo:
        if (auto v = parse_flag(raw)) value = std::move(*v);
        break;
      case PreferenceType::Choice: {
        const std::string v = to_lower_ascii(text::trim(raw));
        if (std::find(spec->choices.begin(), spec->choices.end(), v) == spec->choices.end())
          throw UnknownAlgorithm("unknown " + spec->name + " '" + std::string(raw) + "'");
        value = v;
        break;
      }
      case PreferenceType::Text:
        value = spec->normalize ? spec->normalize(raw) : std::string(text::trim(raw));
        break;
    }
    set.values_[name] = std::move(value);
  }
  return set;
}

}  // namespace mkit
