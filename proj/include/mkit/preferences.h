#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mkit {

enum class PreferenceType { Int, YesNo, Choice, Text };

struct PreferenceSpec {
  std::string name;
  PreferenceType type = PreferenceType::Int;
  long min = 0;
  long max = 0;
  std::string default_value;
  std::vector<std::string> choices;  // Choice only
  // Text only: returns the normalized value or throws BadPreference.
  std::function<std::string(std::string_view)> normalize;
  // Left out of Preference-Applied unless the client asked for it.
  bool echo_only_if_requested = false;
};

// Preferences understood by one endpoint, in echo order. Empty when the
// endpoint takes none.
const std::vector<PreferenceSpec>& preference_specs(std::string_view endpoint);

// name=value pairs of a Prefer header; names lowercased, quotes removed,
// ";" parameters dropped.
std::vector<std::pair<std::string, std::string>> split_prefer_header(std::string_view header);

class PreferenceSet {
 public:
  const std::string& endpoint() const { return endpoint_; }

  const std::string& get(std::string_view name) const;
  long get_int(std::string_view name) const;
  bool get_flag(std::string_view name) const;
  bool requested(std::string_view name) const { return requested_.count(std::string(name)) > 0; }

  // Records what was actually done, e.g. remove_banner=no on an archive
  // without a banner-free rewrite.
  void set_applied(std::string_view name, std::string value);

  std::vector<std::pair<std::string, std::string>> applied() const;
  std::string applied_header() const;

 private:
  friend PreferenceSet parse_prefer(std::optional<std::string_view>, std::string_view);
  std::string endpoint_;
  const std::vector<PreferenceSpec>* specs_ = nullptr;
  std::map<std::string, std::string, std::less<>> values_;
  std::set<std::string, std::less<>> requested_;
};

// Unknown names are ignored. Integers outside the bounds are clamped;
// unparseable integers and flags fall back to the default. Unknown choices
// throw UnknownAlgorithm, bad text values throw BadPreference.
PreferenceSet parse_prefer(std::optional<std::string_view> header, std::string_view endpoint);

}  // namespace mkit
