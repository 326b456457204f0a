#include "mkit/story.h"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "mkit/datetime.h"
#include "mkit/errors.h"
#include "mkit/service.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit::story {

using Json = nlohmann::json;

namespace {

std::string json_string(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

std::optional<std::string> optional_field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw StoryError(std::string("story field '") + key + "' must be a string");
  return it->get<std::string>();
}

Story parse_json_story(const Json& j) {
  Story s;
  s.title = optional_field(j, "title").value_or("");
  s.collection_url = optional_field(j, "collection_url");
  s.generated_by = optional_field(j, "generated_by");
  if (const auto it = j.find("metadata"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw StoryError("story field 'metadata' must be an object");
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : it->items()) m[k] = json_string(v);
    s.metadata = std::move(m);
  }
  const Json& elements = j.at("elements");
  if (!elements.is_array()) throw StoryError("story field 'elements' must be a list");
  std::size_t n = 0;
  for (const auto& e : elements) {
    ++n;
    if (!e.is_object()) throw StoryError("story element " + std::to_string(n) + " is not an object");
    const std::string type = e.value("type", "");
    const auto value = optional_field(e, "value");
    if (!value) throw StoryError("story element " + std::to_string(n) + " has no value");
    if (type == "link") {
      if (!is_absolute_uri(*value))
        throw StoryError("story element " + std::to_string(n) + ": '" + *value + "' is not an absolute URI");
      s.elements.push_back({StoryElement::Kind::Link, *value});
    } else if (type == "text") {
      s.elements.push_back({StoryElement::Kind::Text, *value});
    } else {
      throw StoryError("story element " + std::to_string(n) + " has unknown type '" + type + "'");
    }
  }
  if (s.elements.empty()) throw StoryError("no story elements");
  return s;
}

std::string key_of(const VarRef& v) { return v.dotted() + "|" + v.prefer_string(); }

std::string prefer_value(const VarRef& v, std::string_view name) {
  for (const auto& [k, val] : v.prefer)
    if (k == name) return val;
  return {};
}

std::size_t rank_of(const VarRef& v) {
  const std::string r = prefer_value(v, "rank");
  if (r.empty()) return 1;
  try {
    const long n = std::stol(r);
    if (n >= 1) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  throw TemplateError("template line " + std::to_string(v.line) + ": rank must be a positive integer");
}

const std::string& surrogate_name(const VarRef& v) { return v.path[1] == "thumbnail" ? v.path[1] : v.path[2]; }

bool is_surrogate_var(const VarRef& v) {
  return v.path[0] == "element" && (v.path[1] == "thumbnail" || v.path[1] == "surrogate");
}

std::string clean_post_text(const std::string& raw) {
  std::vector<std::string> lines;
  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    const bool blank = text::trim(line).empty();
    if (blank && (lines.empty() || lines.back().empty())) continue;
    lines.push_back(blank ? std::string() : std::string(text::trim(line)));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<MediaItem> media_lines(const std::string& raw) {
  std::vector<MediaItem> out;
  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line)) {
    const std::string item(text::trim(line));
    if (item.empty()) continue;
    MediaItem m;
    if (item.rfind("data:", 0) == 0) {
      const std::size_t comma = item.find(',');
      const std::string header = item.substr(5, comma == std::string::npos ? std::string::npos : comma - 5);
      if (comma == std::string::npos || header.find(";base64") == std::string::npos)
        throw StoryError("media data URI is not base64");
      m.content_type = header.substr(0, header.find(';'));
      m.bytes = text::base64_decode(std::string_view(item).substr(comma + 1));
    } else {
      m.uri = item;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace

Story parse_story(std::string_view bytes) {
  const std::string_view body = text::trim(bytes);
  if (body.empty()) throw StoryError("no story elements");
  if (body.front() == '{') {
    const Json j = Json::parse(body, nullptr, false);
    if (j.is_object() && j.contains("elements")) return parse_json_story(j);
  }
  Story s;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    const std::string_view line = text::trim(bytes.substr(pos, nl == std::string_view::npos ? bytes.npos : nl - pos));
    ++line_no;
    if (!line.empty()) {
      if (!is_absolute_uri(line))
        throw StoryError("story line " + std::to_string(line_no) + ": '" + std::string(line) + "' is not a URI-M");
      s.elements.push_back({StoryElement::Kind::Link, std::string(line)});
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (s.elements.empty()) throw StoryError("no story elements");
  return s;
}

const std::vector<Binding>& binding_table() {
  static const std::vector<Binding> t = {
      {"archive_collection_id", "memento", "archivedata", "archive-collection-id", false},
      {"archive_collection_name", "memento", "archivedata", "archive-collection-name", false},
      {"archive_collection_uri", "memento", "archivedata", "archive-collection-uri", false},
      {"archive_favicon", "memento", "archivedata", "archive-favicon", false},
      {"archive_name", "memento", "archivedata", "archive-name", false},
      {"archive_uri", "memento", "archivedata", "archive-uri", false},
      {"best_image_uri", "memento", "bestimage", "best-image-uri", false},
      {"first_memento_datetime", "memento", "seeddata", "first-memento-datetime", false},
      {"first_urim", "memento", "seeddata", "first-urim", false},
      {"image", "memento", "imagedata", "ranked images", false},
      {"imagereel", "product", "imagereel", "", true},
      {"last_memento_datetime", "memento", "seeddata", "last-memento-datetime", false},
      {"last_urim", "memento", "seeddata", "last-urim", false},
      {"memento_count", "memento", "seeddata", "memento-count", false},
      {"memento_datetime", "memento", "contentdata", "memento-datetime", false},
      {"memento_datetime_14num", "memento", "contentdata", "memento-datetime", false},
      {"metadata", "memento", "seeddata", "metadata", false},
      {"original_domain", "memento", "originalresourcedata", "original-domain", false},
      {"original_favicon", "memento", "originalresourcedata", "original-favicon", false},
      {"original_linkstatus", "memento", "originalresourcedata", "original-linkstatus", false},
      {"original_uri", "memento", "originalresourcedata", "original-uri", false},
      {"sentence", "memento", "sentencerank", "scored sentences", true},
      {"snippet", "memento", "contentdata", "snippet", false},
      {"thumbnail", "product", "thumbnail", "", true},
      {"timegate_uri", "memento", "seeddata", "timegate", false},
      {"timemap_uri", "memento", "seeddata", "timemap", false},
      {"title", "memento", "contentdata", "title", false},
      {"urim", "", "", "", false},
  };
  return t;
}

const Binding& binding_for(const VarRef& var) {
  if (!is_surrogate_var(var)) throw TemplateError("'" + var.dotted() + "' is not a surrogate variable");
  const std::string& name = surrogate_name(var);
  for (const auto& b : binding_table())
    if (b.variable == name) return b;
  throw TemplateError("no binding for '" + var.dotted() + "'");
}

HttpApiClient::HttpApiClient(std::string base_uri, std::shared_ptr<const Fetcher> fetcher)
    : base_(std::move(base_uri)), fetcher_(std::move(fetcher)) {
  while (!base_.empty() && base_.back() == '/') base_.pop_back();
}

ApiResult HttpApiClient::call(const std::string& service, const std::string& endpoint, const std::string& urim,
                              const std::string& prefer) const {
  HttpRequest req;
  req.url = base_ + "/services/" + service + "/" + endpoint + "/" + urim;
  if (!prefer.empty()) req.headers.set("Prefer", prefer);
  const HttpResponse r = fetcher_->fetch(req);
  return {r.status, r.headers.get("Content-Type").value_or(""), r.body};
}

ApiResult InProcessApiClient::call(const std::string& service, const std::string& endpoint, const std::string& urim,
                                   const std::string& prefer) const {
  HttpHeaders h;
  if (!prefer.empty()) h.set("Prefer", prefer);
  const auto r = service_.handle("GET", "/services/" + service + "/" + endpoint + "/" + urim, h);
  return {r.status, r.content_type, r.body};
}

struct Resolver::Impl {
  struct Result {
    ApiResult raw;
    Json json;
  };
  const ApiClient& client;
  std::mutex mu;
  std::unordered_map<std::string, std::shared_future<std::shared_ptr<const Result>>> memo;
  std::atomic<std::size_t> calls{0};

  explicit Impl(const ApiClient& c) : client(c) {}

  std::shared_ptr<const Result> fetch(const Binding& b, const std::string& urim, const std::string& prefer) {
    const std::string key = b.service + "/" + b.endpoint + "/" + urim + "\n" + prefer;
    std::promise<std::shared_ptr<const Result>> promise;
    std::shared_future<std::shared_ptr<const Result>> fut;
    bool owner = false;
    {
      std::lock_guard lock(mu);
      const auto it = memo.find(key);
      if (it == memo.end()) {
        fut = promise.get_future().share();
        memo.emplace(key, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        ++calls;
        auto r = std::make_shared<Result>();
        r->raw = client.call(b.service, b.endpoint, urim, prefer);
        if (r->raw.status < 200 || r->raw.status >= 300) {
          std::string detail;
          const Json err = Json::parse(r->raw.body, nullptr, false);
          if (err.is_object() && err.contains("error")) detail = ": " + json_string(err["error"]);
          throw StoryError(b.endpoint + " for " + urim + " answered " + std::to_string(r->raw.status) + detail);
        }
        if (b.service == "memento") {
          r->json = Json::parse(r->raw.body, nullptr, false);
          if (r->json.is_discarded()) throw StoryError(b.endpoint + " for " + urim + " returned invalid JSON");
        }
        promise.set_value(std::move(r));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }
};

Resolver::Resolver(const ApiClient& client) : impl_(std::make_unique<Impl>(client)) {}
Resolver::~Resolver() = default;
std::size_t Resolver::calls() const { return impl_->calls; }

Json Resolver::resolve(const std::string& urim, const VarRef& var) {
  const Binding& b = binding_for(var);
  if (b.service.empty()) return urim;
  std::string prefer;
  if (b.variable == "sentence") {
    if (const auto alg = prefer_value(var, "algorithm"); !alg.empty()) prefer = "algorithm=" + alg;
  } else if (b.forwards_prefer) {
    prefer = var.prefer_string();
  }
  const auto r = impl_->fetch(b, urim, prefer);
  if (b.service == "product") return text::data_uri(r->raw.content_type, r->raw.body);

  const Json& j = r->json;
  const auto it = j.find(b.field);
  if (it == j.end() || it->is_null()) return nullptr;
  if (b.variable == "image") {
    const std::size_t rank = rank_of(var);
    return it->is_array() && rank <= it->size() ? (*it)[rank - 1] : Json(nullptr);
  }
  if (b.variable == "sentence") {
    const std::size_t rank = rank_of(var);
    if (!it->is_array() || rank > it->size()) return nullptr;
    return (*it)[rank - 1].value("sentence", Json(nullptr));
  }
  if (b.variable == "memento_datetime_14num") {
    const auto t = Timestamp::parse_iso8601(json_string(*it));
    return t ? Json(t->to_14digit()) : Json(nullptr);
  }
  if (b.variable == "metadata" && var.path.size() > 3) {
    const Json* cur = &*it;
    for (std::size_t i = 3; i < var.path.size(); ++i) {
      if (!cur->is_object() || !cur->contains(var.path[i])) return nullptr;
      cur = &(*cur)[var.path[i]];
    }
    return *cur;
  }
  return *it;
}

RenderedStory render_story(const Story& story, const Template& tmpl, const ApiClient& client,
                           const RenderOptions& options) {
  std::vector<VarRef> needed;
  {
    std::set<std::string> seen;
    for (const auto& v : template_variables(tmpl))
      if (is_surrogate_var(v) && seen.insert(key_of(v)).second) needed.push_back(v);
  }

  Resolver resolver(client);
  const std::size_t n = story.elements.size();
  std::vector<std::map<std::string, Json>> values(n);
  std::vector<std::string> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& e = story.elements[i];
      if (e.kind != StoryElement::Kind::Link) continue;
      try {
        for (const auto& v : needed) values[i][key_of(v)] = resolver.resolve(e.value, v);
      } catch (const std::exception& ex) {
        failures[i] = ex.what();
      }
    }
  };
  {
    const std::size_t threads = std::max<std::size_t>(1, std::min(options.max_parallel, n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }

  RenderedStory out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i].empty()) {
      kept.push_back(i);
      continue;
    }
    if (options.policy == ErrorPolicy::Abort)
      throw StoryError("element " + std::to_string(i + 1) + " failed: " + failures[i]);
    if (options.warnings)
      *options.warnings << "warning: skipping element " << i + 1 << " (" << story.elements[i].value
                        << "): " << failures[i] << "\n";
    out.skipped.push_back(story.elements[i].value);
  }

  RenderScope scope;
  scope.globals = Json::object();
  scope.globals["title"] = story.title;
  scope.globals["generated_by"] = story.generated_by ? Json(*story.generated_by) : Json(nullptr);
  scope.globals["collection_url"] = story.collection_url ? Json(*story.collection_url) : Json(nullptr);
  scope.globals["metadata"] = story.metadata ? Json(*story.metadata) : Json(nullptr);
  scope.element_count = kept.size();
  scope.element = [&](std::size_t k) {
    const auto& e = story.elements[kept[k]];
    const bool link = e.kind == StoryElement::Kind::Link;
    return Json{{"type", link ? "link" : "text"}, {"value", e.value}, {"text", link ? Json(nullptr) : Json(e.value)}};
  };
  scope.surrogate = [&](std::size_t k, const VarRef& v) -> Json {
    const std::size_t i = kept[k];
    if (story.elements[i].kind != StoryElement::Kind::Link) return nullptr;
    const auto it = values[i].find(key_of(v));
    return it == values[i].end() ? resolver.resolve(story.elements[i].value, v) : it->second;
  };

  if (tmpl.kind == Template::Kind::Single) {
    out.document = render_nodes(tmpl.nodes, scope);
    return out;
  }
  PostPlan plan;
  plan.title.text = clean_post_text(render_nodes(tmpl.title_part, scope));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (story.elements[kept[k]].kind != StoryElement::Kind::Link) continue;
    Post p;
    p.text = clean_post_text(render_for_element(tmpl.element_part, scope, k));
    p.media = media_lines(render_for_element(tmpl.element_media, scope, k));
    plan.elements.push_back(std::move(p));
  }
  out.plan = std::move(plan);
  return out;
}

std::size_t count_code_points(std::string_view utf8) {
  return static_cast<std::size_t>(
      std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

void validate_plan(const PostPlan& plan, const PublisherLimits& limits) {
  auto check = [&](const Post& p, const std::string& label) {
    const std::size_t chars = count_code_points(p.text);
    if (chars > limits.max_chars)
      throw LimitExceeded(label + " has " + std::to_string(chars) + " characters, limit " +
                          std::to_string(limits.max_chars));
    if (p.media.size() > limits.max_media)
      throw LimitExceeded(label + " has " + std::to_string(p.media.size()) + " media items, limit " +
                          std::to_string(limits.max_media));
  };
  check(plan.title, "title post");
  for (std::size_t i = 0; i < plan.elements.size(); ++i) check(plan.elements[i], "element post " + std::to_string(i + 1));
}

PublishResult publish(const PostPlan& plan, Publisher& publisher) {
  validate_plan(plan, publisher.limits());
  PublishResult result;
  std::optional<std::string> parent;
  try {
    for (std::size_t i = 0; i <= plan.elements.size(); ++i) {
      const Post& p = i == 0 ? plan.title : plan.elements[i - 1];
      Receipt r = publisher.post(i, p, parent);
      parent = r.id;
      result.receipts.push_back(std::move(r));
    }
    result.complete = true;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

Credentials load_credentials(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot read credentials " + path.string() + ": " + e.what());
  }
  if (!root.IsMap()) throw AuthFailed("credentials file " + path.string() + " is not a mapping");
  Credentials c;
  for (const auto& kv : root) {
    if (kv.second.IsScalar()) c[kv.first.as<std::string>()] = kv.second.as<std::string>();
  }
  return c;
}

MockPublisher::MockPublisher(Network network, const Credentials& credentials, std::filesystem::path default_transcript)
    : network_(network) {
  const std::vector<std::string> required =
      network == Network::Twitter
          ? std::vector<std::string>{"consumer_key", "consumer_secret", "access_token", "access_token_secret"}
          : std::vector<std::string>{"page_id", "access_token"};
  for (const auto& k : required) {
    const auto it = credentials.find(k);
    if (it == credentials.end() || it->second.empty()) throw AuthFailed("credentials lack '" + k + "'");
  }
  const auto t = credentials.find("transcript");
  transcript_ = t != credentials.end() ? std::filesystem::path(t->second) : std::move(default_transcript);
  if (const auto f = credentials.find("fail_after"); f != credentials.end()) {
    try {
      fail_after_ = static_cast<std::size_t>(std::stoul(f->second));
    } catch (const std::exception&) {
      throw ConfigError("fail_after must be a non-negative integer");
    }
  }
  std::ofstream truncate(transcript_, std::ios::trunc);
  if (!truncate) throw ConfigError("cannot write transcript " + transcript_.string());
}

PublisherLimits MockPublisher::limits() const {
  if (network_ == Network::Twitter) return {280, 4};
  return {63206, 10};
}

Receipt MockPublisher::post(std::size_t index, const Post& post, const std::optional<std::string>& parent) {
  if (fail_after_ && posted_ >= *fail_after_) throw ConnectionFailed("simulated outage after " + std::to_string(posted_) + " posts");
  const auto l = limits();
  if (count_code_points(post.text) > l.max_chars || post.media.size() > l.max_media)
    throw LimitExceeded("post " + std::to_string(index) + " rejected by the network");
  ++posted_;
  Receipt r;
  r.index = index;
  r.id = std::string(network_ == Network::Twitter ? "tweet-" : "fbpost-") + std::to_string(posted_);
  r.parent_id = parent;

  Json media = Json::array();
  for (const auto& m : post.media) {
    if (m.attachment())
      media.push_back({{"content_type", m.content_type}, {"bytes", m.bytes.size()}, {"sha256", sha256_hex(m.bytes)}});
    else
      media.push_back({{"uri", m.uri}});
  }
  nlohmann::ordered_json line;
  line["id"] = r.id;
  line["parent"] = parent ? Json(*parent) : Json(nullptr);
  line["index"] = index;
  line["text"] = post.text;
  line["media"] = media;
  std::ofstream out(transcript_, std::ios::app);
  out << line.dump() << "\n";
  if (!out) throw ConnectionFailed("cannot append to transcript " + transcript_.string());
  return r;
}

}  // namespace mkit::story
