#include "mkit/service.h"

#include <httplib.h>

#include <fstream>
#include <json.hpp>
#include <list>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "mkit/draw.h"
#include "mkit/errors.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit::service {

using Json = nlohmann::ordered_json;

int status_for(const std::exception& e) {
  if (dynamic_cast<const InvalidUri*>(&e) || dynamic_cast<const UnknownAlgorithm*>(&e) ||
      dynamic_cast<const BadPreference*>(&e))
    return 400;
  if (dynamic_cast<const NotAMemento*>(&e) || dynamic_cast<const UnknownEndpoint*>(&e)) return 404;
  if (dynamic_cast<const ConnectionFailed*>(&e)) return 502;
  if (dynamic_cast<const FetchTimeout*>(&e) || dynamic_cast<const RenderTimeout*>(&e) ||
      dynamic_cast<const DeadlineExceeded*>(&e))
    return 504;
  return 500;
}

// ---- cache

struct AnalysisCache::Impl {
  struct Entry {
    std::string urim;
    std::shared_ptr<MementoAnalysis> analysis;
    std::chrono::steady_clock::time_point loaded;
  };
  std::size_t capacity;
  std::chrono::seconds ttl;
  mutable std::mutex mutex;
  std::list<Entry> lru;  // most recent first
  std::unordered_map<std::string, std::list<Entry>::iterator> index;
  std::size_t loads = 0;
};

AnalysisCache::AnalysisCache(std::size_t capacity, std::chrono::seconds ttl) : impl_(std::make_unique<Impl>()) {
  impl_->capacity = capacity;
  impl_->ttl = ttl;
}

AnalysisCache::~AnalysisCache() = default;

std::shared_ptr<MementoAnalysis> AnalysisCache::get(const std::string& urim,
                                                    const std::shared_ptr<const Fetcher>& fetcher,
                                                    const std::shared_ptr<const AnalysisConfig>& config) {
  const auto now = std::chrono::steady_clock::now();
  {
    std::lock_guard lock(impl_->mutex);
    if (auto it = impl_->index.find(urim); it != impl_->index.end()) {
      if (now - it->second->loaded < impl_->ttl) {
        impl_->lru.splice(impl_->lru.begin(), impl_->lru, it->second);
        return it->second->analysis;
      }
      impl_->lru.erase(it->second);
      impl_->index.erase(it);
    }
  }
  auto analysis = std::make_shared<MementoAnalysis>(urim, fetcher, config);
  analysis->record();  // throws; failures are not cached
  std::lock_guard lock(impl_->mutex);
  ++impl_->loads;
  if (impl_->capacity == 0) return analysis;
  if (auto it = impl_->index.find(urim); it != impl_->index.end()) return it->second->analysis;
  impl_->lru.push_front({urim, analysis, now});
  impl_->index[urim] = impl_->lru.begin();
  while (impl_->lru.size() > impl_->capacity) {
    impl_->index.erase(impl_->lru.back().urim);
    impl_->lru.pop_back();
  }
  return analysis;
}

std::size_t AnalysisCache::size() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->lru.size();
}

std::size_t AnalysisCache::loads() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->loads;
}

// ---- endpoints

namespace {

constexpr std::string_view kMementoPrefix = "/services/memento/";
constexpr std::string_view kProductPrefix = "/services/product/";

const std::vector<std::string_view> kMementoEndpoints = {
    "contentdata", "bestimage", "imagedata", "archivedata", "originalresourcedata",
    "seeddata", "paragraphrank", "sentencerank", "page-metadata"};
const std::vector<std::string_view> kProductEndpoints = {"socialcard", "thumbnail", "imagereel", "wordcloud",
                                                         "docreel"};

bool known(const std::vector<std::string_view>& list, std::string_view name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

Json base_body(const std::string& urim) {
  Json j;
  j["urim"] = urim;
  j["generation-time"] = Timestamp::now().to_iso8601();
  return j;
}

Response json_response(const Json& j, int status = 200) {
  Response r;
  r.status = status;
  r.content_type = "application/json";
  // Request text echoed in errors may be invalid UTF-8.
  r.body = j.dump(2, ' ', false, Json::error_handler_t::replace);
  return r;
}

Json optional_string(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

Json optional_time(const std::optional<Timestamp>& t) { return t ? Json(t->to_iso8601()) : Json(nullptr); }

void check_uri(const std::string& urim) {
  const auto u = parse_absolute_uri(urim);
  if (!u || (u->scheme != "http" && u->scheme != "https") || u->host.empty())
    throw InvalidUri("'" + urim + "' is not an absolute http(s) URI");
}

std::optional<std::string_view> prefer_of(const HttpHeaders& headers, std::string& storage) {
  const auto all = headers.get_all("Prefer");
  if (all.empty()) return std::nullopt;
  storage.clear();
  for (const auto& v : all) storage += (storage.empty() ? "" : ",") + v;
  return storage;
}

Json image_record(const ImageCandidate& c, const ScoringWeights& w) {
  Json j;
  j["source"] = "body";
  j["is-a-memento"] = c.features ? c.features->is_a_memento : false;
  j["fetched-uri"] = c.fetched_uri;
  j["status"] = to_string(c.fetch_status);
  if (!c.features) {
    j["error"] = c.detail;
    return j;
  }
  const ImageFeatures& f = *c.features;
  j["content-type"] = f.content_type;
  j["width"] = f.width;
  j["height"] = f.height;
  j["blank columns in histogram"] = f.h;
  j["size in pixels"] = f.s;
  j["ratio width/height"] = f.r;
  j["byte size"] = f.byte_size;
  j["colorcount"] = f.c;
  for (const auto& [k, v] : f.hashes) j[k] = v;
  j["N"] = f.N;
  j["n"] = f.n;
  j["k1"] = w.k1;
  j["k2"] = w.k2;
  j["k3"] = w.k3;
  j["k4"] = w.k4;
  j["k5"] = w.k5;
  if (c.score)
    j["calculated score"] = *c.score;
  else
    j["error"] = c.detail;
  return j;
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      cache_(std::make_shared<AnalysisCache>(config_.cache_capacity, config_.cache_ttl)) {
  if (!config_.fetcher) config_.fetcher = std::make_shared<HttplibFetcher>();
  if (!config_.analysis) {
    auto a = std::make_shared<AnalysisConfig>();
    a->default_image_uri = config_.service_base + kDefaultImagePath;
    config_.analysis = a;
  }
}

Response Service::handle(std::string_view method, std::string_view target, const HttpHeaders& headers) const {
  std::string urim;
  try {
    if (method != "GET" && method != "HEAD") throw UnknownEndpoint("method " + std::string(method) + " not served");
    for (const auto prefix : {kMementoPrefix, kProductPrefix}) {
      if (target.substr(0, prefix.size()) != prefix) continue;
      const std::string_view rest = target.substr(prefix.size());
      const auto slash = rest.find('/');
      const std::string_view endpoint = rest.substr(0, slash);
      urim = slash == std::string_view::npos ? std::string() : std::string(rest.substr(slash + 1));
      const bool memento = prefix == kMementoPrefix;
      if (!known(memento ? kMementoEndpoints : kProductEndpoints, endpoint))
        throw UnknownEndpoint("no endpoint " + std::string(prefix) + std::string(endpoint));
      check_uri(urim);
      return memento ? memento_endpoint(endpoint, urim, headers) : product_endpoint(endpoint, urim, headers);
    }
    return static_file(target);
  } catch (const std::exception& e) {
    const int status = status_for(e);
    Json j = base_body(urim);
    j["status"] = status;
    j["error"] = e.what();
    return json_response(j, status);
  } catch (...) {
    Json j = base_body(urim);
    j["status"] = 500;
    j["error"] = "unknown failure";
    return json_response(j, 500);
  }
}

Response Service::memento_endpoint(std::string_view endpoint, const std::string& urim,
                                   const HttpHeaders& headers) const {
  std::string prefer_storage;
  const auto prefer = prefer_of(headers, prefer_storage);
  std::optional<PreferenceSet> prefs;
  if (!preference_specs(endpoint).empty()) prefs = parse_prefer(prefer, endpoint);

  const auto a = cache_->get(urim, config_.fetcher, config_.analysis);
  Json j = base_body(urim);
  if (endpoint == "contentdata") {
    const auto& c = a->content();
    j["title"] = c.title;
    j["snippet"] = c.snippet;
    j["memento-datetime"] = a->record().memento_datetime.to_iso8601();
  } else if (endpoint == "bestimage") {
    j["best-image-uri"] = a->best_image().best_uri;
  } else if (endpoint == "imagedata") {
    const auto& sel = a->images();
    j["processed urim"] = a->record().raw_urim.value_or(a->record().final_urim);
    Json images = Json::object();
    for (const auto& c : sel.candidates) images[c.urim] = image_record(c, a->config().weights);
    j["images"] = images;
    Json ranked = Json::array();
    for (auto i : sel.ranking) ranked.push_back(sel.candidates[i].urim);
    j["ranked images"] = ranked;
  } else if (endpoint == "archivedata") {
    const auto& d = a->archive();
    j["archive-uri"] = d.archive_uri;
    j["archive-name"] = d.archive_name;
    j["archive-favicon"] = optional_string(d.archive_favicon.uri);
    if (d.collection_id) {
      j["archive-collection-id"] = *d.collection_id;
      j["archive-collection-name"] = optional_string(d.collection_name);
      j["archive-collection-uri"] = optional_string(d.collection_uri);
    }
  } else if (endpoint == "originalresourcedata") {
    const auto& o = a->original();
    j["original-uri"] = o.original_uri;
    j["original-domain"] = o.original_domain;
    j["original-favicon"] = optional_string(o.original_favicon.uri);
    j["original-linkstatus"] = to_string(o.linkstatus);
  } else if (endpoint == "seeddata") {
    const auto& s = a->seed();
    j["timemap"] = optional_string(s.timemap_uri);
    j["timegate"] = optional_string(s.timegate_uri);
    j["original-url"] = s.original_url;
    if (s.timemap) {
      j["memento-count"] = s.timemap->memento_count;
      j["first-memento-datetime"] = optional_time(s.timemap->first_memento_datetime);
      j["first-urim"] = optional_string(s.timemap->first_urim);
      j["last-memento-datetime"] = optional_time(s.timemap->last_memento_datetime);
      j["last-urim"] = optional_string(s.timemap->last_urim);
    } else {
      for (const char* k : {"memento-count", "first-memento-datetime", "first-urim", "last-memento-datetime",
                            "last-urim"})
        j[k] = nullptr;
    }
    if (s.metadata) j["metadata"] = *s.metadata;
  } else if (endpoint == "paragraphrank") {
    const std::string alg = prefs->get("algorithm");
    j["algorithm"] = alg;
    Json list = Json::array();
    for (const auto& p : a->paragraphs(alg))
      list.push_back(Json{{"paragraph", p.text}, {"score", p.score}, {"index", p.index}});
    j["scored paragraphs"] = list;
  } else if (endpoint == "sentencerank") {
    const auto r = a->sentences(prefs->get("algorithm"));
    j["paragraph scoring algorithm"] = r.paragraph_algorithm;
    j["sentence ranking algorithm"] = r.sentence_algorithm;
    Json list = Json::array();
    for (const auto& s : r.sentences)
      list.push_back(
          Json{{"sentence", s.text}, {"score", s.score}, {"rank", s.rank}, {"paragraph index", s.paragraph_index}});
    j["scored sentences"] = list;
  } else if (endpoint == "page-metadata") {
    j["page-metadata"] = a->page_metadata();
  }
  Response r = json_response(j);
  if (prefs) r.headers.set("Preference-Applied", prefs->applied_header());
  return r;
}

Response Service::product_endpoint(std::string_view endpoint, const std::string& urim,
                                   const HttpHeaders& headers) const {
  std::string prefer_storage;
  PreferenceSet prefs = parse_prefer(prefer_of(headers, prefer_storage), endpoint);
  const auto a = cache_->get(urim, config_.fetcher, config_.analysis);
  const Deadline deadline = std::chrono::steady_clock::now() + config_.product_timeout;
  Response r;
  if (endpoint == "socialcard") {
    r.body = build_social_card(*a, SocialCardOptions::from(prefs, config_.service_base)).html;
    r.content_type = "text/html; charset=utf-8";
  } else if (endpoint == "thumbnail") {
    if (!config_.renderer) throw RendererUnavailable("no thumbnail renderer is configured");
    r.body = render_thumbnail(*a, prefs, *config_.renderer);
    r.content_type = "image/png";
  } else if (endpoint == "imagereel") {
    r.body = build_imagereel(*a, prefs, deadline).gif;
    r.content_type = "image/gif";
  } else if (endpoint == "docreel") {
    r.body = build_docreel(*a, prefs, deadline).gif;
    r.content_type = "image/gif";
  } else if (endpoint == "wordcloud") {
    WordCloud w = build_wordcloud(*a, prefs);
    if (w.json) {
      r.body = *w.json;
      r.content_type = "application/json";
    } else {
      r.body = std::move(*w.png);
      r.content_type = "image/png";
    }
  }
  r.headers.set("Preference-Applied", prefs.applied_header());
  return r;
}

Response Service::static_file(std::string_view target) const {
  std::string_view path = target.substr(0, target.find_first_of("?#"));
  Response r;
  if (path == kCardScriptPath) {
    r.body = card_script();
    r.content_type = "application/javascript";
    return r;
  }
  if (path == kDefaultImagePath) {
    r.body = draw::default_image_png();
    r.content_type = "image/png";
    return r;
  }
  if (config_.static_dir) {
    std::string rel(path == "/" ? "/index.html" : path);
    if (rel.find("..") == std::string::npos) {
      const auto file = *config_.static_dir / rel.substr(1);
      std::ifstream in(file, std::ios::binary);
      if (in) {
        std::ostringstream s;
        s << in.rdbuf();
        r.body = s.str();
        const auto ext = file.extension().string();
        r.content_type = ext == ".html"  ? "text/html; charset=utf-8"
                         : ext == ".js"  ? "application/javascript"
                         : ext == ".css" ? "text/css"
                         : ext == ".png" ? "image/png"
                                         : "application/octet-stream";
        return r;
      }
    }
  }
  if (path == "/") {
    r.content_type = "text/html; charset=utf-8";
    r.body =
        "<!DOCTYPE html><html><head><title>mementokit</title></head><body><h1>mementokit</h1>"
        "<p>Memento endpoints live under /services/memento/ and products under /services/product/.</p>"
        "</body></html>";
    return r;
  }
  throw UnknownEndpoint("nothing at " + std::string(path));
}

// ---- HTTP front end

struct Server::Impl {
  httplib::Server server;
};

Server::Server(std::shared_ptr<const Service> service) : impl_(std::make_unique<Impl>()) {
  auto handler = [service](const httplib::Request& req, httplib::Response& res) {
    HttpHeaders headers;
    for (const auto& [k, v] : req.headers) headers.add(k, v);
    const std::string target = req.target.empty() ? req.path : req.target;
    Response r = service->handle(req.method, target, headers);
    res.status = r.status;
    for (const auto& [k, v] : r.headers.entries()) res.set_header(k, v);
    res.set_content(std::move(r.body), r.content_type);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
  impl_->server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    res.status = 500;
    res.set_content("{\"status\": 500, \"error\": \"internal error\"}", "application/json");
  });
}

Server::~Server() { stop(); }

int Server::start(const std::string& address, int port) {
  port_ = port == 0 ? impl_->server.bind_to_any_port(address) : (impl_->server.bind_to_port(address, port) ? port : -1);
  if (port_ <= 0) throw ConfigError("service: cannot bind " + address + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void Server::listen(const std::string& address, int port) {
  if (!impl_->server.bind_to_port(address, port))
    throw ConfigError("service: cannot bind " + address + ":" + std::to_string(port));
  port_ = port;
  impl_->server.listen_after_bind();
}

void Server::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mkit::service
