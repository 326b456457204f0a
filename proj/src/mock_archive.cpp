#include "mkit/mock_archive.h"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "mkit/errors.h"
#include "mkit/memento.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit::mock {

namespace {

using nlohmann::json;

std::string bare_host(std::string_view host) {
  std::string h = to_lower_ascii(text::trim(host));
  if (!h.empty() && h.front() != '[')
    if (const auto colon = h.rfind(':'); colon != std::string::npos) h.resize(colon);
  return h;
}

// Proxies and path normalizers collapse "http://" to "http:/".
std::string repair_uri_r(std::string_view uri) {
  std::string u(uri);
  for (const char* scheme : {"http:/", "https:/"}) {
    const std::string s = scheme;
    if (u.rfind(s, 0) == 0 && (u.size() == s.size() || u[s.size()] != '/')) {
      u.insert(s.size(), "/");
      break;
    }
  }
  return u;
}

std::string guess_type(const std::filesystem::path& p) {
  const std::string ext = to_lower_ascii(p.extension().string());
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".css") return "text/css";
  if (ext == ".js") return "application/javascript";
  if (ext == ".json") return "application/json";
  return "application/octet-stream";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("manifest: cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// "file" (relative to the manifest), "body" or "base64"; returns body and guessed type.
std::pair<std::string, std::string> load_body(const json& j, const std::filesystem::path& base) {
  if (j.contains("file")) {
    const std::filesystem::path p = base / j.at("file").get<std::string>();
    return {read_file(p), guess_type(p)};
  }
  if (j.contains("base64")) return {text::base64_decode(j.at("base64").get<std::string>()), "application/octet-stream"};
  if (j.contains("body")) return {j.at("body").get<std::string>(), "text/html; charset=utf-8"};
  return {"", "text/html; charset=utf-8"};
}

HttpResponse plain(int status, std::string body, std::string type = "text/plain; charset=utf-8") {
  HttpResponse r;
  r.status = status;
  r.body = std::move(body);
  r.headers.set("Content-Type", std::move(type));
  return r;
}

bool is_html(const Capture& c) { return to_lower_ascii(c.content_type).find("html") != std::string::npos; }

}  // namespace

Manifest Manifest::parse(std::string_view text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  Manifest m;
  try {
    if (j.contains("hosts"))
      for (const auto& [name, h] : j.at("hosts").items()) {
        HostEntry entry;
        if (h.contains("archive")) {
          ArchiveSettings a;
          const auto& aj = h.at("archive");
          a.scheme = aj.value("scheme", a.scheme);
          a.prefix = aj.value("prefix", a.prefix);
          a.timegate_prefix = aj.value("timegate_prefix", a.timegate_prefix);
          a.timemap_prefix = aj.value("timemap_prefix", a.timemap_prefix);
          entry.archive = a;
        }
        if (h.contains("files"))
          for (const auto& [target, f] : h.at("files").items()) {
            StaticFile file;
            auto [body, type] = load_body(f, base);
            file.body = std::move(body);
            file.content_type = f.value("content_type", type);
            file.status = f.value("status", 200);
            entry.files[target] = std::move(file);
          }
        m.hosts[bare_host(name)] = std::move(entry);
      }
    if (j.contains("captures"))
      for (const auto& c : j.at("captures")) {
        Capture cap;
        cap.host = bare_host(c.at("host").get<std::string>());
        cap.uri_r = c.at("uri_r").get<std::string>();
        const auto dt = Timestamp::parse_14digit(c.at("datetime").get<std::string>());
        if (!dt || c.at("datetime").get<std::string>().size() != 14)
          throw ConfigError("manifest: bad datetime for " + cap.uri_r);
        cap.datetime = *dt;
        cap.collection = c.value("collection", "");
        auto [body, type] = load_body(c, base);
        cap.body = std::move(body);
        cap.content_type = c.value("content_type", type);
        if (!m.hosts.count(cap.host) || !m.hosts.at(cap.host).archive)
          throw ConfigError("manifest: capture host " + cap.host + " is not an archive");
        m.captures.push_back(std::move(cap));
      }
    if (j.contains("faults"))
      for (const auto& f : j.at("faults")) {
        Fault fault;
        fault.host = bare_host(f.value("host", ""));
        fault.path_prefix = f.value("path_prefix", "");
        fault.delay_ms = f.value("delay_ms", 0);
        fault.reset = f.value("reset", false);
        if (f.contains("status")) fault.status = f.at("status").get<int>();
        m.faults.push_back(std::move(fault));
      }
    m.default_host = bare_host(j.value("default_host", ""));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& file) {
  return parse(read_file(file), file.parent_path());
}

Archive::Archive(Manifest manifest) : manifest_(std::move(manifest)) {
  std::stable_sort(manifest_.captures.begin(), manifest_.captures.end(),
                   [](const Capture& a, const Capture& b) { return a.datetime < b.datetime; });
}

std::string Archive::urim(const Capture& c, std::string_view modifier) const {
  const ArchiveSettings& a = *manifest_.hosts.at(c.host).archive;
  std::string prefix = a.prefix;
  if (const auto pos = prefix.find("{collection}"); pos != std::string::npos) prefix.replace(pos, 12, c.collection);
  return a.scheme + "://" + c.host + prefix + c.datetime.to_14digit() + std::string(modifier) + "/" + c.uri_r;
}

std::string Archive::timegate_uri(std::string_view host, std::string_view uri_r) const {
  const ArchiveSettings& a = *manifest_.hosts.at(std::string(host)).archive;
  return a.scheme + "://" + std::string(host) + a.timegate_prefix + std::string(uri_r);
}

std::string Archive::timemap_uri(std::string_view host, std::string_view uri_r) const {
  const ArchiveSettings& a = *manifest_.hosts.at(std::string(host)).archive;
  return a.scheme + "://" + std::string(host) + a.timemap_prefix + std::string(uri_r);
}

const HostEntry* Archive::host_entry(std::string_view host, std::string* resolved) const {
  std::string h = bare_host(host);
  auto it = manifest_.hosts.find(h);
  if (it == manifest_.hosts.end() && !manifest_.default_host.empty()) it = manifest_.hosts.find(manifest_.default_host);
  if (it == manifest_.hosts.end()) return nullptr;
  *resolved = it->first;
  return &it->second;
}

std::vector<const Capture*> Archive::captures_of(std::string_view host, std::string_view uri_r) const {
  std::vector<const Capture*> out;
  for (const auto& c : manifest_.captures)
    if (c.host == host && c.uri_r == uri_r) out.push_back(&c);
  return out;
}

std::string Archive::augment(const Capture& c, bool with_banner) const {
  static const std::regex attr(R"((\s(?:src|href)\s*=\s*)(["'])([^"']*)\2)", std::regex::icase);
  std::string out;
  auto begin = std::sregex_iterator(c.body.begin(), c.body.end(), attr);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(c.body, last, static_cast<std::size_t>(m.position(0)) - last);
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
    const std::string value = m[3].str();
    const std::string lower = to_lower_ascii(value);
    std::string rewritten = value;
    if (!value.empty() && value[0] != '#' && lower.rfind("data:", 0) != 0 && lower.rfind("javascript:", 0) != 0 &&
        lower.rfind("mailto:", 0) != 0) {
      const std::string absolute = resolve_reference(c.uri_r, value);
      const auto u = parse_absolute_uri(absolute);
      if (u && (u->scheme == "http" || u->scheme == "https")) {
        const bool src = to_lower_ascii(m[1].str()).find("src") != std::string::npos;
        Capture target = c;
        target.uri_r = absolute;
        rewritten = urim(target, src ? "im_" : "");
      }
    }
    out += m[1].str() + m[2].str() + rewritten + m[2].str();
  }
  out.append(c.body, last, std::string::npos);
  if (!with_banner) return out;

  const std::string banner =
      "<div id=\"wm-banner\" class=\"archive-banner\"><a href=\"/\">Mock Archive</a> "
      "captured " + c.datetime.to_iso8601() + " | <a href=\"" + timemap_uri(c.host, c.uri_r) +
      "\">all captures</a></div>";
  static const std::regex body_tag(R"(<body\b[^>]*>)", std::regex::icase);
  std::smatch bm;
  if (std::regex_search(out, bm, body_tag)) {
    out.insert(static_cast<std::size_t>(bm.position(0) + bm.length(0)), banner);
  } else {
    out = banner + out;
  }
  return out;
}

HttpResponse Archive::memento_response(const Capture& c, std::string_view modifier) const {
  HttpResponse r;
  r.status = 200;
  r.headers.set("Content-Type", c.content_type);
  r.headers.set("Memento-Datetime", c.datetime.to_http());
  r.headers.set("Link", "<" + c.uri_r + ">; rel=\"original\", <" + timegate_uri(c.host, c.uri_r) +
                            ">; rel=\"timegate\", <" + timemap_uri(c.host, c.uri_r) +
                            ">; rel=\"timemap\"; type=\"application/link-format\"");
  const bool raw = modifier == "im_" || modifier == "id_";
  if (!is_html(c) || raw)
    r.body = c.body;
  else
    r.body = augment(c, modifier != "if_");
  return r;
}

HttpResponse Archive::serve_archive(const std::string& host, const ArchiveSettings& a, const HttpRequest& request,
                                    std::string_view target) const {
  if (target.rfind(a.timegate_prefix, 0) == 0) {
    const std::string uri_r = repair_uri_r(target.substr(a.timegate_prefix.size()));
    const auto caps = captures_of(host, uri_r);
    if (caps.empty()) return plain(404, "no captures of " + uri_r);
    const Capture* best = caps.back();
    if (const auto accept = request.headers.get("Accept-Datetime")) {
      const auto want = Timestamp::parse_http(*accept);
      if (!want) return plain(400, "unparseable Accept-Datetime");
      std::int64_t best_gap = -1;
      for (const Capture* c : caps) {
        const std::int64_t gap = std::llabs(c->datetime.epoch_seconds() - want->epoch_seconds());
        // Ties go to the earlier capture: captures are sorted, so only strictly better wins.
        if (best_gap < 0 || gap < best_gap) {
          best_gap = gap;
          best = c;
        }
      }
    }
    HttpResponse r = plain(302, "");
    r.headers.set("Location", urim(*best));
    r.headers.set("Vary", "accept-datetime");
    r.headers.set("Link", "<" + uri_r + ">; rel=\"original\", <" + timemap_uri(host, uri_r) +
                              ">; rel=\"timemap\"; type=\"application/link-format\"");
    return r;
  }
  if (target.rfind(a.timemap_prefix, 0) == 0) {
    const std::string uri_r = repair_uri_r(target.substr(a.timemap_prefix.size()));
    const auto caps = captures_of(host, uri_r);
    if (caps.empty()) return plain(404, "no captures of " + uri_r);
    std::string body = "<" + uri_r + ">; rel=\"original\",\n<" + timemap_uri(host, uri_r) +
                       ">; rel=\"self\"; type=\"application/link-format\",\n<" + timegate_uri(host, uri_r) +
                       ">; rel=\"timegate\"";
    for (std::size_t i = 0; i < caps.size(); ++i) {
      std::string rel = "memento";
      if (caps.size() == 1)
        rel = "first last memento";
      else if (i == 0)
        rel = "first memento";
      else if (i + 1 == caps.size())
        rel = "last memento";
      body += ",\n<" + urim(*caps[i]) + ">; rel=\"" + rel + "\"; datetime=\"" + caps[i]->datetime.to_http() + "\"";
    }
    body += "\n";
    return plain(200, std::move(body), "application/link-format");
  }

  const std::string full = a.scheme + "://" + host + std::string(target);
  const auto seg = find_datetime_segment(full);
  if (!seg) return plain(404, "not found");
  const std::string modifier = full.substr(seg->offset + 14, seg->modifier_length);
  const auto embedded = original_from_urim(full);
  if (!embedded) return plain(404, "not found");
  const std::string uri_r = repair_uri_r(*embedded);
  const auto caps = captures_of(host, uri_r);
  if (caps.empty()) return plain(404, "no captures of " + uri_r);
  const auto want = Timestamp::parse_14digit(seg->digits);
  const Capture* best = caps.front();
  std::int64_t best_gap = -1;
  for (const Capture* c : caps) {
    const std::int64_t gap = std::llabs(c->datetime.epoch_seconds() - want->epoch_seconds());
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best = c;
    }
  }
  if (best_gap != 0) {
    // Like Wayback: redirect to the nearest capture.
    HttpResponse r = plain(302, "");
    r.headers.set("Location", urim(*best, modifier));
    return r;
  }
  return memento_response(*best, modifier);
}

Reply Archive::handle(std::string_view host_header, const HttpRequest& request, std::string_view target) const {
  Reply reply;
  std::string host;
  const HostEntry* entry = host_entry(host_header, &host);
  const std::string bare = bare_host(host_header);
  for (const auto& f : manifest_.faults) {
    if (!f.host.empty() && f.host != bare && f.host != host) continue;
    if (target.rfind(f.path_prefix, 0) != 0) continue;
    reply.delay_ms = f.delay_ms;
    reply.reset = f.reset;
    if (f.status) {
      reply.response = plain(*f.status, "injected fault");
      return reply;
    }
    break;
  }
  if (!entry) {
    reply.response = plain(404, "unknown host");
    return reply;
  }
  if (auto it = entry->files.find(std::string(target)); it != entry->files.end()) {
    reply.response = plain(it->second.status, it->second.body, it->second.content_type);
    return reply;
  }
  if (entry->archive) {
    if (target == "/") {
      reply.response = plain(200, "<html><head><title>" + host + "</title></head><body><h1>" + host +
                                      "</h1></body></html>",
                             "text/html; charset=utf-8");
      return reply;
    }
    reply.response = serve_archive(host, *entry->archive, request, target);
    return reply;
  }
  reply.response = plain(404, "not found");
  return reply;
}

HttpResponse InProcessFetcher::fetch(const HttpRequest& request) const {
  const auto u = parse_absolute_uri(request.url);
  if (!u || (u->scheme != "http" && u->scheme != "https")) throw InvalidUri("cannot fetch '" + request.url + "'");
  const std::string authority = u->port.empty() ? u->host : u->host + ":" + u->port;
  Reply reply = archive_->handle(request.headers.get("Host").value_or(authority), request, u->target());
  if (reply.delay_ms > 0) {
    if (std::chrono::milliseconds(reply.delay_ms) >= timeout_) {
      std::this_thread::sleep_for(timeout_);
      throw FetchTimeout("timed out fetching " + request.url);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(reply.delay_ms));
  }
  if (reply.reset) throw ConnectionFailed("connection to " + authority + " reset");
  reply.response.url = request.url;
  return reply.response;
}

struct Server::Impl {
  httplib::Server server;
};

Server::Server(std::shared_ptr<const Archive> archive) : impl_(std::make_unique<Impl>()) {
  auto handler = [archive](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r;
    r.method = req.method;
    for (const auto& [k, v] : req.headers) r.headers.add(k, v);
    const std::string target = req.target.empty() ? req.path : req.target;
    Reply reply = archive->handle(req.get_header_value("Host"), r, target);
    if (reply.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(reply.delay_ms));
    res.status = reply.response.status;
    std::string type = "application/octet-stream";
    for (const auto& [k, v] : reply.response.headers.entries()) {
      if (text::iequals(k, "Content-Type"))
        type = v;
      else
        res.set_header(k, v);
    }
    if (reply.reset) {
      // Headers go out, then the connection drops before the body.
      res.set_content_provider(1024, type, [](std::size_t, std::size_t, httplib::DataSink&) { return false; });
      return;
    }
    res.set_content(reply.response.body, type);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

Server::~Server() { stop(); }

int Server::start(const std::string& address, int port) {
  port_ = port == 0 ? impl_->server.bind_to_any_port(address) : (impl_->server.bind_to_port(address, port) ? port : -1);
  if (port_ <= 0) throw ConfigError("mock archive: cannot bind " + address + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void Server::listen(const std::string& address, int port) {
  if (!impl_->server.bind_to_port(address, port))
    throw ConfigError("mock archive: cannot bind " + address + ":" + std::to_string(port));
  port_ = port;
  impl_->server.listen_after_bind();
}

void Server::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::map<std::string, std::string> host_overrides(const Manifest& manifest, int port) {
  std::map<std::string, std::string> out;
  for (const auto& [host, entry] : manifest.hosts) out[host] = "http://127.0.0.1:" + std::to_string(port);
  return out;
}

}  // namespace mkit::mock
