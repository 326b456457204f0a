#pragma once

#include <cstddef>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mkit/http.h"
#include "mkit/template.h"

namespace mkit::service {
class Service;
}

namespace mkit::story {

struct StoryElement {
  enum class Kind { Link, Text };
  Kind kind = Kind::Link;
  std::string value;  // URI-M for links
};

struct Story {
  std::string title;
  std::optional<std::string> collection_url;
  std::optional<std::string> generated_by;
  std::optional<std::map<std::string, std::string>> metadata;
  std::vector<StoryElement> elements;
};

// JSON object with "elements", else one URI-M per non-blank line.
// Throws StoryError.
Story parse_story(std::string_view bytes);

struct Binding {
  std::string variable;  // name after element.surrogate. ("thumbnail" also covers element.thumbnail)
  std::string service;   // "memento", "product" or "" for input-derived values
  std::string endpoint;
  std::string field;     // JSON field of the endpoint response
  bool forwards_prefer = false;
};

const std::vector<Binding>& binding_table();
const Binding& binding_for(const VarRef& var);

struct ApiResult {
  int status = 0;
  std::string content_type;
  std::string body;
};

class ApiClient {
 public:
  virtual ~ApiClient() = default;
  // service is "memento" or "product"; prefer is "a=b,c=d" or empty.
  virtual ApiResult call(const std::string& service, const std::string& endpoint, const std::string& urim,
                         const std::string& prefer) const = 0;
};

class HttpApiClient final : public ApiClient {
 public:
  HttpApiClient(std::string base_uri, std::shared_ptr<const Fetcher> fetcher);
  ApiResult call(const std::string& service, const std::string& endpoint, const std::string& urim,
                 const std::string& prefer) const override;

 private:
  std::string base_;
  std::shared_ptr<const Fetcher> fetcher_;
};

class InProcessApiClient final : public ApiClient {
 public:
  explicit InProcessApiClient(const service::Service& service) : service_(service) {}
  ApiResult call(const std::string& service, const std::string& endpoint, const std::string& urim,
                 const std::string& prefer) const override;

 private:
  const service::Service& service_;
};

enum class ErrorPolicy { Skip, Abort };

struct MediaItem {
  std::string uri;           // set for remote media
  std::string content_type;  // set for attachments
  std::string bytes;         // attachment payload decoded from a data URI
  bool attachment() const { return uri.empty(); }
};

struct Post {
  std::string text;
  std::vector<MediaItem> media;
};

struct PostPlan {
  Post title;
  std::vector<Post> elements;  // one per rendered link element, in story order
};

struct RenderOptions {
  ErrorPolicy policy = ErrorPolicy::Skip;
  std::ostream* warnings = nullptr;  // skipped elements are reported here
  std::size_t max_parallel = 8;
};

struct RenderedStory {
  std::optional<std::string> document;  // single templates
  std::optional<PostPlan> plan;         // multipart templates
  std::vector<std::string> skipped;     // URI-Ms dropped by the skip policy
};

// Resolves one element-scoped variable for a link element. Memoizes calls by
// (URI-M, endpoint, forwarded preferences).
class Resolver {
 public:
  explicit Resolver(const ApiClient& client);
  ~Resolver();
  nlohmann::json resolve(const std::string& urim, const VarRef& var);
  std::size_t calls() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RenderedStory render_story(const Story& story, const Template& tmpl, const ApiClient& client,
                           const RenderOptions& options = {});

// Bundled templates by storyteller name.
std::vector<std::string> preset_names();
std::optional<std::string_view> preset_template(std::string_view name);

struct PublisherLimits {
  std::size_t max_chars = 280;
  std::size_t max_media = 4;
};

struct Receipt {
  std::size_t index = 0;  // 0 is the title post
  std::string id;
  std::optional<std::string> parent_id;
};

class Publisher {
 public:
  virtual ~Publisher() = default;
  virtual PublisherLimits limits() const = 0;
  virtual Receipt post(std::size_t index, const Post& post, const std::optional<std::string>& parent) = 0;
};

// Throws LimitExceeded naming the first offending post.
void validate_plan(const PostPlan& plan, const PublisherLimits& limits);

struct PublishResult {
  std::vector<Receipt> receipts;
  bool complete = false;
  std::string error;  // set when posting stopped early
};

// Validates everything first, then posts the title and each element as a
// reply to the previous post.
PublishResult publish(const PostPlan& plan, Publisher& publisher);

using Credentials = std::map<std::string, std::string>;
Credentials load_credentials(const std::filesystem::path& path);

// Writes one JSON line per accepted post. Recognized credential keys:
// transcript (output path) and fail_after (simulated outage after N posts).
class MockPublisher final : public Publisher {
 public:
  enum class Network { Twitter, Facebook };
  MockPublisher(Network network, const Credentials& credentials, std::filesystem::path default_transcript);
  PublisherLimits limits() const override;
  Receipt post(std::size_t index, const Post& post, const std::optional<std::string>& parent) override;
  const std::filesystem::path& transcript() const { return transcript_; }

 private:
  Network network_;
  std::filesystem::path transcript_;
  std::optional<std::size_t> fail_after_;
  std::size_t posted_ = 0;
};

std::size_t count_code_points(std::string_view utf8);

}  // namespace mkit::story
