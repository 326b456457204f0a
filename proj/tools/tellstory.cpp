// Renders a story file through a template, to a file or a mock social network.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mkit/errors.h"
#include "mkit/story.h"

namespace {

using namespace mkit::story;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mkit::ConfigError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_service_storyteller(const std::string& name) { return name == "mock-twitter" || name == "mock-facebook"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tell a story from a list of mementos"};
  std::string input;
  std::string storyteller;
  std::string story_template;
  std::string output;
  std::string title;
  std::string credentials;
  std::string api = "http://localhost:5550";
  std::string policy = "skip";
  int api_timeout = 300;

  std::vector<std::string> names = preset_names();
  names.push_back("template");
  app.add_option("-i,--input", input, "Story file: one URI-M per line, or JSON")->required();
  app.add_option("--storyteller", storyteller, "Output kind")->required()->check(CLI::IsMember(names));
  app.add_option("--story-template", story_template, "Template file for --storyteller template");
  app.add_option("-o,--output", output, "Output file for file storytellers; - for stdout");
  app.add_option("--title", title, "Story title (required for text story files)");
  app.add_option("-c,--credentials", credentials, "YAML credentials for service storytellers");
  app.add_option("--mementoembed_api", api, "Base URI of the surrogate service");
  app.add_option("--error-policy", policy, "What to do when an element fails")->check(CLI::IsMember({"skip", "abort"}));
  app.add_option("--api-timeout", api_timeout, "Seconds per API request")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const bool service = is_service_storyteller(storyteller);
  auto usage = [&](const std::string& msg) {
    std::cerr << "tellstory: " << msg << "\n" << "Run with --help for more information.\n";
    return 2;
  };
  if (storyteller == "template" && story_template.empty()) return usage("--storyteller template requires --story-template");
  if (service && credentials.empty()) return usage("--storyteller " + storyteller + " requires -c <credentials file>");
  if (!service && output.empty()) return usage("--storyteller " + storyteller + " requires -o <output file>");

  try {
    Story story = parse_story(read_file(input));
    if (!title.empty()) story.title = title;
    if (story.title.empty()) return usage("the story has no title; pass --title");

    const std::string text = storyteller == "template" ? read_file(story_template)
                                                        : std::string(*preset_template(storyteller));
    const Template tmpl = parse_template(text);
    if (service != (tmpl.kind == Template::Kind::Multipart))
      throw mkit::TemplateError(service ? "service storytellers need a multipart template"
                                        : "multipart templates need a service storyteller");

    mkit::FetcherOptions fo;
    fo.timeout = std::chrono::seconds(api_timeout);
    HttpApiClient client(api, std::make_shared<mkit::HttplibFetcher>(fo));
    RenderOptions ro;
    ro.policy = policy == "abort" ? ErrorPolicy::Abort : ErrorPolicy::Skip;
    ro.warnings = &std::cerr;
    const RenderedStory rendered = render_story(story, tmpl, client, ro);

    if (rendered.document) {
      if (output == "-") {
        std::cout << *rendered.document;
        std::cout.flush();
      } else {
        std::ofstream out(output, std::ios::binary);
        out << *rendered.document;
        if (!out) throw mkit::ConfigError("cannot write " + output);
      }
      return 0;
    }

    const auto network =
        storyteller == "mock-twitter" ? MockPublisher::Network::Twitter : MockPublisher::Network::Facebook;
    const std::string default_transcript = output.empty() || output == "-" ? storyteller + "-transcript.jsonl" : output;
    MockPublisher publisher(network, load_credentials(credentials), default_transcript);
    const PublishResult result = publish(*rendered.plan, publisher);
    for (const auto& r : result.receipts)
      std::cout << (r.index == 0 ? "title" : "element " + std::to_string(r.index)) << " posted as " << r.id
                << (r.parent_id ? " in reply to " + *r.parent_id : "") << "\n";
    std::cout << "transcript: " << publisher.transcript().string() << "\n";
    if (!result.complete) {
      std::cerr << "tellstory: story partially posted (" << result.receipts.size() << " of "
                << rendered.plan->elements.size() + 1 << " posts): " << result.error << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "tellstory: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
