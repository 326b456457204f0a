#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unistd.h>

#include "fixtures.h"
#include "mkit/errors.h"
#include "mkit/image.h"
#include "mkit/service.h"
#include "mkit/story.h"

using namespace mkit;
using namespace mkit::story;

namespace {

const service::Service& svc() {
  static const service::Service s([] {
    service::ServiceConfig c;
    c.fetcher = fixture_fetcher();
    c.analysis = fixture_config();
    c.renderer = std::make_shared<StubRenderer>();
    c.service_base = "http://svc.test";
    return c;
  }());
  return s;
}

class CountingClient final : public ApiClient {
 public:
  ApiResult call(const std::string& service, const std::string& endpoint, const std::string& urim,
                 const std::string& prefer) const override {
    ++count;
    std::lock_guard lock(mu);
    endpoints.insert(service + "/" + endpoint);
    return inner.call(service, endpoint, urim, prefer);
  }
  InProcessApiClient inner{svc()};
  mutable std::atomic<int> count{0};
  mutable std::mutex mu;
  mutable std::set<std::string> endpoints;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Story occupy_text() {
  Story s = parse_story(read_file(std::string(MKIT_DATA_DIR) + "/stories/occupy.txt"));
  s.title = "Occupy";
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mkit-story-" + std::to_string(::getpid()) + "-" + name);
}

PostPlan plan_with(std::size_t elements, std::size_t media = 1) {
  PostPlan p;
  p.title.text = "Story";
  for (std::size_t i = 0; i < elements; ++i) {
    Post e;
    e.text = "element " + std::to_string(i + 1);
    for (std::size_t m = 0; m < media; ++m) e.media.push_back({"http://img.test/" + std::to_string(m), "", ""});
    p.elements.push_back(e);
  }
  return p;
}

Credentials twitter_credentials(const std::filesystem::path& transcript) {
  return {{"consumer_key", "k"},
          {"consumer_secret", "s"},
          {"access_token", "t"},
          {"access_token_secret", "ts"},
          {"transcript", transcript.string()}};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("story") {
  TEST_CASE("text story file") {
    const auto s = parse_story(read_file(std::string(MKIT_DATA_DIR) + "/stories/occupy.txt"));
    REQUIRE(s.elements.size() == 2);
    CHECK(s.elements[0].kind == StoryElement::Kind::Link);
    CHECK(s.elements[0].value == kNationUrim);
    CHECK(s.elements[1].value == kArrestsUrim);
    CHECK(s.title.empty());
  }

  TEST_CASE("json story file") {
    const auto s = parse_story(read_file(std::string(MKIT_DATA_DIR) + "/stories/occupy.json"));
    CHECK(s.title == "My Story Title");
    CHECK(s.generated_by == "My Curator");
    CHECK(s.collection_url == "https://archive.example.com/mycollection");
    REQUIRE(s.metadata);
    CHECK(s.metadata->size() == 3);
    CHECK(s.metadata->at("my key 3") == "value 3");
    REQUIRE(s.elements.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(s.elements[i].kind == (i % 2 ? StoryElement::Kind::Link : StoryElement::Kind::Text));
  }

  TEST_CASE("story file errors") {
    CHECK_THROWS_WITH_AS(parse_story(""), "no story elements", StoryError);
    CHECK_THROWS_WITH_AS(parse_story("\n  \n"), "no story elements", StoryError);
    CHECK_THROWS_WITH_AS(parse_story("http://a.test/\n\nnot a uri\n"), doctest::Contains("line 3"), StoryError);
    CHECK_THROWS_WITH_AS(parse_story(R"({"elements": [{"type": "video", "value": "x"}]})"),
                         doctest::Contains("'video'"), StoryError);
    CHECK_THROWS_WITH_AS(parse_story(R"({"elements": []})"), "no story elements", StoryError);
  }

  TEST_CASE("template parsing") {
    const auto t = parse_template("{{ title }}");
    REQUIRE(t.kind == Template::Kind::Single);
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.nodes[0].kind == Node::Kind::Variable);
    RenderScope scope;
    scope.globals = {{"title", "A <b>Title</b> & more"}};
    CHECK(render_nodes(t.nodes, scope) == "A <b>Title</b> & more");

    const auto grid = parse_template(*preset_template("thumbnails4col"));
    bool found = false;
    for (const auto& v : template_variables(grid))
      if (v.dotted() == "element.surrogate.thumbnail") {
        found = true;
        CHECK(v.prefer_string() == "remove_banner=yes");
      }
    CHECK(found);

    const auto tw = parse_template(*preset_template("mock-twitter"));
    REQUIRE(tw.kind == Template::Kind::Multipart);
    std::vector<std::string> media;
    std::vector<VarRef> vars;
    for (const auto& n : tw.element_media)
      if (n.kind == Node::Kind::Variable) media.push_back(n.var.dotted() + "|" + n.var.prefer_string());
    CHECK(media == std::vector<std::string>{"element.surrogate.thumbnail|thumbnail_width=1024,remove_banner=yes",
                                            "element.surrogate.image|rank=1", "element.surrogate.image|rank=2",
                                            "element.surrogate.image|rank=3"});

    for (const auto& name : preset_names()) CHECK_NOTHROW(parse_template(*preset_template(name)));
  }

  TEST_CASE("template errors carry the line") {
    CHECK_THROWS_WITH_AS(parse_template("ok\n{{ element.surrogate.bogus }}"), doctest::Contains("line 2"),
                         TemplateError);
    CHECK_THROWS_AS(parse_template("{% for element in elements %}{{ element.surrogate.bogus }}{% endfor %}"),
                    TemplateError);
    CHECK_THROWS_WITH_AS(parse_template("{% if title %}\nx"), doctest::Contains("endif"), TemplateError);
    CHECK_THROWS_AS(parse_template("{% for element in elements %}x"), TemplateError);
    CHECK_THROWS_AS(parse_template("{% endif %}"), TemplateError);
    CHECK_THROWS_AS(parse_template("{{ element.surrogate.title }}"), TemplateError);
    CHECK_THROWS_AS(parse_template("{{ title|prefer a=b }}"), TemplateError);
    CHECK_THROWS_AS(parse_template("{{ title|upper }}"), TemplateError);
    CHECK_THROWS_AS(parse_template("{{ title"), TemplateError);
    CHECK_THROWS_AS(parse_template("{# RAINTALE MULTIPART TEMPLATE #}{# RAINTALE TITLE PART #}x"), TemplateError);
  }

  TEST_CASE("conditionals, loops and trimming") {
    const auto t = parse_template(
        "{%- for element in elements -%}[{{ loop.index }}{% if loop.first %}F{% endif %}"
        "{% if element.type != 'link' %}:{{ element.text }}{% elif loop.last %}L{% else %}-{% endif %}"
        "{% if not loop.index is divisibleby 2 %}o{% endif %}]{%- endfor %}"
        "{% if generated_by is none %}anon{% endif %}{{ metadata['my key'] }}");
    RenderScope scope;
    scope.globals = {{"title", "T"}, {"generated_by", nullptr}, {"metadata", {{"my key", "mv"}}}};
    scope.element_count = 3;
    scope.element = [](std::size_t i) {
      return nlohmann::json{{"type", i == 1 ? "text" : "link"}, {"text", i == 1 ? "hello" : ""}};
    };
    CHECK(render_nodes(t.nodes, scope) == "[1F-o][2:hello][3Lo]anonmv");
  }

  TEST_CASE("vocabulary resolves against fixtures") {
    std::string tmpl = "{% for element in elements %}";
    for (const auto& name : surrogate_variables()) tmpl += name + "=[{{ element.surrogate." + name + " }}]\n";
    tmpl += "thumb=[{{ element.thumbnail }}]\n{% endfor %}";
    const auto t = parse_template(tmpl);
    CHECK(template_variables(t).size() == surrogate_variables().size() + 1);

    Story s;
    s.title = "vocab";
    s.elements = {{StoryElement::Kind::Link, kBlastUrim}, {StoryElement::Kind::Link, kNationUrim}};
    InProcessApiClient client(svc());
    const auto r = render_story(s, t, client, {ErrorPolicy::Abort});
    REQUIRE(r.document);
    const std::string& doc = *r.document;
    CHECK(r.skipped.empty());
    CHECK(doc.find("title=[Blast Theory]") != std::string::npos);
    CHECK(doc.find("memento_datetime_14num=[20090522221251]") != std::string::npos);
    CHECK(doc.find("archive_name=[WEBARCHIVE.ORG.UK]") != std::string::npos);
    CHECK(doc.find("archive_collection_id=[2950]") != std::string::npos);
    CHECK(doc.find("archive_collection_name=[Occupy Movement 2011/2012]") != std::string::npos);
    CHECK(doc.find("urim=[" + kNationUrim + "]") != std::string::npos);
    CHECK(doc.find("imagereel=[data:image/gif;base64,") != std::string::npos);
    CHECK(doc.find("thumbnail=[data:image/png;base64,") != std::string::npos);
    CHECK(doc.find("thumb=[data:image/png;base64,") != std::string::npos);
    CHECK(std::regex_search(doc, std::regex(R"(memento_count=\[\d+\])")));
    CHECK(std::regex_search(doc, std::regex(R"(sentence=\[[^\]]+\])")));
    CHECK(std::regex_search(doc, std::regex(R"(original_linkstatus=\[\w+\])")));
  }

  TEST_CASE("ranked images and sentences by preference") {
    InProcessApiClient client(svc());
    Resolver resolver(client);
    auto var = [](const std::string& text) {
      const auto t = parse_template("{% for element in elements %}" + text + "{% endfor %}");
      return t.nodes[0].body[0].var;
    };
    const auto second = resolver.resolve(kBlastUrim, var("{{ element.surrogate.image|prefer rank=2 }}"));
    CHECK(second.get<std::string>().find("/yougetme/ygm_icon.jpg") != std::string::npos);
    const auto first = resolver.resolve(kBlastUrim, var("{{ element.surrogate.image|prefer rank=1 }}"));
    CHECK(first.get<std::string>().find("/dotf/Untitled-1.jpg") != std::string::npos);
    CHECK(resolver.resolve(kBlastUrim, var("{{ element.surrogate.image|prefer rank=99 }}")).is_null());
    CHECK(resolver.calls() == 1);
    const auto s1 = resolver.resolve(kBlastUrim, var("{{ element.surrogate.sentence|prefer rank=1 }}"));
    const auto s2 = resolver.resolve(kBlastUrim, var("{{ element.surrogate.sentence|prefer rank=2 }}"));
    CHECK(s1.is_string());
    CHECK(s1 != s2);
    CHECK(resolver.calls() == 2);
    CHECK(resolver.resolve(kNationUrim, var("{{ element.surrogate.metadata.Title }}")).is_array());
  }

  TEST_CASE("thumbnails4col over the text story") {
    InProcessApiClient client(svc());
    const auto r = render_story(occupy_text(), parse_template(*preset_template("thumbnails4col")), client);
    REQUIRE(r.document);
    const std::string& doc = *r.document;
    CHECK(doc.find("<table border=\"0\">") != std::string::npos);
    CHECK(doc.find("</table>") != std::string::npos);
    const std::regex cell(R"re(<td><a href="([^"]+)"><img src="data:image/png;base64,[A-Za-z0-9+/=]+"></a></td>)re");
    std::vector<std::string> hrefs;
    for (auto it = std::sregex_iterator(doc.begin(), doc.end(), cell); it != std::sregex_iterator(); ++it)
      hrefs.push_back((*it)[1]);
    CHECK(hrefs == std::vector<std::string>{kNationUrim, kArrestsUrim});
    CHECK(doc.find("Story By") == std::string::npos);
  }

  TEST_CASE("twitter plan") {
    InProcessApiClient client(svc());
    const auto r = render_story(occupy_text(), parse_template(*preset_template("mock-twitter")), client);
    REQUIRE(r.plan);
    const auto& plan = *r.plan;
    CHECK(plan.title.text == "Occupy");
    REQUIRE(plan.elements.size() == 2);
    for (const auto& p : plan.elements) {
      CHECK(count_code_points(p.text) <= 280);
      CHECK(p.media.size() <= 4);
      REQUIRE(!p.media.empty());
      CHECK(p.media[0].attachment());
      CHECK(p.media[0].content_type == "image/png");
      CHECK(p.media[0].bytes.substr(1, 3) == "PNG");
    }
    CHECK(plan.elements[0].text.find(kNationUrim) != std::string::npos);
    CHECK(plan.elements[0].media.size() == 4);
    CHECK(plan.elements[1].media.size() == 3);
    CHECK_NOTHROW(validate_plan(plan, {280, 4}));
  }

  TEST_CASE("json story fields and text elements") {
    InProcessApiClient client(svc());
    const auto s = parse_story(read_file(std::string(MKIT_DATA_DIR) + "/stories/occupy.json"));
    const auto doc = *render_story(s, parse_template(*preset_template("html")), client).document;
    CHECK(doc.find("<strong>Story By:</strong> My Curator") != std::string::npos);
    CHECK(doc.find("Hundreds of arrests across") != std::string::npos);
    CHECK(doc.find("<a href=\"" + kArrestsUrim + "\">") != std::string::npos);
    CHECK(doc.find("ARCHIVE-IT.ORG") != std::string::npos);

    Story anon = s;
    anon.generated_by.reset();
    const auto doc2 = *render_story(anon, parse_template(*preset_template("html")), client).document;
    CHECK(doc2.find("Story By") == std::string::npos);
  }

  TEST_CASE("endpoint economy") {
    for (const auto& name : preset_names()) {
      CAPTURE(name);
      CountingClient client;
      const auto story = occupy_text();
      render_story(story, parse_template(*preset_template(name)), client);
      CHECK(client.count <= static_cast<int>(client.endpoints.size() * story.elements.size()));
    }
    CountingClient client;
    const std::string dup = "{% for element in elements %}{{ element.surrogate.title }}{{ element.surrogate.snippet }}"
                            "{{ element.surrogate.memento_datetime }}{{ element.surrogate.memento_datetime_14num }}"
                            "{{ element.surrogate.image|prefer rank=1 }}{{ element.surrogate.image|prefer rank=2 }}"
                            "{{ element.surrogate.best_image_uri }}{% endfor %}";
    render_story(occupy_text(), parse_template(dup), client);
    CHECK(client.count == 6);  // contentdata, imagedata and bestimage for two elements
  }

  TEST_CASE("deterministic rendering") {
    InProcessApiClient client(svc());
    for (const auto& name : {"html", "markdown", "mediawiki", "thumbnails3col"}) {
      const auto t = parse_template(*preset_template(name));
      CHECK(render_story(occupy_text(), t, client).document == render_story(occupy_text(), t, client).document);
    }
  }

  TEST_CASE("error policy") {
    Story s = occupy_text();
    s.elements.insert(s.elements.begin() + 1, {StoryElement::Kind::Link, "http://live.example/"});
    InProcessApiClient client(svc());
    const auto t = parse_template(*preset_template("thumbnails4col"));
    std::ostringstream warnings;
    const auto r = render_story(s, t, client, {ErrorPolicy::Skip, &warnings});
    CHECK(r.skipped == std::vector<std::string>{"http://live.example/"});
    CHECK(warnings.str().find("element 2") != std::string::npos);
    CHECK(r.document->find("live.example") == std::string::npos);
    CHECK(r.document->find(kArrestsUrim) != std::string::npos);
    CHECK_THROWS_AS(render_story(s, t, client, {ErrorPolicy::Abort}), StoryError);
  }

  TEST_CASE("publisher limits are checked before posting") {
    const auto transcript = temp_path("limits.jsonl");
    MockPublisher pub(MockPublisher::Network::Twitter, twitter_credentials(transcript), "unused");
    auto plan = plan_with(2);
    plan.elements[1].media.resize(5);
    CHECK_THROWS_WITH_AS(publish(plan, pub), doctest::Contains("element post 2"), LimitExceeded);
    CHECK(read_file(transcript).empty());
    auto wordy = plan_with(1);
    wordy.elements[0].text = std::string(281, 'x');
    CHECK_THROWS_WITH_AS(publish(wordy, pub), doctest::Contains("281 characters"), LimitExceeded);
    wordy.elements[0].text.clear();
    for (int i = 0; i < 280; ++i) wordy.elements[0].text += "\xC3\xA9";
    CHECK(publish(wordy, pub).complete);
    std::filesystem::remove(transcript);
  }

  TEST_CASE("threaded receipts and transcript") {
    const auto transcript = temp_path("thread.jsonl");
    MockPublisher pub(MockPublisher::Network::Twitter, twitter_credentials(transcript), "unused");
    auto plan = plan_with(3);
    plan.elements[0].media = {{"", "image/png", std::string("\x89PNG", 4)}};
    const auto r = publish(plan, pub);
    CHECK(r.complete);
    REQUIRE(r.receipts.size() == 4);
    CHECK(!r.receipts[0].parent_id);
    for (std::size_t i = 1; i < 4; ++i) CHECK(r.receipts[i].parent_id == r.receipts[i - 1].id);
    const auto lines = lines_of(read_file(transcript));
    REQUIRE(lines.size() == 4);
    const auto second = nlohmann::json::parse(lines[1]);
    CHECK(second["parent"] == r.receipts[0].id);
    CHECK(second["media"][0]["bytes"] == 4);
    CHECK(second["media"][0]["sha256"].get<std::string>().size() == 64);

    MockPublisher again(MockPublisher::Network::Twitter, twitter_credentials(transcript), "unused");
    const auto single = publish(plan_with(0), again);
    CHECK(single.receipts.size() == 1);
    CHECK(lines_of(read_file(transcript)).size() == 1);
    std::filesystem::remove(transcript);
  }

  TEST_CASE("partial posting and credentials") {
    const auto transcript = temp_path("partial.jsonl");
    auto creds = twitter_credentials(transcript);
    creds["fail_after"] = "2";
    MockPublisher pub(MockPublisher::Network::Twitter, creds, "unused");
    const auto r = publish(plan_with(3), pub);
    CHECK(!r.complete);
    CHECK(r.receipts.size() == 2);
    CHECK(r.error.find("outage") != std::string::npos);
    CHECK(lines_of(read_file(transcript)).size() == 2);

    auto missing = twitter_credentials(transcript);
    missing.erase("access_token_secret");
    CHECK_THROWS_WITH_AS(MockPublisher(MockPublisher::Network::Twitter, missing, "unused"),
                         doctest::Contains("access_token_secret"), AuthFailed);
    CHECK_THROWS_AS(MockPublisher(MockPublisher::Network::Facebook, creds, "unused"), AuthFailed);

    const auto yml = temp_path("creds.yml");
    std::ofstream(yml) << "page_id: '1234'\naccess_token: abc\ntranscript: " << transcript.string() << "\n";
    const auto loaded = load_credentials(yml);
    CHECK(loaded.at("page_id") == "1234");
    MockPublisher fb(MockPublisher::Network::Facebook, loaded, "unused");
    CHECK(fb.limits().max_media == 10);
    auto big = plan_with(1, 5);
    CHECK(publish(big, fb).complete);
    std::filesystem::remove(yml);
    std::filesystem::remove(transcript);
  }
}
