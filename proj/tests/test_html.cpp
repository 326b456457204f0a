#include <doctest.h>

#include "mkit/html.h"

using namespace mkit;

TEST_SUITE("html") {
  TEST_CASE("lenient parse recovers from unclosed tags") {
    auto doc = html::Document::parse(
        "<html><head><title>T &amp; U</title></head><body><p>one<p>two<ul><li>a<li>b</ul>"
        "<img src=x.png><br><div>tail");
    CHECK(doc.first_by_tag("title")->text_content() == "T & U");
    CHECK(doc.elements_by_tag("p").size() == 2);
    CHECK(doc.elements_by_tag("li").size() == 2);
    CHECK(doc.elements_by_tag("li")[1]->text_content() == "b");
    CHECK(*doc.first_by_tag("img")->attr("src") == "x.png");
    CHECK(doc.first_by_tag("div")->text_content() == "tail");
  }

  TEST_CASE("script bodies stay raw") {
    auto doc = html::Document::parse("<script>if (a < b) { x = '</p>'; }</script><p>after</p>");
    CHECK(doc.first_by_tag("script")->children.at(0)->text == "if (a < b) { x = '</p>'; }");
    CHECK(doc.first_by_tag("p")->text_content() == "after");
  }

  TEST_CASE("entities") {
    CHECK(html::decode_entities("&lt;&gt;&amp;&quot;&#39;&#x41;&eacute;&nbsp;") ==
          "<>&\"'A\xC3\xA9\xC2\xA0");
    CHECK(html::decode_entities("&#150;") == "\xE2\x80\x93");
    CHECK(html::decode_entities("&bogus; & alone") == "&bogus; & alone");
    CHECK(html::escape("<a href=\"x\">&</a>") == "&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;");
  }

  TEST_CASE("attributes: unquoted, single quoted, uppercase names") {
    auto doc = html::Document::parse("<A HREF='/x' data-y=z Class=\"c d\">t</A>");
    const auto* a = doc.first_by_tag("a");
    REQUIRE(a);
    CHECK(*a->attr("href") == "/x");
    CHECK(*a->attr("data-y") == "z");
    CHECK(*a->attr("class") == "c d");
  }

  TEST_CASE("serialize can drop subtrees") {
    auto doc = html::Document::parse("<div><p id=keep>a</p><p id=drop>b</p></div>");
    const auto out = html::serialize(doc.root(), [](const html::Node& n) {
      const auto* id = n.attr("id");
      return id && *id == "drop";
    });
    CHECK(out.find("keep") != std::string::npos);
    CHECK(out.find("drop") == std::string::npos);
  }
}
