#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mkit/analysis.h"
#include "mkit/content.h"
#include "mkit/errors.h"
#include "mkit/image_selection.h"
#include "mkit/mock_archive.h"
#include "mkit/products.h"
#include "mkit/service.h"

namespace py = pybind11;

namespace {

// A service answering from a fixture manifest, no sockets involved.
class MockService {
 public:
  MockService(const std::string& manifest, const std::string& service_base, double fetch_timeout) {
    auto archive = std::make_shared<const mkit::mock::Archive>(mkit::mock::Manifest::load(manifest));
    const auto timeout = std::chrono::milliseconds(static_cast<long>(fetch_timeout * 1000));
    mkit::service::ServiceConfig c;
    c.fetcher = std::make_shared<mkit::mock::InProcessFetcher>(archive, timeout);
    auto analysis = std::make_shared<mkit::AnalysisConfig>();
    analysis->default_image_uri = service_base + mkit::kDefaultImagePath;
    c.analysis = analysis;
    c.renderer = std::make_shared<mkit::StubRenderer>();
    c.service_base = service_base;
    service_ = std::make_unique<mkit::service::Service>(std::move(c));
  }

  mkit::service::Response handle(const std::string& method, const std::string& target,
                                 const std::map<std::string, std::string>& headers) const {
    mkit::HttpHeaders h;
    for (const auto& [k, v] : headers) h.add(k, v);
    py::gil_scoped_release release;
    return service_->handle(method, target, h);
  }

 private:
  std::unique_ptr<mkit::service::Service> service_;
};

mkit::StopwordList stopwords_from(const std::optional<std::vector<std::string>>& words) {
  if (!words) return mkit::default_stopwords();
  return mkit::StopwordList(words->begin(), words->end());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<mkit::Error>(m, "Error");

  py::class_<mkit::ScoringWeights>(m, "ScoringWeights")
      .def(py::init<>())
      .def(py::init([](double k1, double k2, double k3, double k4, double k5) {
             return mkit::ScoringWeights{k1, k2, k3, k4, k5};
           }),
           py::arg("k1"), py::arg("k2"), py::arg("k3"), py::arg("k4"), py::arg("k5"))
      .def_readwrite("k1", &mkit::ScoringWeights::k1)
      .def_readwrite("k2", &mkit::ScoringWeights::k2)
      .def_readwrite("k3", &mkit::ScoringWeights::k3)
      .def_readwrite("k4", &mkit::ScoringWeights::k4)
      .def_readwrite("k5", &mkit::ScoringWeights::k5);

  py::class_<mkit::ImageFeatures>(m, "ImageFeatures")
      .def(py::init<>())
      .def_readwrite("N", &mkit::ImageFeatures::N)
      .def_readwrite("n", &mkit::ImageFeatures::n)
      .def_readwrite("width", &mkit::ImageFeatures::width)
      .def_readwrite("height", &mkit::ImageFeatures::height)
      .def_readwrite("s", &mkit::ImageFeatures::s)
      .def_readwrite("h", &mkit::ImageFeatures::h)
      .def_readwrite("r", &mkit::ImageFeatures::r)
      .def_readwrite("c", &mkit::ImageFeatures::c)
      .def_readonly("byte_size", &mkit::ImageFeatures::byte_size)
      .def_readonly("content_type", &mkit::ImageFeatures::content_type)
      .def_readonly("hashes", &mkit::ImageFeatures::hashes);

  m.def(
      "compute_image_features",
      [](py::bytes data, std::size_t n, std::size_t N) {
        const std::string bytes = data;
        return mkit::compute_image_features(bytes, n, N);
      },
      py::arg("data"), py::arg("n") = 1, py::arg("N") = 1);
  m.def("score_image", &mkit::score_image, py::arg("features"), py::arg("weights") = mkit::ScoringWeights{});

  m.def("extract_title", [](const std::string& html) { return mkit::extract_title(html); });
  m.def("extract_description", [](const std::string& html) { return mkit::extract_description(html); });
  m.def("remove_boilerplate", [](const std::string& html) { return mkit::remove_boilerplate(html); });
  m.def("tokenize_words", [](const std::string& text) { return mkit::tokenize_words(text); });
  m.def(
      "word_frequencies",
      [](const std::string& html, const std::optional<std::vector<std::string>>& stopwords) {
        return mkit::word_frequencies(html, stopwords_from(stopwords));
      },
      py::arg("html"), py::arg("stopwords") = py::none());

  py::class_<mkit::ScoredSentence>(m, "ScoredSentence")
      .def_readonly("text", &mkit::ScoredSentence::text)
      .def_readonly("paragraph_index", &mkit::ScoredSentence::paragraph_index)
      .def_readonly("score", &mkit::ScoredSentence::score)
      .def_readonly("rank", &mkit::ScoredSentence::rank);
  m.def(
      "rank_sentences",
      [](const std::string& html, const std::string& algorithm) {
        return mkit::rank_sentences(html, algorithm).sentences;
      },
      py::arg("html"), py::arg("algorithm") = "readability/lede3");

  py::class_<mkit::service::Response>(m, "Response")
      .def_readonly("status", &mkit::service::Response::status)
      .def_readonly("content_type", &mkit::service::Response::content_type)
      .def_property_readonly("headers",
                             [](const mkit::service::Response& r) { return r.headers.entries(); })
      .def_property_readonly("body", [](const mkit::service::Response& r) { return py::bytes(r.body); })
      .def("header", [](const mkit::service::Response& r, const std::string& name) { return r.headers.get(name); });

  py::class_<MockService>(m, "MockService")
      .def(py::init<const std::string&, const std::string&, double>(), py::arg("manifest"),
           py::arg("service_base") = "http://localhost:5550", py::arg("fetch_timeout") = 30.0)
      .def("handle", &MockService::handle, py::arg("method"), py::arg("target"),
           py::arg("headers") = std::map<std::string, std::string>{})
      .def(
          "get",
          [](const MockService& s, const std::string& target, const std::map<std::string, std::string>& headers) {
            return s.handle("GET", target, headers);
          },
          py::arg("target"), py::arg("headers") = std::map<std::string, std::string>{});
}
