#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "mkit/http.h"

// In-memory web: exact URL -> canned response, 404 otherwise.
class FakeWeb final : public mkit::Fetcher {
 public:
  void page(const std::string& url, std::string body, std::string type = "text/html",
            int status = 200) {
    mkit::HttpResponse r;
    r.status = status;
    r.body = std::move(body);
    r.headers.add("Content-Type", std::move(type));
    routes_[url] = std::move(r);
  }
  void memento(const std::string& url, std::string body, std::string type,
               const std::string& datetime = "Fri, 11 Feb 2011 07:22:57 GMT") {
    page(url, std::move(body), std::move(type));
    routes_[url].headers.add("Memento-Datetime", datetime);
  }
  void redirect(const std::string& url, const std::string& to, int status = 302) {
    mkit::HttpResponse r;
    r.status = status;
    r.headers.add("Location", to);
    routes_[url] = std::move(r);
  }
  mkit::HttpResponse& at(const std::string& url) { return routes_.at(url); }

  mkit::HttpResponse fetch(const mkit::HttpRequest& req) const override {
    ++calls;
    {
      std::lock_guard lock(mu_);
      log.push_back(req.url);
    }
    auto it = routes_.find(req.url);
    mkit::HttpResponse r;
    if (it == routes_.end()) {
      r.status = 404;
      r.headers.add("Content-Type", "text/html");
      r.body = "not found";
    } else {
      r = it->second;
    }
    r.url = req.url;
    return r;
  }

  mutable std::atomic<int> calls{0};
  mutable std::vector<std::string> log;

 private:
  std::map<std::string, mkit::HttpResponse> routes_;
  mutable std::mutex mu_;
};
