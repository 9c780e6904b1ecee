#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "plandial/http_port.hpp"
#include "test_support.hpp"

using namespace plandial;
using testing_support::error_code;

namespace {

struct LocalServer {
  httplib::Server srv;
  int port = 0;
  std::thread th;

  LocalServer() {
    srv.Post("/generate", [](const httplib::Request& req, httplib::Response& res) {
      const auto j = Json::parse(req.body);
      res.set_content(Json({{"text", "got: " + j.at("prompt").get<std::string>()}}).dump(), "application/json");
    });
    srv.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    srv.Post("/garbled", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "text/plain");
    });
    port = srv.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }
  ~LocalServer() {
    srv.stop();
    th.join();
  }

  HttpPortConfig config(const std::string& path) const {
    HttpPortConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port);
    c.path = path;
    c.timeout_ms = 2000;
    c.retries = 1;
    return c;
  }
};

}  // namespace

TEST(HttpPort, PostsPromptAndReadsText) {
  LocalServer s;
  HttpGeneratorPort p(s.config("/generate"));
  GenerationRequest req;
  req.prompt = "hello";
  EXPECT_EQ(p.generate(req), "got: hello");
  EXPECT_FALSE(p.is_stub());
}

TEST(HttpPort, FailuresSurfaceAsTimeout) {
  LocalServer s;
  HttpGeneratorPort broken(s.config("/broken"));
  HttpGeneratorPort garbled(s.config("/garbled"));
  GenerationRequest req;
  req.prompt = "x";
  EXPECT_EQ(error_code([&] { broken.generate(req); }), ErrorCode::PortTimeout);
  EXPECT_EQ(error_code([&] { garbled.generate(req); }), ErrorCode::PortTimeout);
}

TEST(HttpPort, UnreachableHostIsTimeout) {
  HttpPortConfig c;
  c.base_url = "http://127.0.0.1:1";
  c.timeout_ms = 300;
  c.retries = 0;
  HttpGeneratorPort p(c);
  EXPECT_EQ(error_code([&] { p.generate({}); }), ErrorCode::PortTimeout);
}
