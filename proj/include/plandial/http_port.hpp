#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "plandial/assistant_policy.hpp"

namespace plandial {

struct HttpPortConfig {
  std::string base_url = "http://127.0.0.1:8080";  // scheme://host:port
  std::string path = "/generate";
  int timeout_ms = 10000;
  int retries = 2;
};

/// Remote generator: POST {prompt, max_tokens, temperature} -> {text}.
/// Every failure after the configured retries surfaces as PortTimeout.
/// httplib::Client is not shared between calls, so concurrent use is safe.
class HttpGeneratorPort final : public GeneratorPort {
 public:
  explicit HttpGeneratorPort(HttpPortConfig cfg) : cfg_(std::move(cfg)) {}

  std::string generate(const GenerationRequest& request) override {
    const Json body = {{"prompt", request.prompt},
                       {"max_tokens", request.max_tokens},
                       {"temperature", request.temperature}};
    const std::string payload = body.dump();
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      httplib::Client cli(cfg_.base_url);
      const auto secs = cfg_.timeout_ms / 1000;
      const auto usecs = (cfg_.timeout_ms % 1000) * 1000;
      cli.set_connection_timeout(secs, usecs);
      cli.set_read_timeout(secs, usecs);
      cli.set_write_timeout(secs, usecs);
      auto res = cli.Post(cfg_.path, payload, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      try {
        return Json::parse(res->body).at("text").get<std::string>();
      } catch (const Json::exception& e) {
        last_error = std::string("bad reply: ") + e.what();
      }
    }
    fail(ErrorCode::PortTimeout, cfg_.base_url + cfg_.path + ": " + last_error);
  }

 private:
  HttpPortConfig cfg_;
};

}  // namespace plandial
