#pragma once

// Chat-completion transport over HTTP(S). Requires cpp-httplib; define
// CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL) for https endpoints.

#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ananet/llm/backend.hpp"

namespace ananet::llm {

// POSTs {"model", "messages": [{"role": "user", "content": prompt}],
// "temperature", "max_tokens"} to `endpoint` and reads
// choices[0].message.content from the reply.
class HttpTransport final : public Transport {
public:
  HttpTransport(std::string endpoint, std::string api_key, std::string model)
      : api_key_(std::move(api_key)), model_(std::move(model)) {
    const auto scheme_end = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    base_ = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
  }

  std::string send(const std::string& prompt, const Decoding& decoding) override {
    httplib::Client client(base_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    nlohmann::json body = {{"model", model_},
                           {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                           {"temperature", decoding.temperature},
                           {"max_tokens", decoding.max_tokens}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw TransportError(httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    try {
      auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("unexpected response body: ") + e.what());
    }
  }

private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::string model_;
};

}  // namespace ananet::llm
