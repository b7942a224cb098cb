#include "mock_endpoint.hpp"

#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bento/rng.hpp"

namespace bento {

using nlohmann::json;

struct MockEndpoint::Impl {
  httplib::Server server;
  std::thread thread;
};

MockEndpoint::MockEndpoint() : impl_(std::make_unique<Impl>()) {}

MockEndpoint::~MockEndpoint() { stop(); }

std::string MockEndpoint::canned_chat_content(const std::string& model,
                                              const std::string& prompt) {
  // Stable pseudo-answer: one of the four option letters.
  const std::uint64_t h = fnv1a64(model + "\x1f" + prompt);
  const char letter = static_cast<char>('A' + (h % 4));
  return std::string("Answer: ") + letter;
}

void MockEndpoint::start(int port) {
  auto& server = impl_->server;

  server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      res.status = 400;
      res.set_content("{\"error\":\"bad json\"}", "application/json");
      return;
    }
    const std::string model = body.value("model", "mock");
    std::string prompt;
    for (const auto& msg : body.at("messages")) {
      prompt += msg.at("content").get<std::string>();
    }
    json out;
    out["model"] = model;
    out["choices"] = json::array(
        {{{"index", 0},
          {"message", {{"role", "assistant"}, {"content", canned_chat_content(model, prompt)}}},
          {"finish_reason", "stop"}}});
    res.set_content(out.dump(), "application/json");
  });

  server.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      res.status = 400;
      res.set_content("{\"error\":\"bad json\"}", "application/json");
      return;
    }
    const std::string model = body.value("model", "mock");
    const std::string prompt = body.at("prompt").get<std::string>();
    // Per-character tokens so any continuation boundary aligns exactly.
    json tokens = json::array();
    json logprobs = json::array();
    json offsets = json::array();
    for (std::size_t i = 0; i < prompt.size(); ++i) {
      const std::string tok = prompt.substr(i, 1);
      tokens.push_back(tok);
      offsets.push_back(i);
      if (i == 0) {
        logprobs.push_back(nullptr);  // no logprob for the first token
      } else {
        const std::uint64_t h = fnv1a64(model) ^ fnv1a64(tok) ^ (0x9E37ULL * i);
        logprobs.push_back(-(static_cast<double>(h % 900) + 100.0) / 1000.0);
      }
    }
    json out;
    out["model"] = model;
    out["choices"] = json::array({{{"index", 0},
                                   {"text", prompt},
                                   {"logprobs",
                                    {{"tokens", tokens},
                                     {"token_logprobs", logprobs},
                                     {"text_offset", offsets}}},
                                   {"finish_reason", "length"}}});
    res.set_content(out.dump(), "application/json");
  });

  server.Get("/__stats", [this](const httplib::Request&, httplib::Response& res) {
    json out;
    out["requests"] = requests_.load();
    res.set_content(out.dump(), "application/json");
  });

  server.Post("/__reset", [this](const httplib::Request&, httplib::Response& res) {
    reset_stats();
    res.set_content("{}", "application/json");
  });

  if (port == 0) {
    port_ = server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) {
      throw std::runtime_error("mock endpoint: failed to bind a port");
    }
  } else {
    if (!server.bind_to_port("127.0.0.1", port)) {
      throw std::runtime_error("mock endpoint: failed to bind port " + std::to_string(port));
    }
    port_ = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  server.wait_until_ready();
}

void MockEndpoint::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
  if (impl_ && impl_->thread.joinable()) {
    impl_->thread.join();
  }
}

}  // namespace bento
