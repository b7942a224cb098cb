#pragma once

#include <atomic>
#include <memory>
#include <string>

namespace bento {

/// Deterministic OpenAI-compatible endpoint for tests and offline demos.
/// Serves /v1/chat/completions (content derived from a prompt hash) and
/// /v1/completions with echo + logprobs (per-character tokens, hash-derived
/// logprobs), plus GET /__stats and POST /__reset.
class MockEndpoint {
 public:
  MockEndpoint();
  ~MockEndpoint();

  /// Binds 127.0.0.1 on a free port (or the given one) and serves from a
  /// background thread.
  void start(int port = 0);
  void stop();

  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t request_count() const { return requests_.load(); }
  void reset_stats() { requests_.store(0); }

  /// The content the mock returns for a chat prompt (for test expectations).
  static std::string canned_chat_content(const std::string& model, const std::string& prompt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<std::size_t> requests_{0};
  int port_ = 0;
};

}  // namespace bento
