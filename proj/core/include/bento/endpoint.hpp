#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bento {

/// Permanent endpoint failure (transient ones are retried internally).
struct EndpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EndpointSettings {
  std::string base_url;                       // e.g. http://127.0.0.1:8080
  std::string model;
  std::string api_key;                        // resolved from env by the caller
  int timeout_s = 120;
  int max_retries = 5;
  int retry_base_ms = 100;
  int in_flight = 1;                          // bounded request parallelism
};

/// Decoding parameters for one request; temperature 0 keeps runs
/// deterministic.
struct CompletionRequest {
  std::string prompt;
  int max_tokens = 16;
  double temperature = 0.0;
};

/// Minimal completion interface so tests can substitute a stub for HTTP.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;

  virtual std::string model_id() const = 0;

  /// Generates via the chat/completions path.
  virtual std::string complete(const CompletionRequest& request) = 0;

  /// Token logprobs of `continuation` appended to `prompt`, via the
  /// completions path with echo + logprobs. The prompt should end at a token
  /// boundary (the templates' trailing space guarantees this).
  virtual std::vector<double> continuation_logprobs(const std::string& prompt,
                                                    const std::string& continuation) = 0;
};

/// OpenAI-compatible HTTP client. Stateless per request, safe to share
/// across threads. Transient failures (connect errors, 429, 5xx) are retried
/// with exponential backoff.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(EndpointSettings settings);
  ~HttpCompletionClient() override;

  std::string model_id() const override;
  std::string complete(const CompletionRequest& request) override;
  std::vector<double> continuation_logprobs(const std::string& prompt,
                                            const std::string& continuation) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Content-addressed response cache: key = digest of (model, mode, prompt,
/// decoding parameters); entries are immutable once written.
class CompletionCache {
 public:
  explicit CompletionCache(std::string dir);

  static std::string key_for(const std::string& model, const std::string& mode,
                             const std::string& prompt, const std::string& params);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& value) const;

  const std::string& dir() const { return dir_; }

 private:
  std::string path_for(const std::string& key) const;
  std::string dir_;
};

}  // namespace bento
