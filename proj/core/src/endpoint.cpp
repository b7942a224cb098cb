#include "bento/endpoint.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bento/digest.hpp"

namespace bento {

using nlohmann::json;
namespace fs = std::filesystem;

struct HttpCompletionClient::Impl {
  EndpointSettings settings;
  std::string host;
  int port = 80;
  std::string path_prefix;

  explicit Impl(EndpointSettings s) : settings(std::move(s)) {
    std::string url = settings.base_url;
    const auto scheme_pos = url.find("://");
    if (scheme_pos != std::string::npos) {
      const std::string scheme = url.substr(0, scheme_pos);
      if (scheme != "http") {
        throw EndpointError("only http endpoints are supported, got scheme: " + scheme);
      }
      url = url.substr(scheme_pos + 3);
    }
    const auto slash = url.find('/');
    std::string authority = slash == std::string::npos ? url : url.substr(0, slash);
    path_prefix = slash == std::string::npos ? "" : url.substr(slash);
    if (!path_prefix.empty() && path_prefix.back() == '/') path_prefix.pop_back();
    const auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
      host = authority.substr(0, colon);
      port = std::stoi(authority.substr(colon + 1));
    } else {
      host = authority;
      port = 80;
    }
    if (host.empty()) {
      throw EndpointError("endpoint base_url has no host: " + settings.base_url);
    }
  }

  static bool transient_status(int status) {
    return status == 429 || status == 500 || status == 502 || status == 503 || status == 504;
  }

  /// POSTs with retry; returns the response body of a 200.
  std::string post_json(const std::string& path, const std::string& body) {
    std::string last_error;
    for (int attempt = 0; attempt <= settings.max_retries; ++attempt) {
      if (attempt > 0) {
        const auto delay = std::chrono::milliseconds(
            static_cast<long long>(settings.retry_base_ms) << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
      // One connection per request keeps the client stateless and
      // thread-safe under the bounded in-flight fan-out.
      httplib::Client cli(host, port);
      cli.set_connection_timeout(settings.timeout_s, 0);
      cli.set_read_timeout(settings.timeout_s, 0);
      httplib::Headers headers;
      if (!settings.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + settings.api_key);
      }
      auto res = cli.Post((path_prefix + path).c_str(), headers, body, "application/json");
      if (!res) {
        last_error = "connection error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) {
        return res->body;
      }
      if (transient_status(res->status)) {
        last_error = "transient HTTP " + std::to_string(res->status);
        continue;
      }
      throw EndpointError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                          res->body);
    }
    throw EndpointError("endpoint unreachable after " + std::to_string(settings.max_retries + 1) +
                        " attempts (" + last_error + ")");
  }
};

HttpCompletionClient::HttpCompletionClient(EndpointSettings settings)
    : impl_(std::make_unique<Impl>(std::move(settings))) {}

HttpCompletionClient::~HttpCompletionClient() = default;

std::string HttpCompletionClient::model_id() const { return impl_->settings.model; }

std::string HttpCompletionClient::complete(const CompletionRequest& request) {
  json body;
  body["model"] = impl_->settings.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;

  const std::string raw = impl_->post_json("/v1/chat/completions", body.dump());
  try {
    const json j = json::parse(raw);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw EndpointError(std::string("malformed chat completion response: ") + e.what());
  }
}

std::vector<double> HttpCompletionClient::continuation_logprobs(const std::string& prompt,
                                                                const std::string& continuation) {
  json body;
  body["model"] = impl_->settings.model;
  body["prompt"] = prompt + continuation;
  body["max_tokens"] = 0;
  body["temperature"] = 0.0;
  body["echo"] = true;
  body["logprobs"] = 0;

  const std::string raw = impl_->post_json("/v1/completions", body.dump());
  try {
    const json j = json::parse(raw);
    const json& lp = j.at("choices").at(0).at("logprobs");
    const auto& offsets = lp.at("text_offset");
    const auto& token_logprobs = lp.at("token_logprobs");
    std::vector<double> out;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (offsets[i].get<std::size_t>() < prompt.size()) continue;
      if (token_logprobs[i].is_null()) continue;
      out.push_back(token_logprobs[i].get<double>());
    }
    if (out.empty()) {
      throw EndpointError("endpoint returned no logprobs for the continuation region");
    }
    return out;
  } catch (const json::exception& e) {
    throw EndpointError(std::string("malformed completions/logprobs response: ") + e.what());
  }
}

CompletionCache::CompletionCache(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

std::string CompletionCache::key_for(const std::string& model, const std::string& mode,
                                     const std::string& prompt, const std::string& params) {
  std::string material;
  material.reserve(model.size() + mode.size() + prompt.size() + params.size() + 3);
  material += model;
  material += '\x1f';
  material += mode;
  material += '\x1f';
  material += prompt;
  material += '\x1f';
  material += params;
  return sha256_hex(material);
}

std::string CompletionCache::path_for(const std::string& key) const {
  return dir_ + "/" + key.substr(0, 2) + "/" + key.substr(2) + ".json";
}

std::optional<std::string> CompletionCache::get(const std::string& key) const {
  const std::string path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void CompletionCache::put(const std::string& key, const std::string& value) const {
  const std::string path = path_for(key);
  if (fs::exists(path)) return;  // entries are immutable
  fs::create_directories(fs::path(path).parent_path());
  // Write-then-rename gives single-writer-per-key semantics.
  const std::string tmp = path + ".tmp." + std::to_string(
      std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cache: cannot write " + tmp);
    }
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
  }
  fs::rename(tmp, path);
}

}  // namespace bento
