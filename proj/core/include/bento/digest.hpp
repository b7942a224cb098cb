#pragma once

#include <string>
#include <string_view>

namespace bento {

/// SHA-256 hex digest. Used for content-addressed cache keys and artifact
/// provenance stamps.
std::string sha256_hex(std::string_view data);

/// Digest truncated to 16 hex chars, enough for provenance stamps.
std::string short_digest(std::string_view data);

}  // namespace bento
