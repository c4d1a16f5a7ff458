#pragma once

#include <string>
#include <string_view>

namespace volbench {

/// Hex-encoded SHA-256 of the UTF-8 bytes of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace volbench
