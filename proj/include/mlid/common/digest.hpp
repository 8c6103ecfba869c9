#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mlid {

// 64-bit FNV-1a, rendered as 16 lowercase hex digits. Used to fingerprint
// canonical JSON payloads in reports; not a security primitive.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::string_view bytes);

}  // namespace mlid
