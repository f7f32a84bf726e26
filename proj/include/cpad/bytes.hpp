#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpad {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
/// Throws Error(InvalidEncoding) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// SHA-256 of the input.
std::array<std::uint8_t, 32> sha256(ByteView data);

/// Constant-time equality for equal-length buffers; false on length mismatch.
bool ct_equal(ByteView a, ByteView b) noexcept;

}  // namespace cpad
