#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace zkr {

using Sha256Digest = std::array<std::uint8_t, 32>;

/// SHA-256 over raw bytes (OpenSSL).
Sha256Digest sha256(std::string_view bytes);

std::string to_hex(const std::uint8_t* data, std::size_t size);

template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& bytes) {
    return to_hex(bytes.data(), N);
}

/// Strict hex decode (even length, [0-9a-fA-F]); throws ValidationError.
std::string from_hex(std::string_view hex);

}  // namespace zkr
