#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace facmon::crypto {

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);

/// Hex text of `n` bytes from the system CSPRNG.
std::string random_hex(std::size_t n);

std::string base64_encode(std::string_view bytes);
/// Throws INVALID_ARGUMENT on malformed input.
std::string base64_decode(std::string_view text);

bool is_sha256_hex(std::string_view s) noexcept;

}  // namespace facmon::crypto
