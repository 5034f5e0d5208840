#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace kernelcur {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::string_view data);

std::string to_hex(const Sha256& digest);

// Hex SHA-256 over length-prefixed parts, so ("ab","c") and ("a","bc") differ.
std::string digest_parts(std::initializer_list<std::string_view> parts);

}  // namespace kernelcur
