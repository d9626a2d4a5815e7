#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace medpipe::detail {

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::string base64_encode(const std::vector<std::uint8_t>& data);

// Standard alphabet with '=' padding; whitespace is not tolerated. Throws
// std::invalid_argument on anything else.
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace medpipe::detail
