#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace affectlens::utf8 {

// Decodes the codepoint starting at byte i and advances i past it.
// Malformed bytes decode as U+FFFD and advance by one byte.
char32_t decode(std::string_view s, std::size_t& i);

void encode(char32_t cp, std::string& out);

std::vector<char32_t> decode_all(std::string_view s);

std::string encode_all(const std::vector<char32_t>& cps);

}  // namespace affectlens::utf8
