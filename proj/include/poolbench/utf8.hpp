#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poolbench::utf8 {

// Byte offset of the first invalid sequence, or nullopt if the input is
// well-formed UTF-8 (overlongs, surrogates and > U+10FFFF are invalid).
std::optional<std::size_t> find_invalid(std::string_view bytes);

// Decodes valid UTF-8 into code points. Precondition: find_invalid() is empty.
std::vector<char32_t> decode(std::string_view bytes);
void append(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
// Lowercases ASCII and the Latin-1/Greek/Cyrillic uppercase ranges.
char32_t to_lower(char32_t cp);

std::string_view trim_ascii(std::string_view s);

}  // namespace poolbench::utf8
