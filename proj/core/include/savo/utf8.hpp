#pragma once

#include <filesystem>
#include <string>
#include <vector>
#include <string_view>

namespace savo::utf8 {

/// Throws MalformedInput on invalid sequences.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

/// Non-empty trimmed lines of a UTF-8 text file (BOM tolerated). Throws Io if unreadable.
std::vector<std::u32string> read_lines(const std::filesystem::path& path);

}  // namespace savo::utf8
