#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace argen {

/// Splits a UTF-8 string into codepoint-sized substrings. Invalid bytes are
/// passed through as single-byte units.
std::vector<std::string> utf8_codepoints(const std::string& s);

std::size_t utf8_length(const std::string& s);

enum class Script { latin, cjk, arabic, other };

const char* to_string(Script s);

Script script_of_codepoint(std::uint32_t cp);

/// Majority script over a string's letters; digits, punctuation and spaces
/// are ignored. Empty or letterless input maps to Script::other.
Script dominant_script(const std::string& s);

}  // namespace argen
