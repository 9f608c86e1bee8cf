#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace censorpred::utf8 {

/// One decoded code point together with its byte span in the source string.
struct CodePoint {
    char32_t value;
    std::size_t offset;
    std::size_t length;
};

/// Decodes UTF-8; invalid bytes decode to U+FFFD with length 1 so that
/// byte spans always tile the input.
std::vector<CodePoint> decode(std::string_view text);

std::size_t length(std::string_view text);
std::string encode(char32_t cp);

bool is_whitespace(char32_t cp);
/// Punctuation and symbols: ASCII punctuation, Latin-1 punctuation, General
/// Punctuation, CJK Symbols and Punctuation, CJK compatibility/small forms and
/// the punctuation part of the fullwidth block.
bool is_punctuation(char32_t cp);
/// CJK unified ideographs (base block, extensions A-F, compatibility ideographs).
bool is_cjk(char32_t cp);

std::string trim(std::string_view text);

}  // namespace censorpred::utf8
