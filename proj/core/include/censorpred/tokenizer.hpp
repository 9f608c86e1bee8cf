#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace censorpred {

namespace pos {
inline constexpr std::string_view kIdiom = "i";
inline constexpr std::string_view kPunctuation = "x";
inline constexpr std::string_view kUnknown = "u";
}  // namespace pos

struct Token {
    std::string surface;
    std::string pos;

    bool operator==(const Token&) const = default;
};

/// Word list for forward maximum matching.
class SegmenterDictionary {
public:
    struct Entry {
        double weight = 1.0;
        std::string pos;
    };

    SegmenterDictionary() = default;

    /// Adds or replaces an entry. Throws UsageError on an empty word.
    void add(std::string word, double weight, std::string pos);

    const Entry* find(std::string_view word) const;
    std::size_t size() const noexcept { return entries_.size(); }
    /// Longest entry length in code points.
    std::size_t max_word_length() const noexcept { return max_len_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, Entry, Hash, std::equal_to<>> entries_;
    std::size_t max_len_ = 0;
};

/// TSV "word<TAB>weight<TAB>pos"; weight and pos may be omitted.
SegmenterDictionary load_dictionary(const std::string& path);

/// Forward maximum matching. Whitespace separates tokens and is dropped;
/// unmatched characters become single-character tokens tagged "x" for
/// punctuation and "u" otherwise.
std::vector<Token> segment(std::string_view text, const SegmenterDictionary& dict);

/// Parses "word/pos word/pos ..." (single-space separated, pos optional).
/// Throws ParseError whose line() is the 1-based index of the bad token.
std::vector<Token> load_pretokenized(std::string_view line);
std::string format_tokens(const std::vector<Token>& tokens);

using StopwordSet = std::unordered_set<std::string>;

StopwordSet load_stopwords(const std::string& path);
std::vector<Token> remove_stopwords(const std::vector<Token>& tokens, const StopwordSet& stopwords);

inline bool is_word(const Token& t) { return t.pos != pos::kPunctuation; }

}  // namespace censorpred
