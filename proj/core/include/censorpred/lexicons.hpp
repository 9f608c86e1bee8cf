#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace censorpred {

// ---------------------------------------------------------------------------
// Sensitive keywords

struct DateRange {
    std::string from;  // inclusive, YYYY-MM-DD
    std::string to;    // inclusive

    bool contains(std::string_view date) const { return date >= from && date <= to; }
};

struct KeywordList {
    std::string label;
    std::vector<std::string> terms;  // unique, in file order
    std::optional<DateRange> valid;

    /// True when the list should be applied to a post with the given date.
    bool applies_to(const std::optional<std::string>& date) const;
};

/// One term per line; lines starting with '#' are comments, except a
/// "#range YYYY-MM-DD YYYY-MM-DD" directive declaring the validity window.
KeywordList load_keywords(const std::string& path);

/// Non-overlapping left-to-right occurrences of `term` in `text`.
std::size_t count_occurrences(std::string_view text, std::string_view term);

// ---------------------------------------------------------------------------
// LIWC

using CategoryId = int;
using CategorySet = std::set<CategoryId>;

class LiwcDictionary {
public:
    struct Entry {
        std::string pattern;  // literal word, or prefix ending in '*'
        CategorySet categories;
    };

    /// Category ids in ascending order with their names.
    const std::map<CategoryId, std::string>& categories() const noexcept { return categories_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    void add_category(CategoryId id, std::string name);
    /// Merges into an existing entry with the same pattern. Throws UsageError
    /// for undeclared categories or an empty pattern.
    void add_entry(std::string_view pattern, const CategorySet& categories);

    /// Union of the categories of the literal entry equal to `word` and of
    /// every wildcard entry whose prefix starts `word`.
    CategorySet match(std::string_view word) const;

private:
    struct TrieNode {
        std::unordered_map<unsigned char, std::uint32_t> next;
        CategorySet wildcard;
    };

    std::map<CategoryId, std::string> categories_;
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> entry_index_;
    std::unordered_map<std::string, CategorySet> literals_;
    std::vector<TrieNode> trie_{1};
};

/// Standard %-delimited .dic layout: header of "id<TAB>name" lines between
/// two "%" lines, then "pattern<TAB>id id ..." entry lines.
LiwcDictionary load_liwc(const std::string& path);

inline CategorySet liwc_match(std::string_view word, const LiwcDictionary& dict) {
    return dict.match(word);
}

// ---------------------------------------------------------------------------
// Frequency tables

enum class FrequencyKind { Word, Character };

inline constexpr double kDefaultRareFloor = 0.0001;  // percent
inline constexpr long long kDefaultRareCount = 50;

struct FrequencyTable {
    FrequencyKind kind = FrequencyKind::Word;
    std::unordered_map<std::string, double> freq;  // percent of reference corpus
    double rare_floor = kDefaultRareFloor;
};

/// TSV "item<TAB>value". Values are percentages unless the file declares
/// "#total<TAB>N", in which case they are raw counts converted to percent of
/// N; items with fewer than `rare_count` occurrences are dropped so they fall
/// back to the rare floor.
FrequencyTable load_frequency_table(const std::string& path, FrequencyKind kind,
                                    long long rare_count = kDefaultRareCount,
                                    double rare_floor = kDefaultRareFloor);

/// Stored percentage or the table's rare floor. Throws UsageError when the
/// table kind differs from `expected`.
double lookup_frequency(std::string_view item, const FrequencyTable& table, FrequencyKind expected);

// ---------------------------------------------------------------------------
// Semantic thesaurus

inline constexpr int kSemanticClassCount = 12;

extern const std::array<std::string_view, kSemanticClassCount> kSemanticClassNames;

/// Bitmask over the 12 top-level classes; bit (c - 1) set for class c.
using SemanticClassSet = std::uint16_t;

inline int class_count(SemanticClassSet s) { return __builtin_popcount(s); }

struct SemanticThesaurus {
    std::unordered_map<std::string, SemanticClassSet> classes_of;
};

/// TSV "code<TAB>word word ..." where the code's first letter A-L selects the
/// top-level class (Cilin layout; whitespace after the code is also accepted).
SemanticThesaurus load_thesaurus(const std::string& path);

SemanticClassSet semantic_classes(std::string_view word, const SemanticThesaurus& th);

// ---------------------------------------------------------------------------
// Word lists

struct IdiomList {
    std::unordered_set<std::string> idioms;
};

IdiomList load_idioms(const std::string& path);

struct SentimentLexicon {
    std::unordered_set<std::string> positive;
    std::unordered_set<std::string> negative;
};

/// TSV "word<TAB>pos|neg".
SentimentLexicon load_sentiment_lexicon(const std::string& path);

}  // namespace censorpred
