#include "censorpred/lexicons.hpp"

#include <algorithm>

#include "censorpred/error.hpp"
#include "censorpred/utf8.hpp"
#include "text_io.hpp"

namespace censorpred {

// ---------------------------------------------------------------------------
// Keywords

bool KeywordList::applies_to(const std::optional<std::string>& date) const {
    return !valid || !date || valid->contains(*date);
}

KeywordList load_keywords(const std::string& path) {
    KeywordList list;
    const auto slash = path.find_last_of('/');
    list.label = path.substr(slash == std::string::npos ? 0 : slash + 1);
    std::unordered_set<std::string> seen;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        const auto term = utf8::trim(line);
        if (term.empty()) return;
        if (term.starts_with("#")) {
            if (term.starts_with("#range")) {
                const auto fields = detail::split_ws(term);
                if (fields.size() != 3 || fields[1] > fields[2]) {
                    throw ParseError(path, lineno, "expected '#range FROM TO'");
                }
                list.valid = DateRange{std::string(fields[1]), std::string(fields[2])};
            }
            return;
        }
        if (seen.insert(term).second) list.terms.push_back(term);
    });
    return list;
}

std::size_t count_occurrences(std::string_view text, std::string_view term) {
    if (term.empty()) return 0;
    std::size_t n = 0;
    std::size_t pos = text.find(term);
    while (pos != std::string_view::npos) {
        ++n;
        pos = text.find(term, pos + term.size());
    }
    return n;
}

// ---------------------------------------------------------------------------
// LIWC

void LiwcDictionary::add_category(CategoryId id, std::string name) {
    categories_.insert_or_assign(id, std::move(name));
}

void LiwcDictionary::add_entry(std::string_view pattern, const CategorySet& cats) {
    if (pattern.empty()) throw UsageError("empty LIWC pattern");
    for (const auto id : cats) {
        if (!categories_.contains(id)) {
            throw UsageError("LIWC entry '" + std::string(pattern) + "' references undeclared category " +
                             std::to_string(id));
        }
    }
    const std::string key(pattern);
    if (const auto it = entry_index_.find(key); it != entry_index_.end()) {
        entries_[it->second].categories.insert(cats.begin(), cats.end());
    } else {
        entry_index_.emplace(key, entries_.size());
        entries_.push_back({key, cats});
    }

    if (pattern.back() == '*') {
        std::uint32_t node = 0;
        for (const char c : pattern.substr(0, pattern.size() - 1)) {
            const auto byte = static_cast<unsigned char>(c);
            const auto it = trie_[node].next.find(byte);
            if (it != trie_[node].next.end()) {
                node = it->second;
            } else {
                const auto child = static_cast<std::uint32_t>(trie_.size());
                trie_[node].next.emplace(byte, child);
                trie_.emplace_back();
                node = child;
            }
        }
        trie_[node].wildcard.insert(cats.begin(), cats.end());
    } else {
        literals_[key].insert(cats.begin(), cats.end());
    }
}

CategorySet LiwcDictionary::match(std::string_view word) const {
    CategorySet out;
    if (const auto it = literals_.find(std::string(word)); it != literals_.end()) out = it->second;
    std::uint32_t node = 0;
    out.insert(trie_[0].wildcard.begin(), trie_[0].wildcard.end());
    for (const char c : word) {
        const auto it = trie_[node].next.find(static_cast<unsigned char>(c));
        if (it == trie_[node].next.end()) break;
        node = it->second;
        out.insert(trie_[node].wildcard.begin(), trie_[node].wildcard.end());
    }
    return out;
}

LiwcDictionary load_liwc(const std::string& path) {
    LiwcDictionary dict;
    int percent_lines = 0;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view raw) {
        const auto line = utf8::trim(raw);
        if (line.empty()) return;
        if (line == "%") {
            ++percent_lines;
            return;
        }
        if (percent_lines == 0) throw ParseError(path, lineno, "missing '%' header block");
        const auto fields = detail::split_ws(line);
        if (percent_lines == 1) {
            if (fields.size() < 2) throw ParseError(path, lineno, "expected 'id<TAB>name'");
            const auto id = static_cast<CategoryId>(detail::parse_int(fields[0], path, lineno));
            std::string name(fields[1]);
            for (std::size_t i = 2; i < fields.size(); ++i) name += " " + std::string(fields[i]);
            dict.add_category(id, std::move(name));
            return;
        }
        if (fields.size() < 2) throw ParseError(path, lineno, "entry without categories");
        CategorySet cats;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto id = static_cast<CategoryId>(detail::parse_int(fields[i], path, lineno));
            if (!dict.categories().contains(id)) {
                throw ParseError(path, lineno, "undeclared category " + std::to_string(id));
            }
            cats.insert(id);
        }
        dict.add_entry(fields[0], cats);
    });
    if (percent_lines < 2) throw ParseError(path, 0, "missing header: expected two '%' lines");
    return dict;
}

// ---------------------------------------------------------------------------
// Frequency tables

FrequencyTable load_frequency_table(const std::string& path, FrequencyKind kind, long long rare_count,
                                    double rare_floor) {
    if (rare_floor <= 0.0) throw UsageError("rare floor must be positive");
    FrequencyTable table;
    table.kind = kind;
    table.rare_floor = rare_floor;
    std::optional<double> total;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        if (line.empty()) return;
        const auto fields = detail::split(line, '\t');
        if (fields[0] == "#total") {
            if (fields.size() != 2) throw ParseError(path, lineno, "expected '#total<TAB>N'");
            total = detail::parse_double(fields[1], path, lineno);
            if (*total <= 0) throw ParseError(path, lineno, "total must be positive");
            return;
        }
        if (fields.size() != 2 || fields[0].empty()) throw ParseError(path, lineno, "expected 'item<TAB>value'");
        if (kind == FrequencyKind::Character && utf8::length(fields[0]) != 1) {
            throw ParseError(path, lineno, "character table entry is not a single character");
        }
        double value = detail::parse_double(fields[1], path, lineno);
        if (total) {
            if (value < static_cast<double>(rare_count)) return;
            value = 100.0 * value / *total;
        }
        if (value <= 0.0) return;
        table.freq.insert_or_assign(std::string(fields[0]), value);
    });
    return table;
}

double lookup_frequency(std::string_view item, const FrequencyTable& table, FrequencyKind expected) {
    if (table.kind != expected) {
        throw UsageError(expected == FrequencyKind::Character ? "character lookup against a word table"
                                                              : "word lookup against a character table");
    }
    const auto it = table.freq.find(std::string(item));
    return it == table.freq.end() ? table.rare_floor : it->second;
}

// ---------------------------------------------------------------------------
// Semantic thesaurus

const std::array<std::string_view, kSemanticClassCount> kSemanticClassNames{
    "Human",     "Matter",           "Space-and-time",       "Abstract-matter",
    "Characteristics", "Actions",   "Psychology",           "Human-activities",
    "States-and-phenomena", "Relations", "Auxiliary-words", "Formulaic-expressions"};

SemanticThesaurus load_thesaurus(const std::string& path) {
    SemanticThesaurus th;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        const auto fields = detail::split_ws(line);
        if (fields.empty()) return;
        const char top = fields[0][0];
        if (top < 'A' || top > 'L') throw ParseError(path, lineno, "class code must start with A-L");
        const auto bit = static_cast<SemanticClassSet>(1u << (top - 'A'));
        for (std::size_t i = 1; i < fields.size(); ++i) th.classes_of[std::string(fields[i])] |= bit;
    });
    return th;
}

SemanticClassSet semantic_classes(std::string_view word, const SemanticThesaurus& th) {
    const auto it = th.classes_of.find(std::string(word));
    return it == th.classes_of.end() ? SemanticClassSet{0} : it->second;
}

// ---------------------------------------------------------------------------
// Word lists

IdiomList load_idioms(const std::string& path) {
    IdiomList list;
    detail::for_each_line(path, [&](std::size_t, std::string_view line) {
        auto idiom = utf8::trim(line);
        if (!idiom.empty() && !idiom.starts_with("#")) list.idioms.insert(std::move(idiom));
    });
    return list;
}

SentimentLexicon load_sentiment_lexicon(const std::string& path) {
    SentimentLexicon lex;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        if (line.empty() || line.starts_with("#")) return;
        const auto fields = detail::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty()) throw ParseError(path, lineno, "expected 'word<TAB>pos|neg'");
        if (fields[1] == "pos") {
            lex.positive.emplace(fields[0]);
        } else if (fields[1] == "neg") {
            lex.negative.emplace(fields[0]);
        } else {
            throw ParseError(path, lineno, "polarity must be 'pos' or 'neg'");
        }
    });
    return lex;
}

}  // namespace censorpred
