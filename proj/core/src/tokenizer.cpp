#include "censorpred/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "censorpred/error.hpp"
#include "censorpred/utf8.hpp"
#include "text_io.hpp"

namespace censorpred {

void SegmenterDictionary::add(std::string word, double weight, std::string pos) {
    if (word.empty()) throw UsageError("dictionary entry with empty word");
    max_len_ = std::max(max_len_, utf8::length(word));
    entries_.insert_or_assign(std::move(word), Entry{weight, std::move(pos)});
}

const SegmenterDictionary::Entry* SegmenterDictionary::find(std::string_view word) const {
    const auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
}

SegmenterDictionary load_dictionary(const std::string& path) {
    SegmenterDictionary dict;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        if (line.empty()) return;
        const auto fields = detail::split(line, '\t');
        if (fields[0].empty()) throw ParseError(path, lineno, "empty word");
        double weight = 1.0;
        if (fields.size() > 1 && !fields[1].empty()) {
            weight = detail::parse_double(fields[1], path, lineno);
        }
        std::string tag = fields.size() > 2 ? std::string(fields[2]) : std::string(pos::kUnknown);
        dict.add(std::string(fields[0]), weight, std::move(tag));
    });
    return dict;
}

std::vector<Token> segment(std::string_view text, const SegmenterDictionary& dict) {
    const auto cps = utf8::decode(text);
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (utf8::is_whitespace(cps[i].value)) {
            ++i;
            continue;
        }
        // Candidate window stops at the next whitespace.
        std::size_t window = 0;
        while (i + window < cps.size() && window < dict.max_word_length() &&
               !utf8::is_whitespace(cps[i + window].value)) {
            ++window;
        }
        bool matched = false;
        for (std::size_t len = window; len >= 1; --len) {
            const std::size_t begin = cps[i].offset;
            const std::size_t end = cps[i + len - 1].offset + cps[i + len - 1].length;
            const std::string_view candidate = text.substr(begin, end - begin);
            if (const auto* entry = dict.find(candidate)) {
                out.push_back({std::string(candidate), entry->pos});
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) {
            const auto& cp = cps[i];
            out.push_back({std::string(text.substr(cp.offset, cp.length)),
                           std::string(utf8::is_punctuation(cp.value) ? pos::kPunctuation
                                                                       : pos::kUnknown)});
            ++i;
        }
    }
    return out;
}

std::vector<Token> load_pretokenized(std::string_view line) {
    std::vector<Token> out;
    if (line.empty()) return out;
    std::size_t index = 0;
    for (const auto piece : detail::split(line, ' ')) {
        ++index;
        if (piece.empty()) throw ParseError("pretokenized", index, "empty token");
        const auto slash = piece.rfind('/');
        if (slash == std::string_view::npos) {
            out.push_back({std::string(piece), std::string(pos::kUnknown)});
            continue;
        }
        if (slash == 0) throw ParseError("pretokenized", index, "empty surface before '/'");
        if (slash + 1 == piece.size()) throw ParseError("pretokenized", index, "empty POS after '/'");
        out.push_back({std::string(piece.substr(0, slash)), std::string(piece.substr(slash + 1))});
    }
    return out;
}

std::string format_tokens(const std::vector<Token>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i].surface;
        out.push_back('/');
        out += tokens[i].pos;
    }
    return out;
}

StopwordSet load_stopwords(const std::string& path) {
    StopwordSet words;
    detail::for_each_line(path, [&](std::size_t, std::string_view line) {
        auto word = utf8::trim(line);
        if (!word.empty()) words.insert(std::move(word));
    });
    return words;
}

std::vector<Token> remove_stopwords(const std::vector<Token>& tokens, const StopwordSet& stopwords) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
                 [&](const Token& t) { return !stopwords.contains(t.surface); });
    return out;
}

}  // namespace censorpred
