#include "censorpred/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "censorpred/error.hpp"
#include "censorpred/utf8.hpp"
#include "text_io.hpp"

namespace censorpred {

using nlohmann::json;

std::string_view label_name(Label label) {
    return label == Label::Censored ? "censored" : "uncensored";
}

std::optional<Label> parse_label(std::string_view text) {
    if (text == "censored") return Label::Censored;
    if (text == "uncensored") return Label::Uncensored;
    return std::nullopt;
}

Corpus::Corpus(std::vector<Post> posts) : posts_(std::move(posts)) {
    std::unordered_set<std::string> seen;
    for (const auto& p : posts_) {
        if (!seen.insert(p.id).second) throw UsageError("duplicate post id '" + p.id + "'");
        auto it = std::find_if(counts_.begin(), counts_.end(),
                               [&](const TopicCounts& c) { return c.topic == p.topic; });
        if (it == counts_.end()) {
            counts_.push_back({p.topic, 0, 0});
            it = std::prev(counts_.end());
        }
        ++(p.label == Label::Censored ? it->censored : it->uncensored);
    }
}

std::size_t Corpus::count(Label label) const {
    std::size_t n = 0;
    for (const auto& c : counts_) n += label == Label::Censored ? c.censored : c.uncensored;
    return n;
}

Corpus Corpus::filter_topics(const std::vector<std::string>& topics) const {
    if (topics.empty()) return *this;
    std::vector<Post> kept;
    for (const auto& p : posts_) {
        if (std::find(topics.begin(), topics.end(), p.topic) != topics.end()) kept.push_back(p);
    }
    return Corpus(std::move(kept));
}

namespace {

bool valid_date(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (d[i] < '0' || d[i] > '9') return false;
    }
    const int month = (d[5] - '0') * 10 + (d[6] - '0');
    const int day = (d[8] - '0') * 10 + (d[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::optional<std::string> string_field(const json& record, const char* key) {
    const auto it = record.find(key);
    if (it == record.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

CorpusLoad read_corpus(std::istream& in, const std::string& source, const CorpusReadOptions& options) {
    std::vector<Post> posts;
    std::vector<Diagnostic> diagnostics;
    std::unordered_set<std::string> ids;

    detail::for_each_line(in, [&](std::size_t lineno, std::string_view line) {
        if (utf8::trim(line).empty()) return;
        auto reject = [&](std::string id, std::string message) {
            diagnostics.push_back({source, lineno, std::move(id), std::move(message)});
        };
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            reject("", std::string("malformed JSON: ") + e.what());
            return;
        }
        if (!record.is_object()) {
            reject("", "record is not a JSON object");
            return;
        }
        const auto id = string_field(record, "id");
        if (!id || id->empty()) {
            reject("", "missing or empty id");
            return;
        }
        const auto label_text = string_field(record, "label");
        std::optional<Label> label = options.require_labels ? std::nullopt : std::optional(Label::Uncensored);
        if (label_text) {
            label = parse_label(*label_text);
            if (!label) {
                reject(*id, "unknown label '" + *label_text + "'");
                return;
            }
        } else if (options.require_labels) {
            reject(*id, "missing label");
            return;
        }
        auto topic = string_field(record, "topic");
        if (!topic && !options.require_labels) topic = std::string();
        if (!topic) {
            reject(*id, "missing topic");
            return;
        }
        if (const auto flags = record.find("flags"); flags != record.end() && flags->is_array() && !flags->empty()) {
            reject(*id, "excluded by flags " + flags->dump());
            return;
        }

        Post post;
        post.id = *id;
        post.label = *label;
        post.topic = *topic;
        if (const auto date = string_field(record, "date")) {
            if (!valid_date(*date)) {
                reject(*id, "invalid date '" + *date + "'");
                return;
            }
            post.date = *date;
        }
        if (const auto tokens = string_field(record, "tokens")) {
            try {
                post.tokens = load_pretokenized(*tokens);
            } catch (const ParseError& e) {
                reject(*id, std::string("bad tokens: ") + e.what());
                return;
            }
            std::string joined;
            for (const auto& t : *post.tokens) joined += t.surface;
            post.text = string_field(record, "text") ? clean_text(*string_field(record, "text")) : joined;
            if (post.tokens->empty()) {
                reject(*id, "empty token list");
                return;
            }
        } else {
            const auto text = string_field(record, "text");
            if (!text) {
                reject(*id, "missing text");
                return;
            }
            post.text = clean_text(*text);
        }
        if (post.text.empty()) {
            reject(*id, "text is empty after cleaning");
            return;
        }
        if (!ids.insert(post.id).second) {
            reject(*id, "duplicate id");
            return;
        }
        posts.push_back(std::move(post));
    });
    return {Corpus(std::move(posts)), std::move(diagnostics)};
}

CorpusLoad load_corpus(const std::string& path, const CorpusReadOptions& options) {
    auto in = detail::open_input(path);
    return read_corpus(in, path, options);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& p : corpus.posts()) {
        json j;
        j["id"] = p.id;
        j["text"] = p.text;
        j["label"] = label_name(p.label);
        j["topic"] = p.topic;
        if (p.date) j["date"] = *p.date;
        if (p.tokens) j["tokens"] = format_tokens(*p.tokens);
        out << j.dump() << '\n';
    }
}

namespace {

// Removes one layer of mentions and paired hashtags.
std::string strip_tags_once(std::string_view raw) {
    const auto cps = utf8::decode(raw);
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < cps.size()) {
        const char32_t c = cps[i].value;
        if (c == U'@' || c == U'＠') {
            std::size_t j = i + 1;
            while (j < cps.size() && !utf8::is_whitespace(cps[j].value) &&
                   !utf8::is_punctuation(cps[j].value)) {
                ++j;
            }
            if (j > i + 1) {
                i = j;
                continue;
            }
        } else if (c == U'#' || c == U'＃') {
            std::size_t j = i + 1;
            while (j < cps.size() && cps[j].value != c) ++j;
            if (j < cps.size()) {
                i = j + 1;
                continue;
            }
        }
        out.append(raw.substr(cps[i].offset, cps[i].length));
        ++i;
    }
    return out;
}

}  // namespace

std::string clean_text(std::string_view raw) {
    // Removing a span can expose a new one ("@#x#y" -> "@y"), so iterate to
    // a fixed point; this also makes the function idempotent.
    std::string current = utf8::trim(strip_tags_once(raw));
    while (true) {
        std::string next = utf8::trim(strip_tags_once(current));
        if (next == current) return current;
        current = std::move(next);
    }
}

std::vector<SummaryRow> corpus_summary(const Corpus& corpus) {
    std::vector<SummaryRow> rows;
    for (const auto& c : corpus.counts()) rows.push_back({c.topic, c.censored, c.uncensored, {}, {}});
    for (const auto& p : corpus.posts()) {
        if (!p.date) continue;
        auto& row = *std::find_if(rows.begin(), rows.end(),
                                  [&](const SummaryRow& r) { return r.topic == p.topic; });
        if (!row.first_date || *p.date < *row.first_date) row.first_date = p.date;
        if (!row.last_date || *p.date > *row.last_date) row.last_date = p.date;
    }
    return rows;
}

void print_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << std::left << std::setw(28) << "topic" << std::right << std::setw(10) << "censored"
        << std::setw(12) << "uncensored" << "  date range\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(28) << r.topic << std::right << std::setw(10) << r.censored
            << std::setw(12) << r.uncensored << "  ";
        if (r.first_date) {
            out << *r.first_date << " .. " << *r.last_date;
        } else {
            out << "-";
        }
        out << '\n';
    }
}

}  // namespace censorpred
