#include "censorpred/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "censorpred/error.hpp"
#include "censorpred/utf8.hpp"
#include "json_io.hpp"
#include "text_io.hpp"

namespace censorpred {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Sentiment

ScoreFileSentiment::ScoreFileSentiment(std::unordered_map<std::string, SentimentScore> scores)
    : scores_(std::move(scores)) {}

ScoreFileSentiment ScoreFileSentiment::load(const std::string& path) {
    std::unordered_map<std::string, SentimentScore> scores;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        if (line.empty()) return;
        const auto fields = detail::split(line, ',');
        if (fields.size() != 3) throw ParseError(path, lineno, "expected 'id,positive,negative'");
        if (lineno == 1 && fields[1] == "positive") return;
        const double pos = detail::parse_double(fields[1], path, lineno);
        const double neg = detail::parse_double(fields[2], path, lineno);
        if (pos < 0 || neg < 0 || pos + neg <= 0) throw ParseError(path, lineno, "scores must be non-negative, not both 0");
        const double p = pos / (pos + neg);
        scores.insert_or_assign(std::string(fields[0]), SentimentScore{p, 1.0 - p});
    });
    return ScoreFileSentiment(std::move(scores));
}

SentimentScore ScoreFileSentiment::score(const Post& post, const std::vector<Token>&) const {
    const auto it = scores_.find(post.id);
    if (it == scores_.end()) throw ConfigError("no sentiment score for post '" + post.id + "'");
    return it->second;
}

void ScoreFileSentiment::require(const Corpus& corpus) const {
    std::vector<std::string> missing;
    for (const auto& p : corpus.posts()) {
        if (!scores_.contains(p.id)) missing.push_back(p.id);
    }
    if (missing.empty()) return;
    std::string msg = "sentiment score file is missing " + std::to_string(missing.size()) + " post id(s):";
    for (const auto& id : missing) msg += " " + id;
    throw ConfigError(msg);
}

SentimentScore LexiconSentiment::score(const Post&, const std::vector<Token>& tokens) const {
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (const auto& t : tokens) {
        pos += lexicon_.positive.contains(t.surface);
        neg += lexicon_.negative.contains(t.surface);
    }
    if (pos + neg == 0) return {0.5, 0.5};
    const double p = static_cast<double>(pos) / static_cast<double>(pos + neg);
    return {p, 1.0 - p};
}

// ---------------------------------------------------------------------------
// Per-post features

std::size_t word_count(const std::vector<Token>& tokens) {
    return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), is_word));
}

double f_keyword_count(std::string_view text, const std::optional<std::string>& date,
                       std::span<const KeywordList> lists) {
    std::set<std::string_view> terms;
    for (const auto& list : lists) {
        if (!list.applies_to(date)) continue;
        terms.insert(list.terms.begin(), list.terms.end());
    }
    std::size_t n = 0;
    for (const auto term : terms) n += count_occurrences(text, term);
    return static_cast<double>(n);
}

SentimentScore f_sentiment(const Post& post, const std::vector<Token>& tokens, const SentimentProvider& provider) {
    return provider.score(post, tokens);
}

LiwcFeatures f_liwc(const std::vector<Token>& tokens, const LiwcDictionary& dict) {
    LiwcFeatures out;
    std::unordered_map<CategoryId, std::size_t> hits;
    for (const auto& t : tokens) {
        if (!is_word(t)) continue;
        ++out.word_count;
        for (const auto id : dict.match(t.surface)) ++hits[id];
    }
    out.percent.reserve(dict.categories().size());
    for (const auto& [id, name] : dict.categories()) {
        const auto it = hits.find(id);
        const double count = it == hits.end() ? 0.0 : static_cast<double>(it->second);
        out.percent.push_back(out.word_count ? 100.0 * count / static_cast<double>(out.word_count) : 0.0);
    }
    return out;
}

Measured f_word_freq(const std::vector<Token>& tokens, const FrequencyTable& table) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : tokens) {
        if (!is_word(t)) continue;
        sum += lookup_frequency(t.surface, table, FrequencyKind::Word);
        ++n;
    }
    if (n == 0) return {table.rare_floor, true};
    return {sum / static_cast<double>(n), false};
}

Measured f_char_freq(std::string_view text, const FrequencyTable& table) {
    if (table.kind != FrequencyKind::Character) throw UsageError("character lookup against a word table");
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& cp : utf8::decode(text)) {
        if (!utf8::is_cjk(cp.value)) continue;
        sum += lookup_frequency(text.substr(cp.offset, cp.length), table, FrequencyKind::Character);
        ++n;
    }
    if (n == 0) return {table.rare_floor, true};
    return {sum / static_cast<double>(n), false};
}

Measured f_semantic_ratio(const std::vector<Token>& tokens, const SemanticThesaurus& th) {
    SemanticClassSet seen = 0;
    std::size_t words = 0;
    for (const auto& t : tokens) {
        if (!is_word(t)) continue;
        ++words;
        seen |= semantic_classes(t.surface, th);
    }
    const int classes = class_count(seen);
    if (classes == 0) return {static_cast<double>(words), true};
    return {static_cast<double>(words) / classes, false};
}

double f_idiom_density(const std::vector<Token>& tokens, const IdiomList* idioms) {
    std::size_t words = 0;
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (!is_word(t)) continue;
        ++words;
        if (t.pos == pos::kIdiom || (idioms && idioms->idioms.contains(t.surface))) ++hits;
    }
    return words ? static_cast<double>(hits) / static_cast<double>(words) : 0.0;
}

double inverse_idiom(double idiom_density) {
    return 1.0 / std::max(idiom_density, kIdiomDensityFloor);
}

double f_readability1(double char_freq, double word_freq, double semantic_ratio) {
    return (char_freq + word_freq + semantic_ratio) / 3.0;
}

double f_readability2(double char_freq, double word_freq, double semantic_ratio, double inverse_idiom) {
    return (char_freq + word_freq + semantic_ratio + inverse_idiom) / 4.0;
}

namespace {

struct Moments {
    double mean = 0.0;
    double stdev = 0.0;
};

Moments population_moments(std::span<const double> v) {
    if (v.empty()) return {};
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

bool is_constant(const Moments& m) {
    return m.stdev <= 1e-12 * std::max(1.0, std::abs(m.mean));
}

double zscore(double x, double mean, double stdev) {
    return stdev > 0.0 ? (x - mean) / stdev : 0.0;
}

}  // namespace

ReadabilityStats ReadabilityStats::fit(std::span<const ReadabilityComponents> rows) {
    ReadabilityStats s;
    auto fit_one = [&](double ReadabilityComponents::*field) {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r.*field);
        auto m = population_moments(v);
        if (is_constant(m)) m.stdev = 0.0;
        s.mean.*field = m.mean;
        s.stdev.*field = m.stdev;
    };
    fit_one(&ReadabilityComponents::char_freq);
    fit_one(&ReadabilityComponents::word_freq);
    fit_one(&ReadabilityComponents::semantic_ratio);
    fit_one(&ReadabilityComponents::inverse_idiom);
    return s;
}

ReadabilityComponents ReadabilityStats::apply(const ReadabilityComponents& c) const {
    return {zscore(c.char_freq, mean.char_freq, stdev.char_freq),
            zscore(c.word_freq, mean.word_freq, stdev.word_freq),
            zscore(c.semantic_ratio, mean.semantic_ratio, stdev.semantic_ratio),
            zscore(c.inverse_idiom, mean.inverse_idiom, stdev.inverse_idiom)};
}

// ---------------------------------------------------------------------------
// FeatureMatrix

std::optional<std::size_t> FeatureMatrix::find_column(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

std::size_t FeatureMatrix::column(std::string_view name) const {
    const auto idx = find_column(name);
    if (!idx) throw UsageError("unknown feature '" + std::string(name) + "'");
    return *idx;
}

std::vector<double> FeatureMatrix::column_values(std::size_t col) const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[col]);
    return v;
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& subset) const {
    std::vector<std::size_t> cols;
    cols.reserve(subset.size());
    for (const auto& name : subset) cols.push_back(column(name));
    FeatureMatrix out;
    out.ids = ids;
    out.labels = labels;
    out.standardized = standardized;
    out.readability_stats = readability_stats;
    out.notes = notes;
    for (const auto c : cols) {
        out.names.push_back(names[c]);
        out.groups.push_back(groups[c]);
        if (!column_stats.empty()) out.column_stats.push_back(column_stats[c]);
    }
    out.rows.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<double> row;
        row.reserve(cols.size());
        for (const auto c : cols) row.push_back(r[c]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

FeatureMatrix FeatureMatrix::take_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out;
    out.names = names;
    out.groups = groups;
    out.standardized = standardized;
    out.column_stats = column_stats;
    out.readability_stats = readability_stats;
    for (const auto i : indices) {
        out.ids.push_back(ids.at(i));
        out.labels.push_back(labels.at(i));
        out.rows.push_back(rows.at(i));
    }
    return out;
}

std::vector<std::string> FeatureMatrix::names_in(FeatureGroup group) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (groups[i] == group) out.push_back(names[i]);
    }
    return out;
}

FeatureFamilies FeatureFamilies::only_eigen() {
    FeatureFamilies f;
    f.keywords = f.sentiment = f.liwc = f.word_freq = f.char_freq = f.semantic = f.idioms = f.readability = false;
    f.eigen = true;
    return f;
}

// ---------------------------------------------------------------------------
// Registry and matrix construction

namespace {

constexpr std::string_view kFlagNoWords = "flag_no_words";
constexpr std::string_view kFlagNoSemantic = "flag_no_semantic_class";
constexpr std::string_view kFlagNoEmbedding = "flag_no_embedding";

std::vector<std::string> liwc_column_names(const LiwcDictionary& dict) {
    std::vector<std::string> out;
    std::set<std::string> used;
    for (const auto& [id, name] : dict.categories()) {
        std::string col = "liwc_" + name;
        if (!used.insert(col).second) {
            col += "_" + std::to_string(id);
            used.insert(col);
        }
        out.push_back(std::move(col));
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::string, FeatureGroup>> feature_registry(const FeatureConfig& config,
                                                                   const Resources& resources) {
    const auto& fam = config.families;
    std::vector<std::pair<std::string, FeatureGroup>> out;
    auto add = [&](std::string name, FeatureGroup g = FeatureGroup::Linguistic) {
        out.emplace_back(std::move(name), g);
    };
    if (fam.keywords) add("keyword_count");
    if (fam.sentiment) {
        add("sentiment_pos");
        add("sentiment_neg");
    }
    if (fam.liwc && resources.liwc) {
        for (auto& name : liwc_column_names(*resources.liwc)) add(std::move(name));
    }
    if (fam.any_linguistic()) add("WC");
    if (fam.word_freq) add("word_freq");
    if (fam.char_freq) add("char_freq");
    if (fam.semantic) add("semantic_ratio");
    if (fam.readability) {
        add("readability1");
        add("readability2");
    }
    if (fam.idioms) add("idiom_density");
    if (fam.eigen) {
        for (std::size_t i = 1; i <= config.eigen.k; ++i) add("eig_" + std::to_string(i), FeatureGroup::Eigen);
    }
    if (fam.word_freq || fam.readability) add(std::string(kFlagNoWords));
    if (fam.semantic || fam.readability) add(std::string(kFlagNoSemantic));
    if (fam.eigen) add(std::string(kFlagNoEmbedding), FeatureGroup::Eigen);
    return out;
}

std::vector<Token> tokens_for(const Post& post, const Resources& resources) {
    if (post.tokens) return *post.tokens;
    if (!resources.dictionary) throw ConfigError("post '" + post.id + "' needs segmentation but no dictionary is loaded");
    return segment(post.text, *resources.dictionary);
}

void check_resources(const FeatureConfig& config, const Resources& r, const Corpus& corpus) {
    const auto& fam = config.families;
    std::vector<std::string> missing;
    if (fam.keywords && r.keywords.empty()) missing.push_back("keywords");
    if (fam.sentiment && !r.sentiment) missing.push_back("sentiment");
    if (fam.liwc && !r.liwc) missing.push_back("liwc");
    if ((fam.word_freq || fam.readability) && !r.word_freq) missing.push_back("word_freq");
    if ((fam.char_freq || fam.readability) && !r.char_freq) missing.push_back("char_freq");
    if ((fam.semantic || fam.readability) && !r.thesaurus) missing.push_back("thesaurus");
    if (fam.eigen && !r.embeddings) missing.push_back("embeddings");
    const bool needs_tokens = fam.any_linguistic() || fam.eigen;
    if (needs_tokens && !r.dictionary) {
        for (const auto& p : corpus.posts()) {
            if (!p.tokens) {
                missing.push_back("dictionary");
                break;
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing resource(s) for enabled feature families:";
        for (const auto& m : missing) msg += " " + m;
        throw ConfigError(msg);
    }
    if (r.word_freq && r.word_freq->kind != FrequencyKind::Word) throw ConfigError("word_freq table is not word-kind");
    if (r.char_freq && r.char_freq->kind != FrequencyKind::Character) {
        throw ConfigError("char_freq table is not character-kind");
    }
    if (fam.eigen && config.eigen.k > r.embeddings->dim()) {
        throw ConfigError("eigen k=" + std::to_string(config.eigen.k) + " exceeds embedding dimension " +
                          std::to_string(r.embeddings->dim()));
    }
    if (fam.sentiment) r.sentiment->require(corpus);
}

FeatureMatrix build_matrix(const Corpus& corpus, const Resources& resources, const FeatureConfig& config,
                           const std::optional<ReadabilityStats>& readability) {
    check_resources(config, resources, corpus);
    const auto& fam = config.families;

    FeatureMatrix m;
    for (auto& [name, group] : feature_registry(config, resources)) {
        m.names.push_back(std::move(name));
        m.groups.push_back(group);
    }

    const bool need_components = fam.readability || fam.word_freq || fam.char_freq || fam.semantic || fam.idioms;
    std::vector<ReadabilityComponents> components;
    std::vector<std::vector<double>> partial;  // linguistic values before readability
    std::vector<std::array<bool, 3>> flags;    // no words, no semantic class, no embedding
    std::vector<EigenFeatures> eigen;
    std::vector<std::size_t> wcs;
    std::vector<double> keyword_counts;
    std::vector<SentimentScore> sentiments;
    std::vector<std::vector<double>> liwc;
    std::vector<double> idiom_density;

    for (const auto& post : corpus.posts()) {
        const auto tokens = tokens_for(post, resources);
        const std::size_t wc = word_count(tokens);
        wcs.push_back(wc);
        std::array<bool, 3> flag{wc == 0, false, false};

        if (fam.keywords) {
            double kc = f_keyword_count(post.text, post.date, resources.keywords);
            if (config.normalize_keywords) kc = wc ? kc / static_cast<double>(wc) : 0.0;
            keyword_counts.push_back(kc);
        }
        if (fam.sentiment) sentiments.push_back(f_sentiment(post, tokens, *resources.sentiment));
        if (fam.liwc) liwc.push_back(f_liwc(tokens, *resources.liwc).percent);

        if (need_components) {
            ReadabilityComponents c;
            if (resources.char_freq) c.char_freq = f_char_freq(post.text, *resources.char_freq).value;
            if (resources.word_freq) c.word_freq = f_word_freq(tokens, *resources.word_freq).value;
            if (resources.thesaurus) {
                const auto sr = f_semantic_ratio(tokens, *resources.thesaurus);
                c.semantic_ratio = sr.value;
                flag[1] = sr.degenerate;
            }
            const double idiom = f_idiom_density(tokens, resources.idioms ? &*resources.idioms : nullptr);
            idiom_density.push_back(idiom);
            c.inverse_idiom = inverse_idiom(idiom);
            components.push_back(c);
        }
        if (fam.eigen) {
            const auto filtered = resources.stopwords ? remove_stopwords(tokens, *resources.stopwords) : tokens;
            eigen.push_back(eigen_features(filtered, *resources.embeddings, config.eigen));
            flag[2] = eigen.back().degenerate;
        }
        flags.push_back(flag);
    }

    if (fam.readability) {
        if (config.readability_mode == ReadabilityMode::ZScored) {
            m.readability_stats = readability ? *readability : ReadabilityStats::fit(components);
        }
    }

    std::size_t no_embedding = 0;
    double captured = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& post = corpus[i];
        std::vector<double> row;
        row.reserve(m.names.size());
        if (fam.keywords) row.push_back(keyword_counts[i]);
        if (fam.sentiment) {
            row.push_back(sentiments[i].positive);
            row.push_back(sentiments[i].negative);
        }
        if (fam.liwc) row.insert(row.end(), liwc[i].begin(), liwc[i].end());
        if (fam.any_linguistic()) row.push_back(static_cast<double>(wcs[i]));
        if (fam.word_freq) row.push_back(components[i].word_freq);
        if (fam.char_freq) row.push_back(components[i].char_freq);
        if (fam.semantic) row.push_back(components[i].semantic_ratio);
        if (fam.readability) {
            const auto c = m.readability_stats ? m.readability_stats->apply(components[i]) : components[i];
            row.push_back(f_readability1(c.char_freq, c.word_freq, c.semantic_ratio));
            row.push_back(f_readability2(c.char_freq, c.word_freq, c.semantic_ratio, c.inverse_idiom));
        }
        if (fam.idioms) row.push_back(idiom_density[i]);
        if (fam.eigen) {
            row.insert(row.end(), eigen[i].values.begin(), eigen[i].values.end());
            captured += eigen[i].variance_captured;
            no_embedding += eigen[i].degenerate;
        }
        if (fam.word_freq || fam.readability) row.push_back(flags[i][0] ? 1.0 : 0.0);
        if (fam.semantic || fam.readability) row.push_back(flags[i][1] ? 1.0 : 0.0);
        if (fam.eigen) row.push_back(flags[i][2] ? 1.0 : 0.0);

        m.ids.push_back(post.id);
        m.labels.push_back(post.label);
        m.rows.push_back(std::move(row));
    }
    if (fam.eigen && !corpus.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "mean eigen variance captured %.4f; %zu post(s) without embeddings",
                      captured / static_cast<double>(corpus.size()), no_embedding);
        m.notes.emplace_back(buf);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Standardization

FeatureMatrix standardize(const FeatureMatrix& m, const StandardizeOptions& options) {
    std::vector<ColumnStats> stats(m.column_count());
    for (std::size_t c = 0; c < m.column_count(); ++c) {
        if (m.groups[c] == FeatureGroup::Eigen && !options.eigen_columns) {
            stats[c] = {0.0, 1.0, false, false};
            continue;
        }
        const auto values = m.column_values(c);
        const auto mom = population_moments(values);
        stats[c] = {mom.mean, mom.stdev, is_constant(mom), true};
    }
    auto out = apply_standardization(m, stats);
    for (std::size_t c = 0; c < m.column_count(); ++c) {
        if (stats[c].constant) out.notes.push_back("constant column '" + m.names[c] + "' standardized to 0");
    }
    return out;
}

FeatureMatrix apply_standardization(const FeatureMatrix& m, std::span<const ColumnStats> stats) {
    if (stats.size() != m.column_count()) throw UsageError("column statistics do not match matrix width");
    FeatureMatrix out = m;
    for (auto& row : out.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const auto& s = stats[c];
            if (!s.applied) continue;
            row[c] = s.constant ? 0.0 : (row[c] - s.mean) / s.stdev;
        }
    }
    out.standardized = true;
    out.column_stats.assign(stats.begin(), stats.end());
    return out;
}

// ---------------------------------------------------------------------------
// CSV and JSON

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> parse_csv_line(std::string_view line, const std::string& source, std::size_t lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError(source, lineno, "unterminated quote");
    out.push_back(std::move(cur));
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FeatureGroup group_for(std::string_view name) {
    return name.starts_with("eig_") || name == kFlagNoEmbedding ? FeatureGroup::Eigen : FeatureGroup::Linguistic;
}

}  // namespace

void write_csv(const FeatureMatrix& m, std::ostream& out) {
    out << "id,label";
    for (const auto& n : m.names) out << ',' << csv_field(n);
    out << '\n';
    for (std::size_t r = 0; r < m.row_count(); ++r) {
        out << csv_field(m.ids[r]) << ',' << label_name(m.labels[r]);
        for (const double v : m.rows[r]) out << ',' << format_double(v);
        out << '\n';
    }
}

FeatureMatrix read_csv(std::istream& in, const std::string& source) {
    FeatureMatrix m;
    bool header = false;
    detail::for_each_line(in, [&](std::size_t lineno, std::string_view line) {
        if (line.empty()) return;
        auto fields = parse_csv_line(line, source, lineno);
        if (!header) {
            if (fields.size() < 2 || fields[0] != "id" || fields[1] != "label") {
                throw ParseError(source, lineno, "header must start with 'id,label'");
            }
            for (std::size_t i = 2; i < fields.size(); ++i) {
                m.groups.push_back(group_for(fields[i]));
                m.names.push_back(std::move(fields[i]));
            }
            header = true;
            return;
        }
        if (fields.size() != m.names.size() + 2) throw ParseError(source, lineno, "wrong number of fields");
        const auto label = parse_label(fields[1]);
        if (!label) throw ParseError(source, lineno, "unknown label '" + fields[1] + "'");
        std::vector<double> row;
        row.reserve(m.names.size());
        for (std::size_t i = 2; i < fields.size(); ++i) row.push_back(detail::parse_double(fields[i], source, lineno));
        m.ids.push_back(std::move(fields[0]));
        m.labels.push_back(*label);
        m.rows.push_back(std::move(row));
    });
    if (!header) throw ParseError(source, 0, "empty feature matrix file");
    return m;
}

namespace detail {

namespace {

json components_json(const ReadabilityComponents& c) {
    return {{"char_freq", c.char_freq},
            {"word_freq", c.word_freq},
            {"semantic_ratio", c.semantic_ratio},
            {"inverse_idiom", c.inverse_idiom}};
}

ReadabilityComponents parse_components(const json& j) {
    return {j.at("char_freq").get<double>(), j.at("word_freq").get<double>(), j.at("semantic_ratio").get<double>(),
            j.at("inverse_idiom").get<double>()};
}

}  // namespace

json column_stats_json(const FeatureMatrix& m) {
    json j;
    j["names"] = m.names;
    json cols = json::array();
    for (const auto& s : m.column_stats) {
        cols.push_back({{"mean", s.mean}, {"stdev", s.stdev}, {"constant", s.constant}, {"applied", s.applied}});
    }
    j["columns"] = std::move(cols);
    if (m.readability_stats) {
        j["readability"] = {{"mean", components_json(m.readability_stats->mean)},
                            {"stdev", components_json(m.readability_stats->stdev)}};
    }
    return j;
}

void parse_column_stats(const json& j, std::vector<std::string>& names, std::vector<ColumnStats>& stats,
                        std::optional<ReadabilityStats>& readability) {
    names = j.at("names").get<std::vector<std::string>>();
    stats.clear();
    for (const auto& c : j.at("columns")) {
        stats.push_back({c.at("mean").get<double>(), c.at("stdev").get<double>(), c.at("constant").get<bool>(),
                         c.at("applied").get<bool>()});
    }
    readability.reset();
    if (const auto it = j.find("readability"); it != j.end()) {
        readability = ReadabilityStats{parse_components(it->at("mean")), parse_components(it->at("stdev"))};
    }
}

json feature_config_json(const FeatureConfig& config) {
    const auto& f = config.families;
    return {{"families",
             {{"keywords", f.keywords},
              {"sentiment", f.sentiment},
              {"liwc", f.liwc},
              {"word_freq", f.word_freq},
              {"char_freq", f.char_freq},
              {"semantic", f.semantic},
              {"idioms", f.idioms},
              {"readability", f.readability},
              {"eigen", f.eigen}}},
            {"eigen_k", config.eigen.k},
            {"eigen_selection", config.eigen.selection == EigenSelection::Largest ? "largest" : "smallest"},
            {"covariance_divisor", config.eigen.divisor == CovarianceDivisor::Sample ? "sample" : "population"},
            {"readability_mode", config.readability_mode == ReadabilityMode::ZScored ? "zscored" : "raw"},
            {"normalize_keywords", config.normalize_keywords}};
}

FeatureConfig parse_feature_config(const json& j) {
    FeatureConfig c;
    const auto& f = j.at("families");
    c.families.keywords = f.at("keywords").get<bool>();
    c.families.sentiment = f.at("sentiment").get<bool>();
    c.families.liwc = f.at("liwc").get<bool>();
    c.families.word_freq = f.at("word_freq").get<bool>();
    c.families.char_freq = f.at("char_freq").get<bool>();
    c.families.semantic = f.at("semantic").get<bool>();
    c.families.idioms = f.at("idioms").get<bool>();
    c.families.readability = f.at("readability").get<bool>();
    c.families.eigen = f.at("eigen").get<bool>();
    c.eigen.k = j.at("eigen_k").get<std::size_t>();
    c.eigen.selection = j.at("eigen_selection").get<std::string>() == "smallest" ? EigenSelection::Smallest
                                                                                 : EigenSelection::Largest;
    c.eigen.divisor = j.at("covariance_divisor").get<std::string>() == "population" ? CovarianceDivisor::Population
                                                                                    : CovarianceDivisor::Sample;
    c.readability_mode = j.at("readability_mode").get<std::string>() == "raw" ? ReadabilityMode::Raw
                                                                              : ReadabilityMode::ZScored;
    c.normalize_keywords = j.at("normalize_keywords").get<bool>();
    return c;
}

}  // namespace detail

std::string stats_to_json(const FeatureMatrix& m) {
    return detail::column_stats_json(m).dump(2);
}

void stats_from_json(const std::string& text, FeatureMatrix& m) {
    std::vector<std::string> names;
    std::vector<ColumnStats> stats;
    std::optional<ReadabilityStats> readability;
    detail::parse_column_stats(json::parse(text), names, stats, readability);
    if (names != m.names) throw UsageError("column statistics were computed for different feature names");
    if (!stats.empty() && stats.size() != names.size()) throw UsageError("column statistics are incomplete");
    m.column_stats = std::move(stats);
    m.readability_stats = readability;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UsageError("pearson: length mismatch");
    if (x.size() < 2) return 0.0;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace censorpred
