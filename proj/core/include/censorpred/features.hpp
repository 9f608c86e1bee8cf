#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "censorpred/corpus.hpp"
#include "censorpred/embeddings.hpp"
#include "censorpred/lexicons.hpp"
#include "censorpred/tokenizer.hpp"

namespace censorpred {

// ---------------------------------------------------------------------------
// Sentiment providers

struct SentimentScore {
    double positive = 0.5;
    double negative = 0.5;
};

class SentimentProvider {
public:
    virtual ~SentimentProvider() = default;
    virtual SentimentScore score(const Post& post, const std::vector<Token>& tokens) const = 0;
    /// Throws ConfigError listing every post the provider cannot score.
    virtual void require(const Corpus& corpus) const { (void)corpus; }
};

/// Precomputed scores keyed by post id.
class ScoreFileSentiment final : public SentimentProvider {
public:
    explicit ScoreFileSentiment(std::unordered_map<std::string, SentimentScore> scores);

    /// CSV "id,positive,negative" with an optional header row. Each pair is
    /// normalised to sum to 1.
    static ScoreFileSentiment load(const std::string& path);

    SentimentScore score(const Post& post, const std::vector<Token>& tokens) const override;
    void require(const Corpus& corpus) const override;

private:
    std::unordered_map<std::string, SentimentScore> scores_;
};

/// positive = posHits / (posHits + negHits); (0.5, 0.5) without hits.
class LexiconSentiment final : public SentimentProvider {
public:
    explicit LexiconSentiment(SentimentLexicon lexicon) : lexicon_(std::move(lexicon)) {}
    SentimentScore score(const Post& post, const std::vector<Token>& tokens) const override;

private:
    SentimentLexicon lexicon_;
};

// ---------------------------------------------------------------------------
// Per-post feature functions

std::size_t word_count(const std::vector<Token>& tokens);

/// Sum over the distinct terms of the applicable lists of their
/// non-overlapping occurrence counts in `text`.
double f_keyword_count(std::string_view text, const std::optional<std::string>& date,
                       std::span<const KeywordList> lists);

SentimentScore f_sentiment(const Post& post, const std::vector<Token>& tokens, const SentimentProvider& provider);

struct LiwcFeatures {
    std::vector<double> percent;  // one per category, ascending id order
    std::size_t word_count = 0;
};

LiwcFeatures f_liwc(const std::vector<Token>& tokens, const LiwcDictionary& dict);

/// A value plus a flag raised when the input had nothing to measure.
struct Measured {
    double value = 0.0;
    bool degenerate = false;
};

Measured f_word_freq(const std::vector<Token>& tokens, const FrequencyTable& table);
Measured f_char_freq(std::string_view text, const FrequencyTable& table);
Measured f_semantic_ratio(const std::vector<Token>& tokens, const SemanticThesaurus& th);
/// Idioms are tokens tagged "i" or listed in `idioms` (which may be null).
double f_idiom_density(const std::vector<Token>& tokens, const IdiomList* idioms);

inline constexpr double kIdiomDensityFloor = 0.01;

/// 1 / max(density, 0.01).
double inverse_idiom(double idiom_density);

enum class ReadabilityMode { ZScored, Raw };

struct ReadabilityComponents {
    double char_freq = 0.0;
    double word_freq = 0.0;
    double semantic_ratio = 0.0;
    double inverse_idiom = 0.0;
};

/// Mean of the three frequency/semantic components.
double f_readability1(double char_freq, double word_freq, double semantic_ratio);
/// Mean of the three components and the inverse idiom density.
double f_readability2(double char_freq, double word_freq, double semantic_ratio, double inverse_idiom);

/// Corpus statistics used to z-score readability components; stored with a
/// matrix so held-out posts are scored on the training corpus scale.
struct ReadabilityStats {
    ReadabilityComponents mean;
    ReadabilityComponents stdev;

    static ReadabilityStats fit(std::span<const ReadabilityComponents> rows);
    ReadabilityComponents apply(const ReadabilityComponents& c) const;
};

// ---------------------------------------------------------------------------
// Feature matrix

enum class FeatureGroup { Linguistic, Eigen };

struct ColumnStats {
    double mean = 0.0;
    double stdev = 1.0;
    bool constant = false;
    bool applied = true;  // false when standardization skipped this column
};

class FeatureMatrix {
public:
    std::vector<std::string> names;
    std::vector<FeatureGroup> groups;
    std::vector<std::string> ids;
    std::vector<Label> labels;
    std::vector<std::vector<double>> rows;
    bool standardized = false;
    std::vector<ColumnStats> column_stats;  // filled by standardize()
    std::optional<ReadabilityStats> readability_stats;
    std::vector<std::string> notes;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t column_count() const noexcept { return names.size(); }

    /// Index of `name`; throws UsageError naming an unknown feature.
    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
    std::vector<double> column_values(std::size_t col) const;

    /// Copy restricted to `subset` columns in the given order.
    FeatureMatrix select(const std::vector<std::string>& subset) const;
    /// Copy restricted to the given rows.
    FeatureMatrix take_rows(std::span<const std::size_t> indices) const;

    std::vector<std::string> names_in(FeatureGroup group) const;
};

struct FeatureFamilies {
    bool keywords = true;
    bool sentiment = true;
    bool liwc = true;
    bool word_freq = true;
    bool char_freq = true;
    bool semantic = true;
    bool idioms = true;
    bool readability = true;
    bool eigen = true;

    bool any_linguistic() const {
        return keywords || sentiment || liwc || word_freq || char_freq || semantic || idioms || readability;
    }
    static FeatureFamilies only_eigen();
};

struct FeatureConfig {
    FeatureFamilies families;
    EigenOptions eigen;
    ReadabilityMode readability_mode = ReadabilityMode::ZScored;
    bool normalize_keywords = false;  // divide keyword count by word count
};

struct Resources {
    std::optional<SegmenterDictionary> dictionary;
    std::vector<KeywordList> keywords;
    std::shared_ptr<const SentimentProvider> sentiment;
    std::optional<LiwcDictionary> liwc;
    std::optional<FrequencyTable> word_freq;
    std::optional<FrequencyTable> char_freq;
    std::optional<SemanticThesaurus> thesaurus;
    std::optional<IdiomList> idioms;
    std::optional<StopwordSet> stopwords;
    std::optional<EmbeddingTable> embeddings;
};

/// Pretokenized tokens when present, otherwise dictionary segmentation.
std::vector<Token> tokens_for(const Post& post, const Resources& resources);

/// Column names in registry order for the given configuration.
std::vector<std::pair<std::string, FeatureGroup>> feature_registry(const FeatureConfig& config,
                                                                   const Resources& resources);

/// Throws ConfigError when an enabled family lacks its resource.
void check_resources(const FeatureConfig& config, const Resources& resources, const Corpus& corpus);

/// Raw (unstandardized) features, one row per post in corpus order. When
/// `readability` is given it is used to z-score readability components
/// instead of statistics fitted on `corpus`.
FeatureMatrix build_matrix(const Corpus& corpus, const Resources& resources, const FeatureConfig& config,
                           const std::optional<ReadabilityStats>& readability = std::nullopt);

struct StandardizeOptions {
    bool eigen_columns = true;
};

/// Per-column z-score with population stdev; constant columns become zeros.
FeatureMatrix standardize(const FeatureMatrix& m, const StandardizeOptions& options = {});
/// Applies previously fitted statistics (e.g. training-fold statistics to a
/// test fold). `stats` must have one entry per column.
FeatureMatrix apply_standardization(const FeatureMatrix& m, std::span<const ColumnStats> stats);

void write_csv(const FeatureMatrix& m, std::ostream& out);
/// Reads a matrix written by write_csv. Column groups are inferred from names.
FeatureMatrix read_csv(std::istream& in, const std::string& source = "<stream>");

/// Column statistics sidecar (names, per-column stats, readability stats).
std::string stats_to_json(const FeatureMatrix& m);
/// Restores column_stats and readability_stats into a matrix with the same
/// names. Throws UsageError on a name mismatch.
void stats_from_json(const std::string& text, FeatureMatrix& m);

/// Sample Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace censorpred
