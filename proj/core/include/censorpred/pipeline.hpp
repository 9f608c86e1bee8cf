#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "censorpred/analysis.hpp"
#include "censorpred/corpus.hpp"
#include "censorpred/diagnostic.hpp"
#include "censorpred/features.hpp"

namespace censorpred {

/// Resource locations. Relative paths in a config file are resolved against
/// the directory holding that file.
struct ResourcePaths {
    std::string corpus;
    std::string dictionary;
    std::vector<std::string> keywords;
    std::string sentiment_scores;   // CSV id,positive,negative
    std::string sentiment_lexicon;  // used when no score file is given
    std::string liwc;
    std::string word_freq;
    std::string char_freq;
    std::string thesaurus;
    std::string idioms;
    std::string stopwords;
    std::string embeddings;
};

struct PipelineConfig {
    ResourcePaths paths;
    FeatureConfig features;
    std::vector<std::string> topics;  // empty = whole corpus
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    ModelSpec model;
    StandardizationMode standardization = StandardizationMode::PerFold;
    StandardizeOptions standardize;
    BinningOptions binning;
    std::optional<std::size_t> best_top_n;
    long long rare_count = kDefaultRareCount;
};

/// Parses a JSON config. Missing keys keep their defaults; unknown keys and
/// malformed values throw ConfigError.
PipelineConfig parse_config(std::string_view json_text, const std::string& base_dir = "");
PipelineConfig load_config(const std::string& path);
/// Canonical JSON form of the effective config; echoed into every output.
std::string config_to_json(const PipelineConfig& config);

/// Throws ConfigError naming every enabled family without a resource path.
/// Cheap: touches no files.
void validate_config(const PipelineConfig& config);

struct LoadedResources {
    Resources resources;
    std::vector<Diagnostic> diagnostics;
};

/// Loads every configured resource. Load failures propagate as Error with
/// path and line.
LoadedResources load_resources(const PipelineConfig& config);

/// Loads the corpus and applies the topic filter.
CorpusLoad load_pipeline_corpus(const PipelineConfig& config);

/// Column names for a feature-set spec: "all", "eigen", "linguistic", "best"
/// or a comma-separated list of names. "best" needs `ranking`.
std::vector<std::string> resolve_feature_set(const FeatureMatrix& m, std::string_view spec,
                                             const FeatureRanking* ranking, std::optional<std::size_t> top_n);

struct GridEntry {
    ModelKind model = ModelKind::NaiveBayes;
    std::string features;  // feature-set spec
};

/// "nb:all,svm:best,..." ; "default" expands to the eight model x set rows.
std::vector<GridEntry> parse_grid(std::string_view text);

/// Row label such as "NB all (147)" or "SMO best features (17)".
std::string row_name(ModelKind model, std::string_view set, std::size_t count);

/// One report per grid entry, in grid order.
std::vector<EvalReport> run_grid(const FeatureMatrix& m, const std::vector<GridEntry>& grid,
                                 const PipelineConfig& config);

}  // namespace censorpred
