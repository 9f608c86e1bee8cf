#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "censorpred/corpus.hpp"
#include "censorpred/diagnostic.hpp"
#include "censorpred/features.hpp"
#include "censorpred/models.hpp"

namespace censorpred {

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified k-fold: each class is shuffled with `seed` and dealt
/// round-robin over the folds, continuing where the previous class stopped.
/// Throws UsageError when k < 2 or a class has fewer than k members.
std::vector<FoldSplit> stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

enum class ModelKind { NaiveBayes, Svm };

struct ModelSpec {
    ModelKind kind = ModelKind::NaiveBayes;
    SvmOptions svm;
};

enum class StandardizationMode {
    PerFold,  // statistics from each training fold, applied to its test fold
    Global,   // statistics from the whole matrix before splitting
    None,
};

struct ConfusionMatrix {
    /// counts[actual][predicted], indexed by Label.
    std::array<std::array<std::size_t, 2>, 2> counts{};

    std::size_t total() const;
    double accuracy() const;
    double precision(Label c) const;
    double recall(Label c) const;
    double f1(Label c) const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct FoldReport {
    std::size_t fold = 0;
    std::size_t test_size = 0;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
};

struct EvalReport {
    std::string name;  // row label, e.g. "NB all (147)"
    ModelSpec model;
    std::vector<std::string> features;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    StandardizationMode standardization = StandardizationMode::PerFold;

    ConfusionMatrix confusion;  // pooled over folds
    double accuracy = 0.0;
    std::array<ClassMetrics, 2> per_class{};
    double majority_baseline = 0.0;
    std::vector<FoldReport> per_fold;
};

struct EvalOptions {
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    StandardizationMode standardization = StandardizationMode::PerFold;
    StandardizeOptions standardize;
};

/// k-fold evaluation of one model on a raw matrix restricted to `features`
/// (empty = all columns). Throws UsageError for unknown feature names.
EvalReport evaluate(const FeatureMatrix& m, const ModelSpec& spec, const std::vector<std::string>& features,
                    const EvalOptions& options);

double majority_baseline(std::span<const Label> labels);

// ---------------------------------------------------------------------------
// Information gain

enum class BinningMode {
    EqualWidth,      // `bins` equal-width intervals over the observed range
    EqualFrequency,  // rank-based bins; ties share a bin
    Mdl,             // supervised entropy/MDL cut points (Fayyad & Irani)
};

struct BinningOptions {
    BinningMode mode = BinningMode::EqualWidth;
    std::size_t bins = 10;
};

/// Bin index per value.
std::vector<std::size_t> discretize(std::span<const double> values, std::span<const Label> labels,
                                    const BinningOptions& options);

/// Class entropy in bits.
double class_entropy(std::span<const Label> labels);

/// H(class) - sum_b p(b) H(class | b), in bits; 0 for a constant feature.
double info_gain(std::span<const double> values, std::span<const Label> labels, const BinningOptions& options = {});
double info_gain(const FeatureMatrix& m, std::string_view feature, const BinningOptions& options = {});

struct RankedFeature {
    std::string name;
    double info_gain = 0.0;  // mean over folds, bits
};

struct FeatureRanking {
    std::vector<RankedFeature> features;  // non-increasing gain
    BinningOptions binning;
    std::size_t folds = 0;
    std::uint64_t seed = 0;

    /// Features with mean gain > 0, or the first `top_n` when given.
    std::vector<std::string> best(std::optional<std::size_t> top_n = std::nullopt) const;
};

/// Mean information gain over the training parts of stratified folds.
FeatureRanking rank_features(const FeatureMatrix& m, const BinningOptions& binning, std::size_t folds,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Contrast

/// mean(feature | uncensored) - mean(feature | censored); positive values
/// indicate association with the uncensored class.
std::map<std::string, double> contrast(const FeatureMatrix& m, const std::vector<std::string>& features);

// ---------------------------------------------------------------------------
// Annotation statistics

enum class Judgment { Yes, No };  // Yes = "this post was censored"

struct AnnotationSet {
    /// (annotator, item) -> judgment.
    std::map<std::pair<std::string, std::string>, Judgment> judgments;
    std::map<std::string, Label> gold;
};

/// CSV "annotator,item,judgment" with judgment yes/no (case-insensitive);
/// an optional header row is skipped. Gold labels come from `corpus`.
AnnotationSet load_annotations(const std::string& path, const Corpus& corpus);

struct HumanBaseline {
    double pooled_accuracy = 0.0;        // correct judgments / all judgments
    double per_annotator_accuracy = 0.0; // mean of each annotator's accuracy
    double majority_vote_accuracy = 0.0; // item-level; split votes count 1/2
    std::size_t judgments = 0;
    std::size_t annotators = 0;
    std::size_t items = 0;
};

/// Throws UsageError when a judged item has no gold label.
HumanBaseline human_baseline(const AnnotationSet& a);

struct KappaResult {
    double mean_kappa = 0.0;
    std::size_t pairs = 0;
    std::vector<Diagnostic> notes;
};

/// Cohen's kappa for one pair over `n` co-judged items with `agree`
/// agreements and `yes_a`, `yes_b` Yes counts. Undefined (pe = 1) gives 1
/// for perfect agreement and 0 otherwise; `undefined` reports that case.
double cohen_kappa_pair(std::size_t n, std::size_t agree, std::size_t yes_a, std::size_t yes_b,
                        bool* undefined = nullptr);

/// Unweighted mean of pairwise kappas over annotator pairs sharing at least
/// one item. Throws UsageError when no pair overlaps.
KappaResult cohen_kappa(const AnnotationSet& a);

// ---------------------------------------------------------------------------
// Reports

std::string model_kind_name(ModelKind kind);
/// Machine-readable form; stable key order and number formatting.
std::string reports_to_json(const std::vector<EvalReport>& reports, const std::string& config_json);
/// Table with Acc and per-class Pre/Rec/F1, plus the majority baseline row.
void print_reports(const std::vector<EvalReport>& reports, std::ostream& out);

std::string ranking_to_json(const FeatureRanking& ranking);
void print_ranking(const FeatureRanking& ranking, std::ostream& out, std::size_t limit = 0);

}  // namespace censorpred
