#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "censorpred/corpus.hpp"
#include "censorpred/features.hpp"

namespace censorpred {

/// Maps a model's feature names onto matrix columns by name, so predictions
/// do not depend on column order.
class ColumnBinding {
public:
    /// Throws UsageError listing model features absent from `available`.
    ColumnBinding(std::span<const std::string> model_names, std::span<const std::string> available);

    std::vector<double> gather(std::span<const double> row) const;

private:
    std::vector<std::size_t> columns_;
};

struct Prediction {
    Label label = Label::Censored;
    /// NB: log P(censored|x) - log P(uncensored|x). SVM: the margin w.x + b.
    double score = 0.0;
    /// Normalised log-posteriors in class order (NB only).
    std::array<double, 2> log_posterior{};
};

// ---------------------------------------------------------------------------
// Gaussian Naive Bayes

struct NaiveBayesModel {
    std::vector<std::string> feature_names;
    std::array<double, 2> priors{};                       // indexed by Label
    std::array<std::vector<double>, 2> means;             // [class][feature]
    std::array<std::vector<double>, 2> variances;         // [class][feature], >= variance_floor
    double variance_floor = 0.0;
};

/// Per-class sample mean and variance per feature, frequency priors.
/// Throws UsageError unless both classes are present.
NaiveBayesModel nb_train(const FeatureMatrix& m);

/// `values` are in model feature order. Ties go to the earlier class
/// (Censored).
Prediction nb_predict(const NaiveBayesModel& model, std::span<const double> values);

// ---------------------------------------------------------------------------
// Linear SVM trained by SMO

struct SvmOptions {
    double C = 1.0;
    double tolerance = 1e-3;   // KKT tolerance
    double alpha_eps = 1e-12;  // smallest accepted multiplier change (relative)
    std::uint64_t seed = 0;    // random starting points of the second-choice loops
    std::size_t max_passes = 100000;
};

struct SvmModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0.0;
    double C = 1.0;
    double tolerance = 1e-3;
    std::size_t support_count = 0;
    std::vector<double> alphas;  // dual multipliers in training-row order
    bool converged = true;
};

/// Platt's SMO with the first-choice (KKT violators, non-bound first) and
/// second-choice (max |E1 - E2|, then randomised scans) heuristics.
/// Censored is the +1 class. Throws UsageError on empty or single-class data.
SvmModel svm_train(const FeatureMatrix& m, const SvmOptions& options = {});

/// Margin exactly 0 predicts Censored (the +1 class).
Prediction svm_predict(const SvmModel& model, std::span<const double> values);

/// Sum(alpha) - 1/2 |sum(alpha_i y_i x_i)|^2 for a linear kernel.
double svm_dual_objective(const FeatureMatrix& m, std::span<const double> alphas);

// ---------------------------------------------------------------------------
// Persistence

using Model = std::variant<NaiveBayesModel, SvmModel>;

const std::vector<std::string>& feature_names(const Model& model);
Prediction predict(const Model& model, std::span<const double> values);

inline constexpr int kModelFormatVersion = 1;

/// A model plus what is needed to featurize and standardize new posts.
struct ModelFile {
    Model model;
    std::string training_config;  // JSON object text
    std::vector<ColumnStats> column_stats;  // aligned with feature names, may be empty
    std::optional<ReadabilityStats> readability;
};

void save_model(const ModelFile& file, std::ostream& out);
void save_model(const ModelFile& file, const std::string& path);
/// Throws ParseError on corrupt files, unknown type tags or version mismatch.
ModelFile load_model(std::istream& in, const std::string& source = "<stream>");
ModelFile load_model(const std::string& path);

}  // namespace censorpred
