#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "censorpred/diagnostic.hpp"
#include "censorpred/tokenizer.hpp"

namespace censorpred {

/// Dense square matrix, row-major.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    SquareMatrix(std::size_t n, std::vector<double> data);

    static SquareMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    std::span<const double> data() const noexcept { return data_; }

    double trace() const;
    double max_abs() const;

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }

    /// Inserts or replaces. Throws UsageError on wrong arity.
    void set(std::string word, std::vector<double> vector);
    const std::vector<double>* find(const std::string& word) const;

private:
    std::size_t dim_;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct EmbeddingLoad {
    EmbeddingTable table;
    std::vector<Diagnostic> diagnostics;
};

/// word2vec text format: header "vocabSize dim", then "word v1 ... v_dim".
/// Rows with the wrong arity are skipped into diagnostics; duplicate words
/// keep the last occurrence. Throws ParseError on a bad header.
EmbeddingLoad load_embeddings(const std::string& path);

enum class CovarianceDivisor { Sample, Population };

struct DocumentCovariance {
    SquareMatrix matrix;
    std::size_t words_used = 0;
    bool degenerate = false;  // fewer than two in-vocabulary words
};

/// Covariance of the in-vocabulary word vectors of `tokens`; tokens without
/// a vector are skipped.
DocumentCovariance doc_covariance(const std::vector<Token>& tokens, const EmbeddingTable& table,
                                  CovarianceDivisor divisor = CovarianceDivisor::Sample);

/// Cyclic Jacobi rotations until the largest off-diagonal magnitude drops
/// below `tol` (default 1e-10 * max|entry|, at least 1e-12). Returns all
/// eigenvalues in descending order. Throws UsageError when `m` is not
/// symmetric within the same tolerance.
std::vector<double> symmetric_eigenvalues(const SquareMatrix& m, std::optional<double> tol = std::nullopt);

enum class EigenSelection { Largest, Smallest };

struct EigenOptions {
    std::size_t k = 40;
    EigenSelection selection = EigenSelection::Largest;
    CovarianceDivisor divisor = CovarianceDivisor::Sample;
    /// Always diagonalise the dim x dim covariance, even when the
    /// words x words Gram matrix has the same non-zero spectrum and is smaller.
    bool force_covariance = false;
};

struct EigenFeatures {
    std::vector<double> values;  // length k, non-increasing for Largest
    double variance_captured = 0.0;
    bool degenerate = false;
    std::size_t words_used = 0;
};

/// Top-k (or bottom-k) covariance eigenvalues, clamped at zero and
/// zero-padded. variance_captured = sum(values) / trace, 0 when trace is 0.
EigenFeatures eigen_features(const std::vector<Token>& tokens, const EmbeddingTable& table,
                             const EigenOptions& options = {});

}  // namespace censorpred
