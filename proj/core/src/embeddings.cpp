#include "censorpred/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "censorpred/error.hpp"
#include "text_io.hpp"

namespace censorpred {

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
    if (data_.size() != n * n) throw UsageError("matrix data size does not match dimension");
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double SquareMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SquareMatrix::max_abs() const {
    double m = 0.0;
    for (const double v : data_) m = std::max(m, std::abs(v));
    return m;
}

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw UsageError("embedding dimension must be positive");
}

void EmbeddingTable::set(std::string word, std::vector<double> vector) {
    if (vector.size() != dim_) throw UsageError("embedding for '" + word + "' has wrong dimension");
    vectors_.insert_or_assign(std::move(word), std::move(vector));
}

const std::vector<double>* EmbeddingTable::find(const std::string& word) const {
    const auto it = vectors_.find(word);
    return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingLoad load_embeddings(const std::string& path) {
    std::optional<EmbeddingTable> table;
    std::vector<Diagnostic> diagnostics;
    long long declared = 0;
    std::unordered_map<std::string, std::size_t> seen_at;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        const auto fields = detail::split_ws(line);
        if (!table) {
            if (fields.size() != 2) throw ParseError(path, lineno, "missing 'vocabSize dim' header");
            declared = detail::parse_int(fields[0], path, lineno);
            const auto dim = detail::parse_int(fields[1], path, lineno);
            if (dim <= 0) throw ParseError(path, lineno, "dimension must be positive");
            table.emplace(static_cast<std::size_t>(dim));
            return;
        }
        if (fields.empty()) return;
        std::string word(fields[0]);
        if (fields.size() != table->dim() + 1) {
            diagnostics.push_back({path, lineno, word,
                                   "expected " + std::to_string(table->dim()) + " values, got " +
                                       std::to_string(fields.size() - 1)});
            return;
        }
        std::vector<double> v(table->dim());
        try {
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = detail::parse_double(fields[i + 1], path, lineno);
        } catch (const ParseError& e) {
            diagnostics.push_back({path, lineno, word, e.what()});
            return;
        }
        if (const auto it = seen_at.find(word); it != seen_at.end()) {
            diagnostics.push_back({path, lineno, word,
                                   "duplicate word; replaces line " + std::to_string(it->second)});
        }
        seen_at[word] = lineno;
        table->set(std::move(word), std::move(v));
    });
    if (!table) throw ParseError(path, 0, "missing 'vocabSize dim' header");
    if (declared >= 0 && static_cast<std::size_t>(declared) != table->size()) {
        diagnostics.push_back({path, 1, "",
                               "header declares " + std::to_string(declared) + " words, loaded " +
                                   std::to_string(table->size())});
    }
    return {std::move(*table), std::move(diagnostics)};
}

namespace {

/// Rows of in-vocabulary vectors, centred on their mean.
std::vector<std::vector<double>> centred_vectors(const std::vector<Token>& tokens, const EmbeddingTable& table) {
    std::vector<std::vector<double>> rows;
    for (const auto& t : tokens) {
        if (const auto* v = table.find(t.surface)) rows.push_back(*v);
    }
    if (rows.empty()) return rows;
    std::vector<double> mean(table.dim(), 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += r[j];
    }
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    for (auto& r : rows) {
        for (std::size_t j = 0; j < mean.size(); ++j) r[j] -= mean[j];
    }
    return rows;
}

double divisor_for(std::size_t n, CovarianceDivisor divisor) {
    return divisor == CovarianceDivisor::Sample ? static_cast<double>(n - 1) : static_cast<double>(n);
}

}  // namespace

DocumentCovariance doc_covariance(const std::vector<Token>& tokens, const EmbeddingTable& table,
                                  CovarianceDivisor divisor) {
    const auto rows = centred_vectors(tokens, table);
    const std::size_t d = table.dim();
    DocumentCovariance out{SquareMatrix(d), rows.size(), rows.size() <= 1};
    if (out.degenerate) return out;
    const double denom = divisor_for(rows.size(), divisor);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (const auto& r : rows) s += r[i] * r[j];
            out.matrix(i, j) = s / denom;
            out.matrix(j, i) = out.matrix(i, j);
        }
    }
    return out;
}

std::vector<double> symmetric_eigenvalues(const SquareMatrix& input, std::optional<double> tol) {
    const std::size_t n = input.size();
    const double threshold = tol.value_or(std::max(1e-10 * input.max_abs(), 1e-12));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(input(i, j) - input(j, i)) > threshold) {
                throw UsageError("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }

    SquareMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
    }

    auto max_off_diagonal = [&] {
        double m = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) m = std::max(m, std::abs(a(p, q)));
        }
        return m;
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && max_off_diagonal() >= threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < threshold) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                // Smaller root of t^2 + 2 t theta - 1 = 0.
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(p, r);
                    const double arq = a(q, r);
                    const double np = c * arp - s * arq;
                    const double nq = s * arp + c * arq;
                    a(p, r) = np;
                    a(r, p) = np;
                    a(q, r) = nq;
                    a(r, q) = nq;
                }
            }
        }
    }

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    std::sort(values.begin(), values.end(), std::greater<>());
    return values;
}

EigenFeatures eigen_features(const std::vector<Token>& tokens, const EmbeddingTable& table,
                             const EigenOptions& options) {
    const std::size_t d = table.dim();
    if (options.k > d) throw UsageError("k exceeds embedding dimension");

    EigenFeatures out;
    out.values.assign(options.k, 0.0);

    const auto rows = centred_vectors(tokens, table);
    out.words_used = rows.size();
    out.degenerate = rows.size() <= 1;
    if (out.degenerate) return out;

    // The non-zero spectrum of X^T X / m (d x d) equals that of X X^T / m
    // (n x n), so small documents are diagonalised in word space.
    std::vector<double> spectrum;
    double trace = 0.0;
    const std::size_t n = rows.size();
    if (n < d && !options.force_covariance) {
        const double denom = divisor_for(n, options.divisor);
        SquareMatrix gram(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const double s = std::inner_product(rows[i].begin(), rows[i].end(), rows[j].begin(), 0.0) / denom;
                gram(i, j) = s;
                gram(j, i) = s;
            }
        }
        trace = gram.trace();
        spectrum = symmetric_eigenvalues(gram);
        spectrum.resize(d, 0.0);
        std::sort(spectrum.begin(), spectrum.end(), std::greater<>());
    } else {
        const auto cov = doc_covariance(tokens, table, options.divisor);
        trace = cov.matrix.trace();
        spectrum = symmetric_eigenvalues(cov.matrix);
    }

    for (auto& v : spectrum) v = std::max(v, 0.0);
    if (options.selection == EigenSelection::Largest) {
        std::copy_n(spectrum.begin(), options.k, out.values.begin());
    } else {
        std::copy_n(spectrum.end() - static_cast<std::ptrdiff_t>(options.k), options.k, out.values.begin());
    }
    const double captured = std::accumulate(out.values.begin(), out.values.end(), 0.0);
    out.variance_captured = trace > 0.0 ? std::min(1.0, captured / trace) : 0.0;
    return out;
}

}  // namespace censorpred
