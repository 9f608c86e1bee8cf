#include "censorpred/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "censorpred/error.hpp"
#include "censorpred/random.hpp"
#include "json_io.hpp"

namespace censorpred {

using nlohmann::json;

ColumnBinding::ColumnBinding(std::span<const std::string> model_names, std::span<const std::string> available) {
    std::vector<std::string> missing;
    columns_.reserve(model_names.size());
    for (const auto& name : model_names) {
        const auto it = std::find(available.begin(), available.end(), name);
        if (it == available.end()) {
            missing.push_back(name);
        } else {
            columns_.push_back(static_cast<std::size_t>(it - available.begin()));
        }
    }
    if (!missing.empty()) {
        std::string msg = "input lacks model feature(s):";
        for (const auto& m : missing) msg += " " + m;
        throw UsageError(msg);
    }
}

std::vector<double> ColumnBinding::gather(std::span<const double> row) const {
    std::vector<double> out;
    out.reserve(columns_.size());
    for (const auto c : columns_) out.push_back(row[c]);
    return out;
}

namespace {

std::size_t idx(Label l) { return static_cast<std::size_t>(l); }

void require_two_classes(const FeatureMatrix& m, const char* who) {
    if (m.row_count() == 0) throw UsageError(std::string(who) + ": empty training data");
    const bool has_c = std::find(m.labels.begin(), m.labels.end(), Label::Censored) != m.labels.end();
    const bool has_u = std::find(m.labels.begin(), m.labels.end(), Label::Uncensored) != m.labels.end();
    if (!has_c || !has_u) throw UsageError(std::string(who) + ": training data must contain both classes");
}

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes

NaiveBayesModel nb_train(const FeatureMatrix& m) {
    require_two_classes(m, "nb_train");
    const std::size_t f = m.column_count();
    NaiveBayesModel model;
    model.feature_names = m.names;

    double max_var = 0.0;
    for (std::size_t c = 0; c < f; ++c) max_var = std::max(max_var, sample_variance(m.column_values(c)));
    model.variance_floor = std::max(1e-9 * max_var, 1e-12);

    for (const auto label : kLabels) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < m.row_count(); ++r) {
            if (m.labels[r] == label) rows.push_back(r);
        }
        model.priors[idx(label)] = static_cast<double>(rows.size()) / static_cast<double>(m.row_count());
        auto& means = model.means[idx(label)];
        auto& vars = model.variances[idx(label)];
        means.resize(f);
        vars.resize(f);
        std::vector<double> values(rows.size());
        for (std::size_t c = 0; c < f; ++c) {
            for (std::size_t i = 0; i < rows.size(); ++i) values[i] = m.rows[rows[i]][c];
            means[c] = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
            vars[c] = std::max(sample_variance(values), model.variance_floor);
        }
    }
    return model;
}

Prediction nb_predict(const NaiveBayesModel& model, std::span<const double> values) {
    if (values.size() != model.feature_names.size()) throw UsageError("nb_predict: feature count mismatch");
    std::array<double, 2> joint{};
    for (const auto label : kLabels) {
        const auto k = idx(label);
        double lp = std::log(model.priors[k]);
        for (std::size_t c = 0; c < values.size(); ++c) {
            const double var = model.variances[k][c];
            const double d = values[c] - model.means[k][c];
            lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
        }
        joint[k] = lp;
    }
    const double top = std::max(joint[0], joint[1]);
    const double log_z = top + std::log(std::exp(joint[0] - top) + std::exp(joint[1] - top));
    Prediction p;
    p.log_posterior = {joint[0] - log_z, joint[1] - log_z};
    p.label = joint[0] >= joint[1] ? Label::Censored : Label::Uncensored;
    p.score = joint[0] - joint[1];
    return p;
}

// ---------------------------------------------------------------------------
// SMO

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

class SmoSolver {
public:
    SmoSolver(const FeatureMatrix& m, const SvmOptions& opt)
        : x_(m.rows), C_(opt.C), tol_(opt.tolerance), eps_(opt.alpha_eps), rng_(opt.seed) {
        const std::size_t n = x_.size();
        y_.resize(n);
        for (std::size_t i = 0; i < n; ++i) y_[i] = m.labels[i] == Label::Censored ? 1.0 : -1.0;
        alpha_.assign(n, 0.0);
        w_.assign(m.column_count(), 0.0);
        // With alpha = 0 and b = 0 the output is 0 everywhere.
        error_.resize(n);
        for (std::size_t i = 0; i < n; ++i) error_[i] = -y_[i];
        self_.resize(n);
        for (std::size_t i = 0; i < n; ++i) self_[i] = dot(x_[i], x_[i]);
    }

    bool run(std::size_t max_passes) {
        std::size_t changed = 0;
        bool examine_all = true;
        std::size_t passes = 0;
        while (changed > 0 || examine_all) {
            if (++passes > max_passes) return false;
            changed = 0;
            if (examine_all) {
                for (std::size_t i = 0; i < alpha_.size(); ++i) changed += examine(i);
            } else {
                for (std::size_t i = 0; i < alpha_.size(); ++i) {
                    if (non_bound(i)) changed += examine(i);
                }
            }
            if (examine_all) {
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
        return true;
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double threshold() const { return b_; }
    const std::vector<double>& labels() const { return y_; }

private:
    bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < C_; }

    std::size_t examine(std::size_t i2) {
        const double y2 = y_[i2];
        const double a2 = alpha_[i2];
        const double e2 = error_[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -tol_ && a2 < C_) || (r2 > tol_ && a2 > 0.0))) return 0;

        const std::size_t n = alpha_.size();
        std::size_t non_bound_count = 0;
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!non_bound(i)) continue;
            ++non_bound_count;
            const double gap = std::abs(error_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (non_bound_count > 1 && best < n && take_step(best, i2)) return 1;

        const auto start = static_cast<std::size_t>(uniform_index(rng_, n));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i1 = (start + k) % n;
            if (non_bound(i1) && take_step(i1, i2)) return 1;
        }
        const auto start2 = static_cast<std::size_t>(uniform_index(rng_, n));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i1 = (start2 + k) % n;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double alph1 = alpha_[i1];
        const double alph2 = alpha_[i2];
        const double y1 = y_[i1];
        const double y2 = y_[i2];
        const double e1 = error_[i1];
        const double e2 = error_[i2];
        const double s = y1 * y2;

        double lo;
        double hi;
        if (y1 != y2) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(C_, C_ + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph1 + alph2 - C_);
            hi = std::min(C_, alph1 + alph2);
        }
        if (hi - lo <= 0.0) return false;

        const double k11 = self_[i1];
        const double k22 = self_[i2];
        const double k12 = dot(x_[i1], x_[i2]);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 0.0) {
            a2 = std::clamp(alph2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // Objective along the constraint line at both ends.
            const double f1 = y1 * (e1 + b_) - alph1 * k11 - s * alph2 * k12;
            const double f2 = y2 * (e2 + b_) - s * alph1 * k12 - alph2 * k22;
            const double l1 = alph1 + s * (alph2 - lo);
            const double h1 = alph1 + s * (alph2 - hi);
            const double lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (lobj < hobj - eps_) {
                a2 = lo;
            } else if (lobj > hobj + eps_) {
                a2 = hi;
            } else {
                a2 = alph2;
            }
        }
        if (a2 < 1e-12 * C_) a2 = 0.0;
        if (a2 > C_ * (1.0 - 1e-12)) a2 = C_;
        if (std::abs(a2 - alph2) < eps_ * (a2 + alph2 + eps_)) return false;

        double a1 = alph1 + s * (alph2 - a2);
        if (a1 < 0.0) {
            a2 += s * a1;
            a1 = 0.0;
        } else if (a1 > C_) {
            a2 += s * (a1 - C_);
            a1 = C_;
        }
        // Rounding in the updates above can leave a multiplier a hair inside
        // a bound, where it would be mistaken for a free support vector.
        for (double* a : {&a1, &a2}) {
            if (*a < 1e-12 * C_) *a = 0.0;
            if (*a > C_ * (1.0 - 1e-12)) *a = C_;
        }

        // Threshold so the optimised pair satisfies KKT; Platt's u = w.x - b.
        const double d1 = y1 * (a1 - alph1);
        const double d2 = y2 * (a2 - alph2);
        const double b1 = e1 + d1 * k11 + d2 * k12 + b_;
        const double b2 = e2 + d1 * k12 + d2 * k22 + b_;
        double b_new;
        if (a1 > 0.0 && a1 < C_) {
            b_new = b1;
        } else if (a2 > 0.0 && a2 < C_) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }
        const double db = b_new - b_;

        for (std::size_t j = 0; j < w_.size(); ++j) w_[j] += d1 * x_[i1][j] + d2 * x_[i2][j];
        for (std::size_t i = 0; i < error_.size(); ++i) {
            const double k1i = i == i1 ? k11 : (i == i2 ? k12 : dot(x_[i1], x_[i]));
            const double k2i = i == i2 ? k22 : (i == i1 ? k12 : dot(x_[i2], x_[i]));
            error_[i] += d1 * k1i + d2 * k2i - db;
        }
        alpha_[i1] = a1;
        alpha_[i2] = a2;
        b_ = b_new;
        return true;
    }

    const std::vector<std::vector<double>>& x_;
    std::vector<double> y_;
    std::vector<double> alpha_;
    std::vector<double> w_;
    std::vector<double> error_;
    std::vector<double> self_;
    double b_ = 0.0;
    double C_;
    double tol_;
    double eps_;
    Rng rng_;
};

}  // namespace

SvmModel svm_train(const FeatureMatrix& m, const SvmOptions& options) {
    require_two_classes(m, "svm_train");
    if (options.C <= 0.0 || options.tolerance <= 0.0) throw UsageError("svm_train: C and tolerance must be positive");

    SmoSolver solver(m, options);
    SvmModel model;
    model.converged = solver.run(options.max_passes);
    model.feature_names = m.names;
    model.C = options.C;
    model.tolerance = options.tolerance;
    model.alphas = solver.alphas();

    const auto& y = solver.labels();
    model.weights.assign(m.column_count(), 0.0);
    for (std::size_t i = 0; i < m.row_count(); ++i) {
        const double a = model.alphas[i];
        if (a == 0.0) continue;
        ++model.support_count;
        for (std::size_t j = 0; j < model.weights.size(); ++j) model.weights[j] += a * y[i] * m.rows[i][j];
    }

    // Bias from the free support vectors when there are any; they pin the
    // margin exactly. Otherwise every b in an interval satisfies KKT and the
    // midpoint is taken, which does not depend on the order of the examples.
    double sum = 0.0;
    std::size_t free = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.row_count(); ++i) {
        const double a = model.alphas[i];
        const double edge = y[i] - dot(model.weights, m.rows[i]);
        if (a > 0.0 && a < options.C) {
            sum += edge;
            ++free;
        } else if ((a == 0.0) == (y[i] > 0.0)) {
            lo = std::max(lo, edge);
        } else {
            hi = std::min(hi, edge);
        }
    }
    if (free) {
        model.bias = sum / static_cast<double>(free);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
        model.bias = 0.5 * (lo + hi);
    } else {
        model.bias = -solver.threshold();
    }
    return model;
}

Prediction svm_predict(const SvmModel& model, std::span<const double> values) {
    if (values.size() != model.weights.size()) throw UsageError("svm_predict: feature count mismatch");
    Prediction p;
    p.score = dot(model.weights, values) + model.bias;
    p.label = p.score >= 0.0 ? Label::Censored : Label::Uncensored;
    return p;
}

double svm_dual_objective(const FeatureMatrix& m, std::span<const double> alphas) {
    std::vector<double> w(m.column_count(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.row_count(); ++i) {
        const double y = m.labels[i] == Label::Censored ? 1.0 : -1.0;
        sum += alphas[i];
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += alphas[i] * y * m.rows[i][j];
    }
    return sum - 0.5 * dot(w, w);
}

// ---------------------------------------------------------------------------
// Generic model

const std::vector<std::string>& feature_names(const Model& model) {
    return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.feature_names; }, model);
}

Prediction predict(const Model& model, std::span<const double> values) {
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) return nb_predict(*nb, values);
    return svm_predict(std::get<SvmModel>(model), values);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json model_parameters(const NaiveBayesModel& nb) {
    return {{"priors", nb.priors},
            {"means", nb.means},
            {"variances", nb.variances},
            {"variance_floor", nb.variance_floor}};
}

json model_parameters(const SvmModel& svm) {
    return {{"weights", svm.weights},
            {"bias", svm.bias},
            {"C", svm.C},
            {"tolerance", svm.tolerance},
            {"support_count", svm.support_count},
            {"alphas", svm.alphas},
            {"converged", svm.converged}};
}

}  // namespace

void save_model(const ModelFile& file, std::ostream& out) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["type"] = std::holds_alternative<NaiveBayesModel>(file.model) ? "naive_bayes" : "linear_svm";
    j["feature_names"] = feature_names(file.model);
    j["parameters"] = std::visit([](const auto& m) { return model_parameters(m); }, file.model);
    j["training_config"] = file.training_config.empty() ? json::object() : json::parse(file.training_config);
    FeatureMatrix stats_holder;
    stats_holder.names = feature_names(file.model);
    stats_holder.column_stats = file.column_stats;
    stats_holder.readability_stats = file.readability;
    j["column_stats"] = detail::column_stats_json(stats_holder);
    out << j.dump(2) << '\n';
}

void save_model(const ModelFile& file, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    save_model(file, out);
}

ModelFile load_model(std::istream& in, const std::string& source) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(source, 0, std::string("corrupt model file: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ParseError(source, 0, "unsupported model format version " + std::to_string(version));
        }
        const auto type = j.at("type").get<std::string>();
        const auto names = j.at("feature_names").get<std::vector<std::string>>();
        const auto& p = j.at("parameters");
        ModelFile file;
        if (type == "naive_bayes") {
            NaiveBayesModel nb;
            nb.feature_names = names;
            nb.priors = p.at("priors").get<std::array<double, 2>>();
            nb.means = p.at("means").get<std::array<std::vector<double>, 2>>();
            nb.variances = p.at("variances").get<std::array<std::vector<double>, 2>>();
            nb.variance_floor = p.at("variance_floor").get<double>();
            for (const auto& v : {nb.means[0], nb.means[1], nb.variances[0], nb.variances[1]}) {
                if (v.size() != names.size()) throw ParseError(source, 0, "parameter arity mismatch");
            }
            file.model = std::move(nb);
        } else if (type == "linear_svm") {
            SvmModel svm;
            svm.feature_names = names;
            svm.weights = p.at("weights").get<std::vector<double>>();
            svm.bias = p.at("bias").get<double>();
            svm.C = p.at("C").get<double>();
            svm.tolerance = p.at("tolerance").get<double>();
            svm.support_count = p.at("support_count").get<std::size_t>();
            svm.alphas = p.at("alphas").get<std::vector<double>>();
            svm.converged = p.at("converged").get<bool>();
            if (svm.weights.size() != names.size()) throw ParseError(source, 0, "parameter arity mismatch");
            file.model = std::move(svm);
        } else {
            throw ParseError(source, 0, "unknown model type '" + type + "'");
        }
        file.training_config = j.at("training_config").dump();
        std::vector<std::string> stat_names;
        detail::parse_column_stats(j.at("column_stats"), stat_names, file.column_stats, file.readability);
        if (stat_names != names) throw ParseError(source, 0, "column statistics do not match model features");
        return file;
    } catch (const json::exception& e) {
        throw ParseError(source, 0, std::string("corrupt model file: ") + e.what());
    }
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return load_model(in, path);
}

}  // namespace censorpred
