#include "censorpred/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "censorpred/error.hpp"
#include "censorpred/random.hpp"
#include "censorpred/utf8.hpp"
#include "text_io.hpp"

namespace censorpred {

using nlohmann::json;

namespace {

std::size_t idx(Label l) { return static_cast<std::size_t>(l); }

double ratio(std::size_t num, std::size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cross-validation

std::vector<FoldSplit> stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw UsageError("stratified_kfold: k must be at least 2");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[idx(labels[i])].push_back(i);
    for (const auto label : kLabels) {
        if (by_class[idx(label)].size() < k) {
            throw UsageError("stratified_kfold: k=" + std::to_string(k) + " exceeds class sizes (censored " +
                             std::to_string(by_class[0].size()) + ", uncensored " +
                             std::to_string(by_class[1].size()) + ")");
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> fold_of(labels.size());
    std::size_t offset = 0;
    for (auto& members : by_class) {
        shuffle(std::span<std::size_t>(members), rng);
        for (std::size_t j = 0; j < members.size(); ++j) fold_of[members[j]] = (offset + j) % k;
        offset = (offset + members.size()) % k;
    }

    std::vector<FoldSplit> folds(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
    }
    return folds;
}

std::size_t ConfusionMatrix::total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double ConfusionMatrix::accuracy() const { return ratio(counts[0][0] + counts[1][1], total()); }

double ConfusionMatrix::precision(Label c) const {
    const auto k = idx(c);
    return ratio(counts[k][k], counts[0][k] + counts[1][k]);
}

double ConfusionMatrix::recall(Label c) const {
    const auto k = idx(c);
    return ratio(counts[k][k], counts[k][0] + counts[k][1]);
}

double ConfusionMatrix::f1(Label c) const {
    const double p = precision(c);
    const double r = recall(c);
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double majority_baseline(std::span<const Label> labels) {
    const auto c = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Censored));
    return ratio(std::max(c, labels.size() - c), labels.size());
}

namespace {

Model train_model(const FeatureMatrix& train, const ModelSpec& spec) {
    if (spec.kind == ModelKind::NaiveBayes) return nb_train(train);
    return svm_train(train, spec.svm);
}

}  // namespace

EvalReport evaluate(const FeatureMatrix& input, const ModelSpec& spec, const std::vector<std::string>& features,
                    const EvalOptions& options) {
    FeatureMatrix m = features.empty() ? input : input.select(features);
    if (options.standardization == StandardizationMode::Global) m = standardize(m, options.standardize);

    EvalReport report;
    report.model = spec;
    report.features = m.names;
    report.folds = options.folds;
    report.seed = options.seed;
    report.standardization = options.standardization;
    report.majority_baseline = majority_baseline(m.labels);

    const auto splits = stratified_kfold(m.labels, options.folds, options.seed);
    for (std::size_t f = 0; f < splits.size(); ++f) {
        auto train = m.take_rows(splits[f].train);
        auto test = m.take_rows(splits[f].test);
        if (options.standardization == StandardizationMode::PerFold) {
            train = standardize(train, options.standardize);
            test = apply_standardization(test, train.column_stats);
        }
        const auto model = train_model(train, spec);
        FoldReport fold;
        fold.fold = f;
        fold.test_size = test.row_count();
        for (std::size_t r = 0; r < test.row_count(); ++r) {
            const auto p = predict(model, test.rows[r]);
            ++fold.confusion.counts[idx(test.labels[r])][idx(p.label)];
            ++report.confusion.counts[idx(test.labels[r])][idx(p.label)];
        }
        fold.accuracy = fold.confusion.accuracy();
        report.per_fold.push_back(fold);
    }
    report.accuracy = report.confusion.accuracy();
    for (const auto label : kLabels) {
        report.per_class[idx(label)] = {report.confusion.precision(label), report.confusion.recall(label),
                                        report.confusion.f1(label)};
    }
    return report;
}

// ---------------------------------------------------------------------------
// Information gain

double class_entropy(std::span<const Label> labels) {
    if (labels.empty()) return 0.0;
    const auto c = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Censored));
    double h = 0.0;
    for (const std::size_t count : {c, labels.size() - c}) {
        if (count == 0) continue;
        const double p = ratio(count, labels.size());
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

double entropy_counts(std::size_t a, std::size_t b) {
    const std::size_t n = a + b;
    double h = 0.0;
    for (const std::size_t count : {a, b}) {
        if (count == 0 || count == n) continue;
        const double p = ratio(count, n);
        h -= p * std::log2(p);
    }
    return h;
}

// Recursive minimum-entropy binary splitting with the MDL acceptance test.
// `order` holds indices sorted by value over [lo, hi).
void mdl_cuts(std::span<const double> values, std::span<const Label> labels, const std::vector<std::size_t>& order,
              std::size_t lo, std::size_t hi, std::vector<double>& cuts) {
    const std::size_t n = hi - lo;
    if (n < 2) return;
    std::size_t total_c = 0;
    for (std::size_t i = lo; i < hi; ++i) total_c += labels[order[i]] == Label::Censored;
    const double h_all = entropy_counts(total_c, n - total_c);

    double best_h = std::numeric_limits<double>::infinity();
    std::size_t best_split = 0;
    std::size_t left_c = 0;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
        left_c += labels[order[i]] == Label::Censored;
        if (values[order[i]] == values[order[i + 1]]) continue;
        const std::size_t nl = i + 1 - lo;
        const std::size_t nr = n - nl;
        const double h = (ratio(nl, n) * entropy_counts(left_c, nl - left_c)) +
                         (ratio(nr, n) * entropy_counts(total_c - left_c, nr - (total_c - left_c)));
        if (h < best_h) {
            best_h = h;
            best_split = i + 1;
        }
    }
    if (best_split == 0) return;

    std::size_t lc = 0;
    for (std::size_t i = lo; i < best_split; ++i) lc += labels[order[i]] == Label::Censored;
    const std::size_t nl = best_split - lo;
    const std::size_t nr = hi - best_split;
    const std::size_t rc = total_c - lc;
    auto classes = [](std::size_t c, std::size_t total) { return (c > 0 ? 1 : 0) + (c < total ? 1 : 0); };
    const int k = classes(total_c, n);
    const int k1 = classes(lc, nl);
    const int k2 = classes(rc, nr);
    const double h1 = entropy_counts(lc, nl - lc);
    const double h2 = entropy_counts(rc, nr - rc);
    const double gain = h_all - best_h;
    const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * h_all - k1 * h1 - k2 * h2);
    const double threshold = (std::log2(static_cast<double>(n - 1)) + delta) / static_cast<double>(n);
    if (gain <= threshold) return;

    cuts.push_back(0.5 * (values[order[best_split - 1]] + values[order[best_split]]));
    mdl_cuts(values, labels, order, lo, best_split, cuts);
    mdl_cuts(values, labels, order, best_split, hi, cuts);
}

}  // namespace

std::vector<std::size_t> discretize(std::span<const double> values, std::span<const Label> labels,
                                    const BinningOptions& options) {
    const std::size_t n = values.size();
    std::vector<std::size_t> bins(n, 0);
    if (n == 0) return bins;
    if (options.mode != BinningMode::Mdl && options.bins < 2) throw UsageError("discretize: bins must be >= 2");

    switch (options.mode) {
        case BinningMode::EqualWidth: {
            const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
            const double lo = *mn;
            const double range = *mx - lo;
            if (!(range > 0.0)) return bins;
            for (std::size_t i = 0; i < n; ++i) {
                const auto b = static_cast<std::size_t>(std::floor((values[i] - lo) / range * static_cast<double>(options.bins)));
                bins[i] = std::min(b, options.bins - 1);
            }
            return bins;
        }
        case BinningMode::EqualFrequency: {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
            std::size_t first_rank = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (r > 0 && values[order[r]] != values[order[r - 1]]) first_rank = r;
                bins[order[r]] = first_rank * options.bins / n;
            }
            return bins;
        }
        case BinningMode::Mdl: {
            if (labels.size() != n) throw UsageError("discretize: MDL binning needs labels");
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
            std::vector<double> cuts;
            mdl_cuts(values, labels, order, 0, n, cuts);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i < n; ++i) {
                bins[i] = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
            }
            return bins;
        }
    }
    return bins;
}

double info_gain(std::span<const double> values, std::span<const Label> labels, const BinningOptions& options) {
    if (values.size() != labels.size()) throw UsageError("info_gain: length mismatch");
    if (values.empty()) return 0.0;
    const auto bins = discretize(values, labels, options);
    std::map<std::size_t, std::array<std::size_t, 2>> table;
    for (std::size_t i = 0; i < values.size(); ++i) ++table[bins[i]][idx(labels[i])];
    double conditional = 0.0;
    for (const auto& [bin, counts] : table) {
        conditional += ratio(counts[0] + counts[1], values.size()) * entropy_counts(counts[0], counts[1]);
    }
    return std::max(0.0, class_entropy(labels) - conditional);
}

double info_gain(const FeatureMatrix& m, std::string_view feature, const BinningOptions& options) {
    return info_gain(m.column_values(m.column(feature)), m.labels, options);
}

std::vector<std::string> FeatureRanking::best(std::optional<std::size_t> top_n) const {
    std::vector<std::string> out;
    for (const auto& f : features) {
        if (top_n ? out.size() >= *top_n : !(f.info_gain > 0.0)) break;
        out.push_back(f.name);
    }
    return out;
}

FeatureRanking rank_features(const FeatureMatrix& m, const BinningOptions& binning, std::size_t folds,
                             std::uint64_t seed) {
    FeatureRanking ranking;
    ranking.binning = binning;
    ranking.folds = folds;
    ranking.seed = seed;
    const auto splits = stratified_kfold(m.labels, folds, seed);
    std::vector<double> sums(m.column_count(), 0.0);
    for (const auto& split : splits) {
        std::vector<Label> labels;
        labels.reserve(split.train.size());
        for (const auto i : split.train) labels.push_back(m.labels[i]);
        std::vector<double> values(split.train.size());
        for (std::size_t c = 0; c < m.column_count(); ++c) {
            for (std::size_t j = 0; j < split.train.size(); ++j) values[j] = m.rows[split.train[j]][c];
            sums[c] += info_gain(values, labels, binning);
        }
    }
    for (std::size_t c = 0; c < m.column_count(); ++c) {
        ranking.features.push_back({m.names[c], sums[c] / static_cast<double>(splits.size())});
    }
    std::stable_sort(ranking.features.begin(), ranking.features.end(),
                     [](const auto& a, const auto& b) { return a.info_gain > b.info_gain; });
    return ranking;
}

// ---------------------------------------------------------------------------
// Contrast

std::map<std::string, double> contrast(const FeatureMatrix& m, const std::vector<std::string>& features) {
    std::map<std::string, double> out;
    const auto names = features.empty() ? m.names : features;
    for (const auto& name : names) {
        const auto c = m.column(name);
        std::array<double, 2> sum{};
        std::array<std::size_t, 2> n{};
        for (std::size_t r = 0; r < m.row_count(); ++r) {
            sum[idx(m.labels[r])] += m.rows[r][c];
            ++n[idx(m.labels[r])];
        }
        const double mc = n[0] ? sum[0] / static_cast<double>(n[0]) : 0.0;
        const double mu = n[1] ? sum[1] / static_cast<double>(n[1]) : 0.0;
        out[name] = mu - mc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Annotation statistics

namespace {

std::optional<Judgment> parse_judgment(std::string_view text) {
    std::string lower;
    for (const char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "yes" || lower == "y" || lower == "1" || lower == "censored") return Judgment::Yes;
    if (lower == "no" || lower == "n" || lower == "0" || lower == "uncensored") return Judgment::No;
    return std::nullopt;
}

bool correct(Judgment j, Label gold) {
    return (j == Judgment::Yes) == (gold == Label::Censored);
}

}  // namespace

AnnotationSet load_annotations(const std::string& path, const Corpus& corpus) {
    AnnotationSet a;
    detail::for_each_line(path, [&](std::size_t lineno, std::string_view line) {
        const auto trimmed = utf8::trim(line);
        if (trimmed.empty()) return;
        const auto fields = detail::split(trimmed, ',');
        if (fields.size() != 3) throw ParseError(path, lineno, "expected 'annotator,item,judgment'");
        if (lineno == 1 && fields[0] == "annotator") return;
        const auto j = parse_judgment(utf8::trim(fields[2]));
        if (!j) throw ParseError(path, lineno, "judgment must be yes or no");
        a.judgments[{utf8::trim(fields[0]), utf8::trim(fields[1])}] = *j;
    });
    for (const auto& p : corpus.posts()) a.gold.emplace(p.id, p.label);
    return a;
}

HumanBaseline human_baseline(const AnnotationSet& a) {
    HumanBaseline out;
    std::map<std::string, std::array<std::size_t, 2>> per_annotator;  // correct, total
    std::map<std::string, std::array<std::size_t, 2>> per_item;       // correct votes, total votes
    std::size_t right = 0;
    for (const auto& [key, judgment] : a.judgments) {
        const auto& [annotator, item] = key;
        const auto g = a.gold.find(item);
        if (g == a.gold.end()) throw UsageError("judgment on item '" + item + "' without gold label");
        const bool ok = correct(judgment, g->second);
        right += ok;
        per_annotator[annotator][0] += ok;
        ++per_annotator[annotator][1];
        per_item[item][0] += ok;
        ++per_item[item][1];
    }
    out.judgments = a.judgments.size();
    out.annotators = per_annotator.size();
    out.items = per_item.size();
    out.pooled_accuracy = ratio(right, out.judgments);
    double sum = 0.0;
    for (const auto& [name, c] : per_annotator) sum += ratio(c[0], c[1]);
    out.per_annotator_accuracy = per_annotator.empty() ? 0.0 : sum / static_cast<double>(per_annotator.size());
    double votes = 0.0;
    for (const auto& [item, c] : per_item) {
        if (2 * c[0] > c[1]) {
            votes += 1.0;
        } else if (2 * c[0] == c[1]) {
            votes += 0.5;
        }
    }
    out.majority_vote_accuracy = per_item.empty() ? 0.0 : votes / static_cast<double>(per_item.size());
    return out;
}

double cohen_kappa_pair(std::size_t n, std::size_t agree, std::size_t yes_a, std::size_t yes_b, bool* undefined) {
    // kappa = (po - pe) / (1 - pe) with both scaled by n^2 to stay in integers.
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double chance = static_cast<double>(yes_a) * static_cast<double>(yes_b) +
                          static_cast<double>(n - yes_a) * static_cast<double>(n - yes_b);
    const double observed = static_cast<double>(agree) * static_cast<double>(n);
    if (undefined) *undefined = nn == chance;
    if (nn == chance) return agree == n ? 1.0 : 0.0;
    return (observed - chance) / (nn - chance);
}

KappaResult cohen_kappa(const AnnotationSet& a) {
    std::map<std::string, std::map<std::string, Judgment>> by_annotator;
    for (const auto& [key, j] : a.judgments) by_annotator[key.first][key.second] = j;

    KappaResult result;
    double sum = 0.0;
    for (auto it = by_annotator.begin(); it != by_annotator.end(); ++it) {
        for (auto jt = std::next(it); jt != by_annotator.end(); ++jt) {
            std::size_t n = 0;
            std::size_t agree = 0;
            std::size_t yes_a = 0;
            std::size_t yes_b = 0;
            for (const auto& [item, ja] : it->second) {
                const auto found = jt->second.find(item);
                if (found == jt->second.end()) continue;
                ++n;
                agree += ja == found->second;
                yes_a += ja == Judgment::Yes;
                yes_b += found->second == Judgment::Yes;
            }
            if (n == 0) continue;
            bool undefined = false;
            sum += cohen_kappa_pair(n, agree, yes_a, yes_b, &undefined);
            ++result.pairs;
            if (undefined) {
                result.notes.push_back({"kappa", 0, it->first + "/" + jt->first,
                                        "chance agreement is 1; kappa set to " +
                                            std::string(agree == n ? "1" : "0")});
            }
        }
    }
    if (result.pairs == 0) throw UsageError("cohen_kappa: no annotator pair shares an item");
    result.mean_kappa = sum / static_cast<double>(result.pairs);
    return result;
}

// ---------------------------------------------------------------------------
// Reports

std::string model_kind_name(ModelKind kind) { return kind == ModelKind::NaiveBayes ? "nb" : "svm"; }

namespace {

const char* standardization_name(StandardizationMode m) {
    switch (m) {
        case StandardizationMode::PerFold: return "per_fold";
        case StandardizationMode::Global: return "global";
        case StandardizationMode::None: return "none";
    }
    return "per_fold";
}

const char* binning_name(BinningMode m) {
    switch (m) {
        case BinningMode::EqualWidth: return "equal_width";
        case BinningMode::EqualFrequency: return "equal_frequency";
        case BinningMode::Mdl: return "mdl";
    }
    return "equal_width";
}

json confusion_json(const ConfusionMatrix& c) {
    return {{"censored", {{"censored", c.counts[0][0]}, {"uncensored", c.counts[0][1]}}},
            {"uncensored", {{"censored", c.counts[1][0]}, {"uncensored", c.counts[1][1]}}}};
}

}  // namespace

std::string reports_to_json(const std::vector<EvalReport>& reports, const std::string& config_json) {
    json out;
    out["config"] = config_json.empty() ? json::object() : json::parse(config_json);
    json rows = json::array();
    for (const auto& r : reports) {
        json j;
        j["name"] = r.name;
        j["model"] = model_kind_name(r.model.kind);
        if (r.model.kind == ModelKind::Svm) {
            j["svm"] = {{"C", r.model.svm.C}, {"tolerance", r.model.svm.tolerance}, {"seed", r.model.svm.seed}};
        }
        j["features"] = r.features;
        j["feature_count"] = r.features.size();
        j["folds"] = r.folds;
        j["seed"] = r.seed;
        j["standardization"] = standardization_name(r.standardization);
        j["accuracy"] = r.accuracy;
        j["majority_baseline"] = r.majority_baseline;
        for (const auto label : kLabels) {
            const auto& m = r.per_class[idx(label)];
            j["classes"][std::string(label_name(label))] = {
                {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
        }
        j["confusion"] = confusion_json(r.confusion);
        json folds = json::array();
        for (const auto& f : r.per_fold) {
            folds.push_back({{"fold", f.fold},
                             {"test_size", f.test_size},
                             {"accuracy", f.accuracy},
                             {"confusion", confusion_json(f.confusion)}});
        }
        j["per_fold"] = std::move(folds);
        rows.push_back(std::move(j));
    }
    out["reports"] = std::move(rows);
    return out.dump(2);
}

void print_reports(const std::vector<EvalReport>& reports, std::ostream& out) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-30s %5s | %5s %5s %5s | %5s %5s %5s\n", "Features", "Acc", "Pre", "Rec", "F1",
                  "Pre", "Rec", "F1");
    out << std::string(37, ' ') << "| Censored          | Uncensored\n" << buf;
    for (const auto& r : reports) {
        const auto& c = r.per_class[0];
        const auto& u = r.per_class[1];
        std::snprintf(buf, sizeof buf, "%-30s %5.2f | %5.2f %5.2f %5.2f | %5.2f %5.2f %5.2f\n", r.name.c_str(),
                      r.accuracy, c.precision, c.recall, c.f1, u.precision, u.recall, u.f1);
        out << buf;
    }
    if (!reports.empty()) {
        std::snprintf(buf, sizeof buf, "%-30s %5.2f |\n", "majority class", reports.front().majority_baseline);
        out << buf;
    }
}

std::string ranking_to_json(const FeatureRanking& ranking) {
    json j;
    j["binning"] = {{"mode", binning_name(ranking.binning.mode)}, {"bins", ranking.binning.bins}};
    j["folds"] = ranking.folds;
    j["seed"] = ranking.seed;
    json feats = json::array();
    for (const auto& f : ranking.features) feats.push_back({{"name", f.name}, {"info_gain", f.info_gain}});
    j["features"] = std::move(feats);
    j["best"] = ranking.best();
    j["best_count"] = ranking.best().size();
    return j.dump(2);
}

void print_ranking(const FeatureRanking& ranking, std::ostream& out, std::size_t limit) {
    char buf[256];
    std::size_t shown = 0;
    for (const auto& f : ranking.features) {
        if (limit && shown++ >= limit) break;
        std::snprintf(buf, sizeof buf, "%-32s %.6f\n", f.name.c_str(), f.info_gain);
        out << buf;
    }
    out << "best features (mean IG > 0): " << ranking.best().size() << '\n';
}

}  // namespace censorpred
