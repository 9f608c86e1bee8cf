#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "censorpred/analysis.hpp"
#include "censorpred/error.hpp"
#include "censorpred/pipeline.hpp"
#include "censorpred/random.hpp"
#include "support/fixtures.hpp"

using namespace censorpred;

namespace {

constexpr Label C = Label::Censored;
constexpr Label U = Label::Uncensored;

std::vector<Label> labels_of(std::size_t censored, std::size_t uncensored) {
    std::vector<Label> out(censored, C);
    out.insert(out.end(), uncensored, U);
    return out;
}

FeatureMatrix columns(const std::vector<std::pair<std::string, std::vector<double>>>& cols,
                      const std::vector<Label>& labels) {
    FeatureMatrix m;
    for (const auto& [name, _] : cols) {
        m.names.push_back(name);
        m.groups.push_back(FeatureGroup::Linguistic);
    }
    m.labels = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        m.ids.push_back("p" + std::to_string(i));
        std::vector<double> row;
        for (const auto& [_, v] : cols) row.push_back(v[i]);
        m.rows.push_back(row);
    }
    return m;
}

AnnotationSet annotations(const std::vector<std::pair<std::string, std::vector<Judgment>>>& judges,
                          const std::vector<Label>& gold) {
    AnnotationSet a;
    for (std::size_t i = 0; i < gold.size(); ++i) a.gold["i" + std::to_string(i)] = gold[i];
    for (const auto& [who, js] : judges) {
        for (std::size_t i = 0; i < js.size(); ++i) a.judgments[{who, "i" + std::to_string(i)}] = js[i];
    }
    return a;
}

constexpr Judgment Y = Judgment::Yes;
constexpr Judgment N = Judgment::No;

}  // namespace

TEST_SUITE("folds") {
    TEST_CASE("60/40 split into ten folds") {
        const auto labels = labels_of(60, 40);
        const auto folds = stratified_kfold(labels, 10, 3);
        REQUIRE(folds.size() == 10);
        for (const auto& f : folds) {
            CHECK(f.test.size() == 10);
            CHECK(std::count_if(f.test.begin(), f.test.end(), [&](auto i) { return labels[i] == C; }) == 6);
            CHECK(f.train.size() == 90);
        }
    }

    TEST_CASE("two folds on four posts") {
        const auto labels = labels_of(2, 2);
        const auto folds = stratified_kfold(labels, 2, 1);
        REQUIRE(folds.size() == 2);
        for (const auto& f : folds) {
            REQUIRE(f.test.size() == 2);
            CHECK(labels[f.test[0]] != labels[f.test[1]]);
        }
    }

    TEST_CASE("too few members for k") {
        CHECK_THROWS_AS(stratified_kfold(labels_of(5, 50), 10, 1), UsageError);
        CHECK_THROWS_AS(stratified_kfold(labels_of(5, 5), 1, 1), UsageError);
    }

    TEST_CASE("folds partition the data with balanced proportions") {
        Rng rng(12);
        for (int trial = 0; trial < 100; ++trial) {
            const auto k = 2 + uniform_index(rng, 9);
            const auto nc = k + uniform_index(rng, 40);
            const auto nu = k + uniform_index(rng, 40);
            std::vector<Label> labels = labels_of(nc, nu);
            shuffle(std::span<Label>(labels), rng);
            const auto seed = static_cast<std::uint64_t>(trial);
            const auto folds = stratified_kfold(labels, k, seed);
            std::vector<int> seen(labels.size(), 0);
            const double share = static_cast<double>(nc) / static_cast<double>(labels.size());
            for (const auto& f : folds) {
                for (auto i : f.test) ++seen[i];
                std::set<std::size_t> train(f.train.begin(), f.train.end());
                CHECK(train.size() + f.test.size() == labels.size());
                for (auto i : f.test) CHECK_FALSE(train.contains(i));
                const auto c = std::count_if(f.test.begin(), f.test.end(), [&](auto i) { return labels[i] == C; });
                CHECK(std::abs(static_cast<double>(c) - share * static_cast<double>(f.test.size())) <= 1.0 + 1e-9);
            }
            CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
            const auto again = stratified_kfold(labels, k, seed);
            for (std::size_t j = 0; j < k; ++j) CHECK(again[j].test == folds[j].test);
        }
    }

    TEST_CASE("different seeds give different assignments") {
        const auto labels = labels_of(50, 50);
        CHECK(stratified_kfold(labels, 5, 1)[0].test != stratified_kfold(labels, 5, 2)[0].test);
    }
}

TEST_SUITE("evaluation") {
    TEST_CASE("majority baseline") {
        CHECK(majority_baseline(labels_of(125, 75)) == 0.625);
        CHECK(majority_baseline(labels_of(3, 7)) == 0.7);
    }

    TEST_CASE("degenerate classifier confusion") {
        ConfusionMatrix cm;
        cm.counts[static_cast<int>(C)][static_cast<int>(C)] = 125;
        cm.counts[static_cast<int>(U)][static_cast<int>(C)] = 75;
        CHECK(cm.accuracy() == 0.625);
        CHECK(cm.recall(U) == 0.0);
        CHECK(cm.precision(U) == 0.0);
        CHECK(cm.f1(U) == 0.0);
        CHECK(cm.recall(C) == 1.0);
    }

    TEST_CASE("perfect separation") {
        std::vector<double> x;
        const auto labels = labels_of(30, 30);
        for (std::size_t i = 0; i < labels.size(); ++i) x.push_back((labels[i] == C ? 5.0 : -5.0) + 0.01 * i);
        const auto m = columns({{"x", x}}, labels);
        for (auto kind : {ModelKind::NaiveBayes, ModelKind::Svm}) {
            const auto r = evaluate(m, {.kind = kind}, {}, {.folds = 5, .seed = 2});
            CHECK(r.accuracy == 1.0);
            CHECK(r.per_class[0].f1 == 1.0);
            CHECK(r.per_class[1].f1 == 1.0);
            CHECK(r.majority_baseline == 0.5);
            CHECK(r.per_fold.size() == 5);
            CHECK(r.confusion.total() == 60);
        }
    }

    TEST_CASE("metrics agree with the pooled confusion matrix") {
        Rng rng(4);
        std::vector<double> a, b;
        const auto labels = labels_of(40, 30);
        for (auto l : labels) {
            a.push_back(uniform_real(rng) + (l == C ? 0.3 : 0.0));
            b.push_back(uniform_real(rng));
        }
        const auto m = columns({{"a", a}, {"b", b}}, labels);
        for (auto mode : {StandardizationMode::PerFold, StandardizationMode::Global, StandardizationMode::None}) {
            const auto r = evaluate(m, {.kind = ModelKind::NaiveBayes}, {"a"}, {.folds = 5, .seed = 9, .standardization = mode});
            CHECK(r.features == std::vector<std::string>{"a"});
            std::size_t correct = 0;
            for (const auto& f : r.per_fold) correct += f.confusion.counts[0][0] + f.confusion.counts[1][1];
            CHECK(r.accuracy == doctest::Approx(static_cast<double>(correct) / 70.0).epsilon(1e-15));
            for (auto l : kLabels) {
                const auto& pc = r.per_class[static_cast<int>(l)];
                CHECK(pc.precision == r.confusion.precision(l));
                CHECK(pc.recall == r.confusion.recall(l));
                if (pc.precision + pc.recall > 0) {
                    CHECK(pc.f1 == doctest::Approx(2 * pc.precision * pc.recall / (pc.precision + pc.recall)));
                }
            }
        }
        CHECK_THROWS_AS(evaluate(m, {}, {"nope"}, {.folds = 5}), UsageError);
    }
}

TEST_SUITE("information gain") {
    TEST_CASE("hand entropy fixtures") {
        const auto labels = std::vector<Label>{C, U, C, U};
        CHECK(std::abs(info_gain(std::vector<double>{1, 0, 1, 0}, labels) - 1.0) <= 1e-12);
        CHECK(std::abs(info_gain(std::vector<double>{0, 0, 1, 1}, labels)) <= 1e-12);
        CHECK(std::abs(info_gain(std::vector<double>{3, 3, 3, 3}, labels)) <= 1e-12);
        CHECK(class_entropy(labels) == 1.0);
        for (auto mode : {BinningMode::EqualFrequency, BinningMode::Mdl}) {
            CHECK(std::abs(info_gain(std::vector<double>{1, 0, 1, 0}, labels, {.mode = mode}) - 1.0) <= 1e-12);
            CHECK(std::abs(info_gain(std::vector<double>{3, 3, 3, 3}, labels, {.mode = mode})) <= 1e-12);
        }
    }

    TEST_CASE("gain is never negative and never exceeds the class entropy") {
        Rng rng(15);
        for (int trial = 0; trial < 300; ++trial) {
            const auto n = 2 + uniform_index(rng, 60);
            std::vector<double> v(n);
            std::vector<Label> l(n);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = std::floor(uniform_real(rng) * 7.0);
                l[i] = uniform_index(rng, 2) ? C : U;
            }
            for (auto mode : {BinningMode::EqualWidth, BinningMode::EqualFrequency, BinningMode::Mdl}) {
                const double g = info_gain(v, l, {.mode = mode, .bins = 2 + uniform_index(rng, 9)});
                CHECK(g >= 0.0);
                CHECK(g <= class_entropy(l) + 1e-12);
            }
        }
    }

    TEST_CASE("rank binning is invariant under monotone transforms") {
        Rng rng(16);
        for (int trial = 0; trial < 100; ++trial) {
            const auto n = 5 + uniform_index(rng, 60);
            std::vector<double> v(n), w(n);
            std::vector<Label> l(n);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = std::floor(uniform_real(rng) * 20.0) - 10.0;
                w[i] = std::exp(0.3 * v[i]) + 2.0 * v[i] * v[i] * v[i];
                l[i] = uniform_index(rng, 2) ? C : U;
            }
            for (auto mode : {BinningMode::EqualFrequency, BinningMode::Mdl}) {
                CHECK(info_gain(v, l, {.mode = mode}) == doctest::Approx(info_gain(w, l, {.mode = mode})).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("equal-width binning depends on spacing") {
        // Exponential warping moves values across equal-width bins.
        const std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        std::vector<double> w;
        for (double x : v) w.push_back(std::exp(x));
        const std::vector<Label> l{C, C, U, U, C, C, U, U, C, U};
        CHECK(info_gain(v, l, {.bins = 3}) != doctest::Approx(info_gain(w, l, {.bins = 3})));
    }

    TEST_CASE("planted column ranks first") {
        Rng rng(21);
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        const auto labels = labels_of(100, 100);
        for (int c = 0; c < 6; ++c) {
            std::vector<double> v;
            for (auto l : labels) v.push_back(uniform_real(rng) + (c == 4 && l == C ? 0.8 : 0.0));
            cols.push_back({"c" + std::to_string(c), v});
        }
        const auto r = rank_features(columns(cols, labels), {}, 10, 1);
        REQUIRE(r.features.size() == 6);
        CHECK(r.features.front().name == "c4");
        for (std::size_t i = 1; i < r.features.size(); ++i) CHECK(r.features[i].info_gain <= r.features[i - 1].info_gain);
        CHECK(r.best(2).size() == 2);
        CHECK(r.best(2).front() == "c4");
    }

    TEST_CASE("all-noise matrix gives a small best set under MDL") {
        Rng rng(22);
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        auto labels = labels_of(100, 100);
        shuffle(std::span<Label>(labels), rng);
        for (int c = 0; c < 20; ++c) {
            std::vector<double> v;
            for (std::size_t i = 0; i < labels.size(); ++i) v.push_back(uniform_real(rng));
            cols.push_back({"n" + std::to_string(c), v});
        }
        const auto r = rank_features(columns(cols, labels), {.mode = BinningMode::Mdl}, 10, 1);
        CHECK(r.best().size() <= 3);
        for (const auto& f : r.features) CHECK(f.info_gain < 0.05);
        const auto ew = rank_features(columns(cols, labels), {}, 10, 1);
        for (const auto& f : ew.features) CHECK(f.info_gain < 0.1);
    }
}

TEST_SUITE("contrast") {
    TEST_CASE("class mean differences") {
        const auto labels = labels_of(2, 2);
        const auto m = columns({{"a", {1, 3, 4, 6}}, {"b", {2, 2, 2, 2}}}, labels);
        const auto c = contrast(m, {"a", "b"});
        CHECK(c.at("a") == 3.0);
        CHECK(c.at("b") == 0.0);
        auto swapped = m;
        for (auto& l : swapped.labels) l = l == C ? U : C;
        CHECK(contrast(swapped, {"a"}).at("a") == -3.0);
        CHECK_THROWS_AS(contrast(m, {"zz"}), UsageError);
    }

    TEST_CASE("planted swear column leans censored") {
        testsupport::TempDir dir;
        const auto f = testsupport::write_planted(dir, {.posts = 120});
        const auto config = load_config(f.config);
        const auto res = load_resources(config);
        const auto corpus = load_pipeline_corpus(config);
        const auto m = build_matrix(corpus.corpus, res.resources, config.features);
        CHECK(contrast(m, {"liwc_swear"}).at("liwc_swear") < 0.0);
    }
}

TEST_SUITE("annotations") {
    TEST_CASE("kappa hand fixture") {
        CHECK(cohen_kappa_pair(10, 8, 5, 5) == 0.6);
        // a: YYYYYNNNNN, b: YYYYNYNNNN -> 8 agreements, 5 yes each.
        const auto a = annotations({{"a", {Y, Y, Y, Y, Y, N, N, N, N, N}}, {"b", {Y, Y, Y, Y, N, Y, N, N, N, N}}},
                                   std::vector<Label>(10, C));
        const auto k = cohen_kappa(a);
        CHECK(k.mean_kappa == 0.6);
        CHECK(k.pairs == 1);
    }

    TEST_CASE("identical and undefined pairs") {
        const auto same = annotations({{"a", {Y, N, Y}}, {"b", {Y, N, Y}}}, {C, U, C});
        CHECK(cohen_kappa(same).mean_kappa == 1.0);
        bool undefined = false;
        CHECK(cohen_kappa_pair(4, 4, 4, 4, &undefined) == 1.0);
        CHECK(undefined);
        const auto all_yes = annotations({{"a", {Y, Y}}, {"b", {Y, Y}}}, {C, U});
        const auto k = cohen_kappa(all_yes);
        CHECK(k.mean_kappa == 1.0);
        CHECK(k.notes.size() == 1);
        const auto apart = annotations({{"a", {Y}}}, {C});
        CHECK_THROWS_AS(cohen_kappa(apart), UsageError);
    }

    TEST_CASE("kappa is symmetric and ignores item order") {
        Rng rng(30);
        for (int trial = 0; trial < 200; ++trial) {
            const auto n = 1 + uniform_index(rng, 15);
            std::vector<Judgment> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = uniform_index(rng, 2) ? Y : N;
                b[i] = uniform_index(rng, 3) ? a[i] : (uniform_index(rng, 2) ? Y : N);
            }
            const std::vector<Label> gold(n, C);
            const double k1 = cohen_kappa(annotations({{"a", a}, {"b", b}}, gold)).mean_kappa;
            const double k2 = cohen_kappa(annotations({{"a", b}, {"b", a}}, gold)).mean_kappa;
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            shuffle(std::span<std::size_t>(order), rng);
            std::vector<Judgment> ap, bp;
            for (auto i : order) {
                ap.push_back(a[i]);
                bp.push_back(b[i]);
            }
            const double k3 = cohen_kappa(annotations({{"a", ap}, {"b", bp}}, gold)).mean_kappa;
            CHECK(k1 == k2);
            CHECK(k1 == k3);
            CHECK(k1 <= 1.0);
        }
    }

    TEST_CASE("pairwise mean over three judges") {
        const auto a = annotations({{"a", {Y, N, Y, N}}, {"b", {Y, N, Y, N}}, {"c", {N, Y, N, Y}}}, {C, U, C, U});
        const auto k = cohen_kappa(a);
        CHECK(k.pairs == 3);
        CHECK(k.mean_kappa == doctest::Approx((1.0 - 1.0 - 1.0) / 3.0));
    }

    TEST_CASE("human baseline pooling") {
        const auto one = annotations({{"a", {Y, N, Y}}}, {C, U, C});
        CHECK(human_baseline(one).pooled_accuracy == 1.0);
        const auto two = annotations({{"a", {Y, N, Y}}, {"b", {N, Y, N}}}, {C, U, C});
        const auto h = human_baseline(two);
        CHECK(h.pooled_accuracy == 0.5);
        CHECK(h.per_annotator_accuracy == 0.5);
        CHECK(h.majority_vote_accuracy == 0.5);  // every item splits
        CHECK(h.judgments == 6);
        CHECK(h.annotators == 2);
        CHECK(h.items == 3);
        const auto uneven = annotations({{"a", {Y, Y, Y, Y}}, {"b", {Y, Y}}}, {C, C, U, U});
        CHECK(human_baseline(uneven).pooled_accuracy == 4.0 / 6.0);
        CHECK(human_baseline(uneven).per_annotator_accuracy == 0.75);
    }

    TEST_CASE("missing gold label") {
        auto a = annotations({{"a", {Y, N}}}, {C, U});
        a.gold.erase("i1");
        CHECK_THROWS_AS(human_baseline(a), UsageError);
    }

    TEST_CASE("annotation CSV") {
        testsupport::TempDir dir;
        const auto f = testsupport::write_planted(dir, {.posts = 40});
        const auto corpus = load_corpus(f.corpus).corpus;
        const auto a = load_annotations(f.annotations, corpus);
        CHECK_FALSE(a.judgments.empty());
        CHECK(human_baseline(a).judgments == a.judgments.size());
        const auto bad = dir.write("bad.csv", "annotator,item,judgment\nx,p0,maybe\n");
        CHECK_THROWS_AS(load_annotations(bad, corpus), ParseError);
    }
}

TEST_SUITE("reports") {
    TEST_CASE("JSON output is stable") {
        const auto labels = labels_of(10, 10);
        std::vector<double> x;
        for (std::size_t i = 0; i < 20; ++i) x.push_back(labels[i] == C ? 1.0 + 0.1 * i : -1.0 - 0.1 * i);
        const auto m = columns({{"x", x}}, labels);
        const auto r = evaluate(m, {}, {}, {.folds = 2, .seed = 5});
        const auto a = reports_to_json({r}, "{}");
        CHECK(a == reports_to_json({evaluate(m, {}, {}, {.folds = 2, .seed = 5})}, "{}"));
        CHECK(a.find("\"seed\": 5") != std::string::npos);
        CHECK(model_kind_name(ModelKind::Svm) == "svm");
    }
}
