#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "censorpred/error.hpp"
#include "censorpred/models.hpp"
#include "censorpred/random.hpp"
#include "support/oracles.hpp"

using namespace censorpred;

namespace {

FeatureMatrix make(const std::vector<std::vector<double>>& x, const std::vector<Label>& labels) {
    FeatureMatrix m;
    for (std::size_t c = 0; c < x.front().size(); ++c) {
        m.names.push_back("f" + std::to_string(c));
        m.groups.push_back(FeatureGroup::Linguistic);
    }
    for (std::size_t i = 0; i < x.size(); ++i) m.ids.push_back("r" + std::to_string(i));
    m.labels = labels;
    m.rows = x;
    return m;
}

constexpr Label C = Label::Censored;
constexpr Label U = Label::Uncensored;

double margin(const SvmModel& s, const std::vector<double>& x) {
    return std::inner_product(x.begin(), x.end(), s.weights.begin(), 0.0) + s.bias;
}

// Violation of the KKT conditions at point i, 0 when satisfied.
double kkt_violation(const SvmModel& s, const FeatureMatrix& m, std::size_t i) {
    const double y = m.labels[i] == C ? 1.0 : -1.0;
    const double yu = y * margin(s, m.rows[i]);
    const double a = s.alphas[i];
    if (a <= 0.0) return std::max(0.0, 1.0 - yu);
    if (a >= s.C) return std::max(0.0, yu - 1.0);
    return std::abs(yu - 1.0);
}

struct SmallProblem {
    FeatureMatrix m;
    double C;
};

SmallProblem random_problem(Rng& rng) {
    const auto n = 2 + uniform_index(rng, 5);
    const auto d = 1 + uniform_index(rng, 3);
    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    std::vector<Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i == 0 ? C : i == 1 ? U : (uniform_index(rng, 2) ? C : U);
        for (auto& v : x[i]) v = 4.0 * uniform_real(rng) - 2.0 + (y[i] == C ? 0.5 : -0.5);
    }
    const double Cs[] = {0.1, 1.0, 10.0};
    return {make(x, y), Cs[uniform_index(rng, 3)]};
}

}  // namespace

TEST_SUITE("naive bayes") {
    TEST_CASE("hand statistics") {
        const auto nb = nb_train(make({{1.0}, {2.0}, {3.0}, {4.0}}, {C, C, U, U}));
        CHECK(nb.means[0][0] == 1.5);
        CHECK(nb.means[1][0] == 3.5);
        CHECK(nb.variances[0][0] == 0.5);
        CHECK(nb.variances[1][0] == 0.5);
        CHECK(nb.priors[0] == 0.5);
        CHECK(nb.priors[1] == 0.5);
        CHECK(nb_predict(nb, std::vector<double>{1.0}).label == C);
        CHECK(nb_predict(nb, std::vector<double>{4.0}).label == U);
    }

    TEST_CASE("ties go to the censored class") {
        const auto nb = nb_train(make({{1.0}, {2.0}, {3.0}, {4.0}}, {C, C, U, U}));
        const auto p = nb_predict(nb, std::vector<double>{2.5});
        CHECK(p.score == 0.0);
        CHECK(p.label == C);
    }

    TEST_CASE("variance floor keeps everything finite") {
        const auto nb = nb_train(make({{1.0, 0.0}, {1.0, 1.0}, {3.0, 2.0}, {3.0, 3.0}}, {C, C, U, U}));
        CHECK(nb.variance_floor > 0.0);
        CHECK(nb.variances[0][0] == nb.variance_floor);
        const auto p = nb_predict(nb, std::vector<double>{2.0, 1.5});
        CHECK(std::isfinite(p.log_posterior[0]));
        CHECK(std::isfinite(p.log_posterior[1]));
        const auto q = nb_predict(nb, std::vector<double>{1.0, 0.5});
        CHECK(q.label == C);
    }

    TEST_CASE("imbalanced priors") {
        const auto nb = nb_train(make({{0}, {1}, {2}, {3}}, {C, C, C, U}));
        CHECK(nb.priors[0] == 0.75);
        CHECK(nb.priors[1] == 0.25);
    }

    TEST_CASE("single-class data is rejected") {
        CHECK_THROWS_AS(nb_train(make({{0}, {1}}, {C, C})), UsageError);
    }

    TEST_CASE("posteriors match the direct Gaussian computation") {
        Rng rng(31);
        for (int trial = 0; trial < 200; ++trial) {
            const auto n = 4 + uniform_index(rng, 20);
            const auto d = 1 + uniform_index(rng, 5);
            std::vector<std::vector<double>> x(n, std::vector<double>(d));
            std::vector<Label> labels(n);
            std::vector<int> ints(n);
            for (std::size_t i = 0; i < n; ++i) {
                labels[i] = i < 2 ? (i == 0 ? C : U) : (uniform_index(rng, 2) ? C : U);
                ints[i] = static_cast<int>(labels[i]);
                for (auto& v : x[i]) v = 2.0 * uniform_real(rng) - 1.0 + (labels[i] == C ? 0.3 : 0.0);
            }
            if (trial % 10 == 0) {
                for (auto& row : x) row[0] = 0.25;  // constant feature exercises the floor
            }
            const auto nb = nb_train(make(x, labels));
            std::vector<double> q(d);
            for (auto& v : q) v = 2.0 * uniform_real(rng) - 1.0;
            if (trial % 10 == 0) q[0] = 0.25;
            const auto p = nb_predict(nb, q);
            const auto want = testsupport::brute_force_nb_posterior(x, ints, q);
            CHECK(std::abs(std::exp(p.log_posterior[0]) - want[0]) < 1e-9);
            CHECK(std::abs(std::exp(p.log_posterior[1]) - want[1]) < 1e-9);
        }
    }

    TEST_CASE("predictions ignore column order through name binding") {
        const auto m = make({{1, 10}, {2, 12}, {3, 9}, {4, 15}}, {C, C, U, U});
        const auto nb = nb_train(m);
        const std::vector<std::string> reordered{"f1", "f0"};
        const ColumnBinding bind(nb.feature_names, reordered);
        const std::vector<double> row{11.0, 2.5};
        CHECK(nb_predict(nb, bind.gather(row)).log_posterior ==
              nb_predict(nb, std::vector<double>{2.5, 11.0}).log_posterior);
        const std::vector<std::string> missing{"f1"};
        CHECK_THROWS_AS(ColumnBinding(nb.feature_names, missing), UsageError);
    }
}

TEST_SUITE("svm") {
    TEST_CASE("analytic two-point problem") {
        const auto s = svm_train(make({{-1.0}, {1.0}}, {U, C}));
        CHECK(s.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(s.bias) < 1e-6);
        CHECK(s.alphas[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(s.alphas[1] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(s.support_count == 2);
        CHECK(s.converged);
    }

    TEST_CASE("prediction sign convention") {
        SvmModel s;
        s.feature_names = {"f0"};
        s.weights = {1.0};
        s.bias = 0.0;
        const auto pos = svm_predict(s, std::vector<double>{0.5});
        CHECK(pos.label == C);
        CHECK(pos.score == 0.5);
        const auto neg = svm_predict(s, std::vector<double>{-0.5});
        CHECK(neg.label == U);
        CHECK(neg.score == -0.5);
        CHECK(svm_predict(s, std::vector<double>{0.0}).label == C);
    }

    TEST_CASE("small problems match the brute-force dual and satisfy KKT") {
        Rng rng(41);
        for (int trial = 0; trial < 300; ++trial) {
            const auto p = random_problem(rng);
            const auto s = svm_train(p.m, {.C = p.C, .seed = static_cast<std::uint64_t>(trial)});
            std::vector<int> y;
            for (auto l : p.m.labels) y.push_back(l == C ? 1 : -1);
            const auto oracle = testsupport::brute_force_dual(p.m.rows, y, p.C);
            const double got = svm_dual_objective(p.m, s.alphas);
            CHECK(std::abs(got - oracle.objective) <= 1e-4);
            double eq = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                CHECK(s.alphas[i] >= 0.0);
                CHECK(s.alphas[i] <= p.C);
                eq += s.alphas[i] * y[i];
                CHECK(kkt_violation(s, p.m, i) <= 1e-3);
            }
            CHECK(std::abs(eq) < 1e-8);
            for (std::size_t j = 0; j < s.weights.size(); ++j) {
                double w = 0.0;
                for (std::size_t i = 0; i < y.size(); ++i) w += s.alphas[i] * y[i] * p.m.rows[i][j];
                CHECK(std::abs(w - s.weights[j]) < 1e-8);
            }
        }
    }

    TEST_CASE("separable blobs train without errors") {
        Rng rng(5);
        std::vector<std::vector<double>> x;
        std::vector<Label> y;
        for (int i = 0; i < 20; ++i) {
            const bool c = i % 2 == 0;
            x.push_back({(c ? 3.0 : -3.0) + uniform_real(rng), (c ? 2.0 : -2.0) + uniform_real(rng)});
            y.push_back(c ? C : U);
        }
        const auto m = make(x, y);
        const auto s = svm_train(m);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(svm_predict(s, x[i]).label == y[i]);
    }

    TEST_CASE("duplicating the data keeps the decision function") {
        const std::vector<std::vector<double>> x{{0, 0}, {1, 2}, {2, 1}, {3, 3}, {4, 2}, {0.5, 3}};
        const std::vector<Label> y{U, U, C, C, C, U};
        auto xx = x;
        xx.insert(xx.end(), x.begin(), x.end());
        auto yy = y;
        yy.insert(yy.end(), y.begin(), y.end());
        // Both problems are solved to a tight tolerance so the comparison
        // measures the optimum, not the stopping rule. C is halved for the
        // doubled data, which leaves the optimal hyperplane unchanged.
        const auto a = svm_train(make(x, y), {.C = 1.0, .tolerance = 1e-9});
        const auto b = svm_train(make(xx, yy), {.C = 0.5, .tolerance = 1e-9});
        const auto c = svm_train(make(xx, yy), {.C = 1.0, .tolerance = 1e-9});
        for (const auto& q : {std::vector<double>{1, 1}, std::vector<double>{3, 0}, std::vector<double>{0, 4}}) {
            CHECK(std::abs(margin(a, q) - margin(b, q)) < 1e-6);
        }
        // With the same C on separable data the hard-margin solution is reached either way.
        const auto hard_a = svm_train(make(x, y), {.C = 1000.0, .tolerance = 1e-9});
        for (const auto& q : {std::vector<double>{1, 1}, std::vector<double>{3, 0}}) {
            CHECK(std::abs(margin(hard_a, q) - margin(svm_train(make(xx, yy), {.C = 1000.0, .tolerance = 1e-9}), q)) <
                  1e-6);
        }
        (void)c;
    }

    TEST_CASE("example order does not change the decision function") {
        Rng rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<double>> x;
            std::vector<Label> y;
            for (int i = 0; i < 12; ++i) {
                const bool c = i % 2 == 0;
                x.push_back({uniform_real(rng) + (c ? 0.4 : 0.0), uniform_real(rng)});
                y.push_back(c ? C : U);
            }
            std::vector<std::size_t> order(x.size());
            std::iota(order.begin(), order.end(), 0);
            shuffle(std::span<std::size_t>(order), rng);
            std::vector<std::vector<double>> xs;
            std::vector<Label> ys;
            for (auto i : order) {
                xs.push_back(x[i]);
                ys.push_back(y[i]);
            }
            const SvmOptions tight{.C = 1.0, .tolerance = 1e-10};
            const auto a = svm_train(make(x, y), tight);
            const auto b = svm_train(make(xs, ys), tight);
            for (const auto& q : x) CHECK(std::abs(margin(a, q) - margin(b, q)) < 1e-6);
        }
    }

    TEST_CASE("bad inputs") {
        CHECK_THROWS_AS(svm_train(make({{0}, {1}}, {U, U})), UsageError);
        FeatureMatrix empty;
        CHECK_THROWS_AS(svm_train(empty), UsageError);
        CHECK_THROWS_AS(svm_train(make({{0}, {1}}, {U, C}), {.C = 0.0}), UsageError);
    }
}

TEST_SUITE("model files") {
    TEST_CASE("naive Bayes round-trip reproduces log-posteriors") {
        const auto m = make({{1.1, 0.3}, {2.7, -1.0}, {3.3, 0.9}, {4.9, 1.7}, {0.2, 0.4}}, {C, C, U, U, C});
        ModelFile f{nb_train(m), R"({"k":1})", {}, std::nullopt};
        std::stringstream io;
        save_model(f, io);
        const auto back = load_model(io);
        const std::vector<double> q{2.123456789, -0.3333333};
        CHECK(predict(back.model, q).log_posterior == predict(f.model, q).log_posterior);
        CHECK(back.training_config == f.training_config);
    }

    TEST_CASE("SVM round-trip reproduces margins") {
        const auto m = make({{1.1, 0.3}, {2.7, -1.0}, {3.3, 0.9}, {4.9, 1.7}, {0.2, 0.4}}, {C, C, U, U, C});
        ModelFile f{svm_train(m), "{}", {{0.5, 2.0, false, true}, {0.1, 0.7, false, true}}, std::nullopt};
        std::stringstream io;
        save_model(f, io);
        const auto back = load_model(io);
        const std::vector<double> q{0.1 / 3.0, 7.0 / 9.0};
        CHECK(predict(back.model, q).score == predict(f.model, q).score);
        REQUIRE(back.column_stats.size() == 2);
        CHECK(back.column_stats[1].stdev == 0.7);
    }

    TEST_CASE("corrupt files, unknown types and version mismatch") {
        std::stringstream garbage("{not json");
        CHECK_THROWS_AS(load_model(garbage), ParseError);
        std::stringstream unknown(R"({"format_version":1,"type":"random_forest","feature_names":[]})");
        CHECK_THROWS_AS(load_model(unknown), ParseError);
        const auto m = make({{0.0}, {1.0}}, {U, C});
        ModelFile f{nb_train(m), "{}", {}, std::nullopt};
        std::stringstream io;
        save_model(f, io);
        auto text = io.str();
        const auto pos = text.find("\"format_version\": 1");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, std::string("\"format_version\": 1").size(), "\"format_version\": 99");
        std::stringstream newer(text);
        CHECK_THROWS_AS(load_model(newer), ParseError);
    }
}
