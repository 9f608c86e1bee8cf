#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "censorpred/analysis.hpp"
#include "censorpred/corpus.hpp"
#include "censorpred/error.hpp"
#include "censorpred/features.hpp"
#include "censorpred/models.hpp"
#include "censorpred/pipeline.hpp"
#include "censorpred/tokenizer.hpp"

namespace censorpred::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string corpus;
    std::string matrix;
    std::string out;
    std::string model;
    std::string features;
    std::string grid;
    std::string family;
    std::string standardization;
    std::string binning;
    std::string annotations;
    std::string model_file;
    std::string input;
    std::string dictionary;
    std::vector<std::string> topics;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t bins = 10;
    std::size_t top_n = 0;
    std::size_t limit = 0;
    double C = 1.0;
    bool json = false;

    // Which numeric overrides were given on the command line.
    bool has_folds = false;
    bool has_seed = false;
    bool has_bins = false;
    bool has_top_n = false;
    bool has_C = false;
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw Error("write failed for '" + path.string() + "'");
}

PipelineConfig effective_config(const Options& o) {
    PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    if (!o.corpus.empty()) c.paths.corpus = o.corpus;
    if (!o.dictionary.empty()) c.paths.dictionary = o.dictionary;
    if (!o.topics.empty()) c.topics = o.topics;
    if (o.has_folds) c.folds = o.folds;
    if (o.has_seed) c.seed = o.seed;
    if (o.has_C) c.model.svm.C = o.C;
    if (o.has_bins) c.binning.bins = o.bins;
    if (o.has_top_n) c.best_top_n = o.top_n;
    if (!o.model.empty()) {
        if (o.model == "nb") {
            c.model.kind = ModelKind::NaiveBayes;
        } else if (o.model == "svm" || o.model == "smo") {
            c.model.kind = ModelKind::Svm;
        } else {
            throw UsageError("--model must be nb or svm");
        }
    }
    if (!o.standardization.empty()) {
        if (o.standardization == "per_fold") {
            c.standardization = StandardizationMode::PerFold;
        } else if (o.standardization == "global") {
            c.standardization = StandardizationMode::Global;
        } else if (o.standardization == "none") {
            c.standardization = StandardizationMode::None;
        } else {
            throw UsageError("--standardization must be per_fold, global or none");
        }
    }
    if (!o.binning.empty()) {
        if (o.binning == "equal_width") {
            c.binning.mode = BinningMode::EqualWidth;
        } else if (o.binning == "equal_frequency") {
            c.binning.mode = BinningMode::EqualFrequency;
        } else if (o.binning == "mdl") {
            c.binning.mode = BinningMode::Mdl;
        } else {
            throw UsageError("--binning must be equal_width, equal_frequency or mdl");
        }
    }
    if (!o.family.empty()) {
        if (o.family == "eigen-only" || o.family == "eigen") {
            c.features.families = FeatureFamilies::only_eigen();
        } else if (o.family == "linguistic") {
            c.features.families.eigen = false;
        } else if (o.family != "all") {
            throw UsageError("--family must be all, linguistic or eigen-only");
        }
    }
    if (c.folds < 2) throw UsageError("--folds must be at least 2");
    if (c.binning.bins < 2) throw UsageError("--bins must be at least 2");
    return c;
}

/// Effective config plus the inputs that do not live in PipelineConfig.
std::string provenance(const PipelineConfig& c, const Options& o) {
    json j = json::parse(config_to_json(c));
    if (!o.matrix.empty()) j["matrix"] = o.matrix;
    if (!o.grid.empty()) j["grid"] = o.grid;
    return j.dump();
}

fs::path sidecar_for(const fs::path& csv) {
    auto p = csv;
    p.replace_extension(".stats.json");
    return p;
}

FeatureMatrix featurize(const PipelineConfig& c, std::ostream& err) {
    validate_config(c);
    auto loaded = load_resources(c);
    write_diagnostics(loaded.diagnostics, err);
    auto corpus = load_pipeline_corpus(c);
    write_diagnostics(corpus.diagnostics, err);
    if (corpus.corpus.empty()) throw UsageError("corpus has no usable posts");
    check_resources(c.features, loaded.resources, corpus.corpus);
    return build_matrix(corpus.corpus, loaded.resources, c.features);
}

FeatureMatrix obtain_matrix(const Options& o, const PipelineConfig& c, std::ostream& err) {
    if (o.matrix.empty()) return featurize(c, err);
    if (!o.topics.empty()) throw UsageError("--topic cannot filter a precomputed --matrix; featurize per topic instead");
    std::ifstream in(o.matrix, std::ios::binary);
    if (!in) throw Error("cannot open matrix '" + o.matrix + "'");
    auto m = read_csv(in, o.matrix);
    const auto side = sidecar_for(o.matrix);
    if (fs::exists(side)) {
        std::ifstream s(side, std::ios::binary);
        std::ostringstream ss;
        ss << s.rdbuf();
        stats_from_json(ss.str(), m);
    }
    return m;
}

void emit(const Options& o, std::ostream& out, const std::string& json_text, const std::string& table,
          const std::string& json_name, const std::string& table_name) {
    if (!o.out.empty()) {
        write_file(fs::path(o.out) / json_name, json_text + "\n");
        write_file(fs::path(o.out) / table_name, table);
    }
    out << (o.json ? json_text + "\n" : table);
}

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_segment(const Options& o, std::istream& in, std::ostream& out) {
    const auto c = effective_config(o);
    if (c.paths.dictionary.empty()) throw UsageError("segment needs --dictionary or a config with one");
    const auto dict = load_dictionary(c.paths.dictionary);
    std::ifstream file;
    std::istream* src = &in;
    if (!o.input.empty()) {
        file.open(o.input, std::ios::binary);
        if (!file) throw Error("cannot open input '" + o.input + "'");
        src = &file;
    }
    std::string line;
    while (std::getline(*src, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out << format_tokens(segment(line, dict)) << '\n';
    }
    return 0;
}

int cmd_summary(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    auto load = load_pipeline_corpus(c);
    write_diagnostics(load.diagnostics, err);
    const auto rows = corpus_summary(load.corpus);
    std::ostringstream table;
    print_summary(rows, table);
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"topic", r.topic},
                     {"censored", r.censored},
                     {"uncensored", r.uncensored},
                     {"first_date", r.first_date ? json(*r.first_date) : json(nullptr)},
                     {"last_date", r.last_date ? json(*r.last_date) : json(nullptr)}});
    }
    const json doc = {{"config", json::parse(provenance(c, o))}, {"topics", j}};
    emit(o, out, doc.dump(2), table.str(), "summary.json", "summary.txt");
    return 0;
}

int cmd_featurize(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    const auto m = featurize(c, err);
    std::ostringstream csv;
    write_csv(m, csv);
    json side = json::parse(stats_to_json(m));
    side["config"] = json::parse(provenance(c, o));
    if (o.out.empty()) {
        out << csv.str();
    } else {
        const auto path = fs::path(o.out) / "features.csv";
        write_file(path, csv.str());
        write_file(sidecar_for(path), side.dump(2) + "\n");
    }
    err << "featurized " << m.row_count() << " posts x " << m.column_count() << " features ("
        << m.names_in(FeatureGroup::Linguistic).size() << " linguistic, " << m.names_in(FeatureGroup::Eigen).size()
        << " eigen)\n";
    for (const auto& note : m.notes) err << "note: " << note << '\n';
    return 0;
}

int cmd_evaluate(Options o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    const auto m = obtain_matrix(o, c, err);
    if (o.grid.empty()) {
        if (!o.model.empty() || !o.features.empty()) {
            o.grid = model_kind_name(c.model.kind) + ":" + (o.features.empty() ? "all" : o.features);
            if (o.grid.find(',') != std::string::npos) o.grid += ";";
        } else {
            o.grid = "default";
        }
    }
    const auto reports = run_grid(m, parse_grid(o.grid), c);
    std::ostringstream table;
    print_reports(reports, table);
    emit(o, out, reports_to_json(reports, provenance(c, o)), table.str(), "report.json", "report.txt");
    return 0;
}

int cmd_select(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    const auto m = obtain_matrix(o, c, err);
    const auto ranking = rank_features(m, c.binning, c.folds, c.seed);
    std::ostringstream table;
    print_ranking(ranking, table, o.limit);
    json j = json::parse(ranking_to_json(ranking));
    j["config"] = json::parse(provenance(c, o));
    emit(o, out, j.dump(2), table.str(), "ranking.json", "ranking.txt");
    return 0;
}

int cmd_contrast(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    const auto m = obtain_matrix(o, c, err);
    const std::string spec = o.features.empty() ? "best" : o.features;
    std::optional<FeatureRanking> ranking;
    if (spec == "best") ranking = rank_features(m, c.binning, c.folds, c.seed);
    const auto names = resolve_feature_set(m, spec, ranking ? &*ranking : nullptr, c.best_top_n);
    const auto values = contrast(m, names);
    std::ostringstream table;
    json rows = json::array();
    for (const auto& name : names) {
        const double v = values.at(name);
        table << name << '\t' << format_double("%+.6f", v) << '\t' << (v > 0 ? "uncensored" : v < 0 ? "censored" : "-")
              << '\n';
        rows.push_back({{"feature", name}, {"contrast", v}});
    }
    const json doc = {{"config", json::parse(provenance(c, o))}, {"features", spec}, {"contrast", rows}};
    emit(o, out, doc.dump(2), table.str(), "contrast.json", "contrast.txt");
    return 0;
}

int cmd_kappa(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.annotations.empty()) throw UsageError("kappa needs --annotations");
    const auto c = effective_config(o);
    auto load = load_pipeline_corpus(c);
    write_diagnostics(load.diagnostics, err);
    const auto a = load_annotations(o.annotations, load.corpus);
    const auto k = cohen_kappa(a);
    write_diagnostics(k.notes, err);
    const auto h = human_baseline(a);
    std::ostringstream table;
    table << "annotators              " << h.annotators << '\n'
          << "items                   " << h.items << '\n'
          << "judgments               " << h.judgments << '\n'
          << "annotator pairs         " << k.pairs << '\n'
          << "mean pairwise kappa     " << format_double("%.4f", k.mean_kappa) << '\n'
          << "pooled accuracy         " << format_double("%.4f", h.pooled_accuracy) << '\n'
          << "per-annotator accuracy  " << format_double("%.4f", h.per_annotator_accuracy) << '\n'
          << "majority-vote accuracy  " << format_double("%.4f", h.majority_vote_accuracy) << '\n';
    const json doc = {{"config", json::parse(provenance(c, o))},
                      {"annotations", o.annotations},
                      {"annotators", h.annotators},
                      {"items", h.items},
                      {"judgments", h.judgments},
                      {"kappa", {{"mean", k.mean_kappa}, {"pairs", k.pairs}}},
                      {"human_baseline",
                       {{"pooled_accuracy", h.pooled_accuracy},
                        {"per_annotator_accuracy", h.per_annotator_accuracy},
                        {"majority_vote_accuracy", h.majority_vote_accuracy}}}};
    emit(o, out, doc.dump(2), table.str(), "kappa.json", "kappa.txt");
    return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.model_file.empty()) throw UsageError("train needs --model-file");
    const auto c = effective_config(o);
    const auto raw = obtain_matrix(o, c, err);
    const std::string spec = o.features.empty() ? "all" : o.features;
    std::optional<FeatureRanking> ranking;
    if (spec == "best") ranking = rank_features(raw, c.binning, c.folds, c.seed);
    auto m = raw.select(resolve_feature_set(raw, spec, ranking ? &*ranking : nullptr, c.best_top_n));
    if (c.standardization != StandardizationMode::None) m = standardize(m, c.standardize);

    ModelFile file;
    file.model = c.model.kind == ModelKind::NaiveBayes ? Model(nb_train(m)) : Model(svm_train(m, c.model.svm));
    json tc = json::parse(provenance(c, o));
    tc["features_spec"] = spec;
    file.training_config = tc.dump();
    if (c.standardization != StandardizationMode::None) file.column_stats = m.column_stats;
    file.readability = raw.readability_stats;
    save_model(file, o.model_file);

    std::size_t correct = 0;
    for (std::size_t r = 0; r < m.row_count(); ++r) correct += predict(file.model, m.rows[r]).label == m.labels[r];
    out << "trained " << model_kind_name(c.model.kind) << " on " << m.row_count() << " posts x " << m.column_count()
        << " features; training accuracy "
        << format_double("%.4f", m.row_count() ? static_cast<double>(correct) / static_cast<double>(m.row_count()) : 0.0)
        << '\n';
    if (const auto* svm = std::get_if<SvmModel>(&file.model); svm && !svm->converged) {
        err << "warning: SMO stopped at max_passes before meeting the KKT tolerance\n";
    }
    return 0;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.model_file.empty()) throw UsageError("predict needs --model-file");
    if (o.input.empty() == o.matrix.empty()) throw UsageError("predict needs exactly one of --input or --matrix");
    const auto file = load_model(o.model_file);
    const auto& names = feature_names(file.model);

    FeatureMatrix m;
    if (!o.matrix.empty()) {
        m = obtain_matrix(o, PipelineConfig{}, err);
    } else {
        PipelineConfig c;
        if (!o.config.empty()) {
            c = effective_config(o);
        } else {
            json tc = json::parse(file.training_config);
            for (const char* key : {"matrix", "grid", "features_spec"}) tc.erase(key);
            c = parse_config(tc.dump());
        }
        c.paths.corpus = o.input;
        validate_config(c);
        auto loaded = load_resources(c);
        write_diagnostics(loaded.diagnostics, err);
        CorpusReadOptions read;
        read.require_labels = false;
        auto posts = load_corpus(o.input, read);
        write_diagnostics(posts.diagnostics, err);
        if (posts.corpus.empty()) throw UsageError("no usable posts in '" + o.input + "'");
        check_resources(c.features, loaded.resources, posts.corpus);
        m = build_matrix(posts.corpus, loaded.resources, c.features, file.readability);
    }
    auto sel = m.select(names);
    if (!file.column_stats.empty()) sel = apply_standardization(sel, file.column_stats);

    json rows = json::array();
    std::ostringstream table;
    for (std::size_t r = 0; r < sel.row_count(); ++r) {
        const auto p = predict(file.model, sel.rows[r]);
        table << sel.ids[r] << '\t' << label_name(p.label) << '\t' << format_double("%.6f", p.score) << '\n';
        rows.push_back({{"id", sel.ids[r]}, {"label", label_name(p.label)}, {"score", p.score}});
    }
    const json doc = {{"model_file", o.model_file}, {"predictions", rows}};
    emit(o, out, doc.dump(2), table.str(), "predictions.json", "predictions.txt");
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Censorship prediction for Chinese microblog posts", "censorpred"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON pipeline config")->check(CLI::ExistingFile);
        sub->add_option("--corpus", o.corpus, "Corpus JSON-lines file (overrides config)");
        sub->add_option("--topic", o.topics, "Restrict to topic (repeatable)");
        sub->add_option("--out", o.out, "Directory for output files");
        sub->add_flag("--json", o.json, "Print machine-readable JSON instead of a table");
    };
    auto modelling = [&](CLI::App* sub) {
        sub->add_option("--matrix", o.matrix, "Precomputed feature CSV instead of featurizing");
        sub->add_option("--features", o.features, "all|eigen|linguistic|best|NAME,...");
        sub->add_option("--folds", o.folds, "Cross-validation folds")->each([&](const std::string&) { o.has_folds = true; });
        sub->add_option("--seed", o.seed, "Random seed")->each([&](const std::string&) { o.has_seed = true; });
        sub->add_option("--standardization", o.standardization, "per_fold|global|none");
        sub->add_option("--binning", o.binning, "equal_width|equal_frequency|mdl");
        sub->add_option("--bins", o.bins, "Bins for information gain")->each([&](const std::string&) { o.has_bins = true; });
        sub->add_option("--top-n", o.top_n, "Size of the best-feature set")->each([&](const std::string&) { o.has_top_n = true; });
        sub->add_option("--family", o.family, "all|linguistic|eigen-only");
    };
    auto model_choice = [&](CLI::App* sub) {
        sub->add_option("--model", o.model, "nb|svm");
        sub->add_option("--C", o.C, "SVM regularisation constant")->each([&](const std::string&) { o.has_C = true; });
    };

    auto* seg = app.add_subcommand("segment", "Segment text lines into word/pos tokens");
    common(seg);
    seg->add_option("--dictionary", o.dictionary, "Segmentation dictionary");
    seg->add_option("--input", o.input, "Text file (default stdin)");

    auto* summary = app.add_subcommand("summary", "Per-topic class counts");
    common(summary);

    auto* feat = app.add_subcommand("featurize", "Build the feature matrix");
    common(feat);
    feat->add_option("--family", o.family, "all|linguistic|eigen-only");

    auto* eval = app.add_subcommand("evaluate", "Cross-validated evaluation grid");
    common(eval);
    modelling(eval);
    model_choice(eval);
    eval->add_option("--grid", o.grid, "model:set entries, e.g. nb:all;svm:best, or 'default'");

    auto* sel = app.add_subcommand("select", "Information-gain feature ranking");
    common(sel);
    modelling(sel);
    sel->add_option("--limit", o.limit, "Rows to print (0 = all)");

    auto* con = app.add_subcommand("contrast", "Class mean differences per feature");
    common(con);
    modelling(con);

    auto* kap = app.add_subcommand("kappa", "Annotator agreement and human baseline");
    common(kap);
    kap->add_option("--annotations", o.annotations, "CSV annotator,item,judgment")->check(CLI::ExistingFile);

    auto* train = app.add_subcommand("train", "Train one model on the whole corpus");
    common(train);
    modelling(train);
    model_choice(train);
    train->add_option("--model-file", o.model_file, "Output model path");

    auto* pred = app.add_subcommand("predict", "Classify posts with a saved model");
    common(pred);
    pred->add_option("--model-file", o.model_file, "Saved model")->check(CLI::ExistingFile);
    pred->add_option("--input", o.input, "Posts JSON-lines file (labels optional)");
    pred->add_option("--matrix", o.matrix, "Feature CSV instead of posts");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*seg) return cmd_segment(o, std::cin, out);
        if (*summary) return cmd_summary(o, out, err);
        if (*feat) return cmd_featurize(o, out, err);
        if (*eval) return cmd_evaluate(o, out, err);
        if (*sel) return cmd_select(o, out, err);
        if (*con) return cmd_contrast(o, out, err);
        if (*kap) return cmd_kappa(o, out, err);
        if (*train) return cmd_train(o, out, err);
        if (*pred) return cmd_predict(o, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace censorpred::cli
