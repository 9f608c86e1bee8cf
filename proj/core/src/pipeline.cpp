#include "censorpred/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "censorpred/error.hpp"
#include "json_io.hpp"

namespace censorpred {

using nlohmann::json;

namespace {

std::string resolve(const std::string& path, const std::string& base) {
    if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base) / path).lexically_normal().string();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const auto k : known) ok = ok || k == key;
        if (!ok) throw ConfigError("unknown config key '" + key + "' in " + std::string(where));
    }
}

StandardizationMode parse_standardization(const std::string& s) {
    if (s == "per_fold") return StandardizationMode::PerFold;
    if (s == "global") return StandardizationMode::Global;
    if (s == "none") return StandardizationMode::None;
    throw ConfigError("standardization must be per_fold, global or none (got '" + s + "')");
}

std::string standardization_text(StandardizationMode m) {
    switch (m) {
        case StandardizationMode::PerFold: return "per_fold";
        case StandardizationMode::Global: return "global";
        case StandardizationMode::None: return "none";
    }
    return "per_fold";
}

BinningMode parse_binning(const std::string& s) {
    if (s == "equal_width") return BinningMode::EqualWidth;
    if (s == "equal_frequency") return BinningMode::EqualFrequency;
    if (s == "mdl") return BinningMode::Mdl;
    throw ConfigError("binning mode must be equal_width, equal_frequency or mdl (got '" + s + "')");
}

std::string binning_text(BinningMode m) {
    switch (m) {
        case BinningMode::EqualWidth: return "equal_width";
        case BinningMode::EqualFrequency: return "equal_frequency";
        case BinningMode::Mdl: return "mdl";
    }
    return "equal_width";
}

ModelKind parse_model_kind(std::string_view s) {
    if (s == "nb") return ModelKind::NaiveBayes;
    if (s == "svm" || s == "smo") return ModelKind::Svm;
    throw ConfigError("model must be nb or svm (got '" + std::string(s) + "')");
}

void parse_features(const json& j, FeatureConfig& c) {
    reject_unknown(j,
                   {"families", "eigen_k", "eigen_selection", "covariance_divisor", "readability_mode",
                    "normalize_keywords"},
                   "features");
    if (j.contains("families")) {
        const auto& f = j.at("families");
        reject_unknown(f,
                       {"keywords", "sentiment", "liwc", "word_freq", "char_freq", "semantic", "idioms",
                        "readability", "eigen"},
                       "features.families");
        auto& fam = c.families;
        fam.keywords = get_or(f, "keywords", fam.keywords);
        fam.sentiment = get_or(f, "sentiment", fam.sentiment);
        fam.liwc = get_or(f, "liwc", fam.liwc);
        fam.word_freq = get_or(f, "word_freq", fam.word_freq);
        fam.char_freq = get_or(f, "char_freq", fam.char_freq);
        fam.semantic = get_or(f, "semantic", fam.semantic);
        fam.idioms = get_or(f, "idioms", fam.idioms);
        fam.readability = get_or(f, "readability", fam.readability);
        fam.eigen = get_or(f, "eigen", fam.eigen);
    }
    c.eigen.k = get_or(j, "eigen_k", c.eigen.k);
    const auto sel = get_or<std::string>(j, "eigen_selection", "largest");
    if (sel != "largest" && sel != "smallest") throw ConfigError("eigen_selection must be largest or smallest");
    c.eigen.selection = sel == "smallest" ? EigenSelection::Smallest : EigenSelection::Largest;
    const auto div = get_or<std::string>(j, "covariance_divisor", "sample");
    if (div != "sample" && div != "population") throw ConfigError("covariance_divisor must be sample or population");
    c.eigen.divisor = div == "population" ? CovarianceDivisor::Population : CovarianceDivisor::Sample;
    const auto rm = get_or<std::string>(j, "readability_mode", "zscored");
    if (rm != "zscored" && rm != "raw") throw ConfigError("readability_mode must be zscored or raw");
    c.readability_mode = rm == "raw" ? ReadabilityMode::Raw : ReadabilityMode::ZScored;
    c.normalize_keywords = get_or(j, "normalize_keywords", c.normalize_keywords);
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"resources", "features", "topics", "folds", "seed", "model", "standardization",
                    "standardize_eigen", "binning", "best_top_n", "frequency_rare_count"},
                   "config");
    PipelineConfig c;
    if (j.contains("resources")) {
        const auto& r = j.at("resources");
        reject_unknown(r,
                       {"corpus", "dictionary", "keywords", "sentiment_scores", "sentiment_lexicon", "liwc",
                        "word_freq", "char_freq", "thesaurus", "idioms", "stopwords", "embeddings"},
                       "resources");
        auto& p = c.paths;
        auto path = [&](const char* key) { return resolve(get_or<std::string>(r, key, ""), base_dir); };
        p.corpus = path("corpus");
        p.dictionary = path("dictionary");
        if (r.contains("keywords")) {
            const auto& k = r.at("keywords");
            if (k.is_string()) {
                p.keywords.push_back(resolve(k.get<std::string>(), base_dir));
            } else if (k.is_array()) {
                for (const auto& item : k) {
                    if (!item.is_string()) throw ConfigError("resources.keywords entries must be strings");
                    p.keywords.push_back(resolve(item.get<std::string>(), base_dir));
                }
            } else {
                throw ConfigError("resources.keywords must be a string or a list");
            }
        }
        p.sentiment_scores = path("sentiment_scores");
        p.sentiment_lexicon = path("sentiment_lexicon");
        p.liwc = path("liwc");
        p.word_freq = path("word_freq");
        p.char_freq = path("char_freq");
        p.thesaurus = path("thesaurus");
        p.idioms = path("idioms");
        p.stopwords = path("stopwords");
        p.embeddings = path("embeddings");
    }
    if (j.contains("features")) parse_features(j.at("features"), c.features);
    c.topics = get_or(j, "topics", c.topics);
    c.folds = get_or(j, "folds", c.folds);
    c.seed = get_or(j, "seed", c.seed);
    if (j.contains("model")) {
        const auto& m = j.at("model");
        reject_unknown(m, {"type", "C", "tolerance", "seed", "max_passes"}, "model");
        c.model.kind = parse_model_kind(get_or<std::string>(m, "type", "nb"));
        c.model.svm.C = get_or(m, "C", c.model.svm.C);
        c.model.svm.tolerance = get_or(m, "tolerance", c.model.svm.tolerance);
        c.model.svm.seed = get_or(m, "seed", c.model.svm.seed);
        c.model.svm.max_passes = get_or(m, "max_passes", c.model.svm.max_passes);
        if (!(c.model.svm.C > 0.0)) throw ConfigError("model.C must be positive");
        if (!(c.model.svm.tolerance > 0.0)) throw ConfigError("model.tolerance must be positive");
    }
    c.standardization = parse_standardization(get_or<std::string>(j, "standardization", "per_fold"));
    c.standardize.eigen_columns = get_or(j, "standardize_eigen", c.standardize.eigen_columns);
    if (j.contains("binning")) {
        const auto& b = j.at("binning");
        reject_unknown(b, {"mode", "bins"}, "binning");
        c.binning.mode = parse_binning(get_or<std::string>(b, "mode", "equal_width"));
        c.binning.bins = get_or(b, "bins", c.binning.bins);
        if (c.binning.bins < 2) throw ConfigError("binning.bins must be at least 2");
    }
    if (j.contains("best_top_n") && !j.at("best_top_n").is_null()) {
        c.best_top_n = get_or<std::size_t>(j, "best_top_n", 0);
    }
    c.rare_count = get_or(j, "frequency_rare_count", c.rare_count);
    if (c.folds < 2) throw ConfigError("folds must be at least 2");
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto base = std::filesystem::path(path).parent_path().string();
    return parse_config(ss.str(), base);
}

std::string config_to_json(const PipelineConfig& c) {
    json j;
    const auto& p = c.paths;
    j["resources"] = {{"corpus", p.corpus},
                      {"dictionary", p.dictionary},
                      {"keywords", p.keywords},
                      {"sentiment_scores", p.sentiment_scores},
                      {"sentiment_lexicon", p.sentiment_lexicon},
                      {"liwc", p.liwc},
                      {"word_freq", p.word_freq},
                      {"char_freq", p.char_freq},
                      {"thesaurus", p.thesaurus},
                      {"idioms", p.idioms},
                      {"stopwords", p.stopwords},
                      {"embeddings", p.embeddings}};
    j["features"] = detail::feature_config_json(c.features);
    j["topics"] = c.topics;
    j["folds"] = c.folds;
    j["seed"] = c.seed;
    j["model"] = {{"type", model_kind_name(c.model.kind)},
                  {"C", c.model.svm.C},
                  {"tolerance", c.model.svm.tolerance},
                  {"seed", c.model.svm.seed},
                  {"max_passes", c.model.svm.max_passes}};
    j["standardization"] = standardization_text(c.standardization);
    j["standardize_eigen"] = c.standardize.eigen_columns;
    j["binning"] = {{"mode", binning_text(c.binning.mode)}, {"bins", c.binning.bins}};
    j["best_top_n"] = c.best_top_n ? json(*c.best_top_n) : json(nullptr);
    j["frequency_rare_count"] = c.rare_count;
    return j.dump();
}

void validate_config(const PipelineConfig& c) {
    const auto& f = c.features.families;
    const auto& p = c.paths;
    std::vector<std::string> missing;
    if (p.corpus.empty()) missing.push_back("corpus");
    if (f.keywords && p.keywords.empty()) missing.push_back("keywords");
    if (f.sentiment && p.sentiment_scores.empty() && p.sentiment_lexicon.empty()) {
        missing.push_back("sentiment_scores or sentiment_lexicon");
    }
    if (f.liwc && p.liwc.empty()) missing.push_back("liwc");
    if ((f.word_freq || f.readability) && p.word_freq.empty()) missing.push_back("word_freq");
    if ((f.char_freq || f.readability) && p.char_freq.empty()) missing.push_back("char_freq");
    if ((f.semantic || f.readability) && p.thesaurus.empty()) missing.push_back("thesaurus");
    if (f.eigen && p.embeddings.empty()) missing.push_back("embeddings");
    if (!missing.empty()) {
        std::string msg = "enabled feature families lack resource paths:";
        for (const auto& m : missing) msg += " " + m;
        throw ConfigError(msg);
    }
}

LoadedResources load_resources(const PipelineConfig& c) {
    LoadedResources out;
    auto& r = out.resources;
    const auto& p = c.paths;
    const auto& f = c.features.families;
    if (!p.dictionary.empty()) r.dictionary = load_dictionary(p.dictionary);
    if (f.keywords) {
        for (const auto& path : p.keywords) r.keywords.push_back(load_keywords(path));
    }
    if (f.sentiment) {
        if (!p.sentiment_scores.empty()) {
            r.sentiment = std::make_shared<ScoreFileSentiment>(ScoreFileSentiment::load(p.sentiment_scores));
        } else if (!p.sentiment_lexicon.empty()) {
            r.sentiment = std::make_shared<LexiconSentiment>(load_sentiment_lexicon(p.sentiment_lexicon));
        }
    }
    if (f.liwc && !p.liwc.empty()) r.liwc = load_liwc(p.liwc);
    const bool readability = f.readability;
    if ((f.word_freq || readability) && !p.word_freq.empty()) {
        r.word_freq = load_frequency_table(p.word_freq, FrequencyKind::Word, c.rare_count);
    }
    if ((f.char_freq || readability) && !p.char_freq.empty()) {
        r.char_freq = load_frequency_table(p.char_freq, FrequencyKind::Character, c.rare_count);
    }
    if ((f.semantic || readability) && !p.thesaurus.empty()) r.thesaurus = load_thesaurus(p.thesaurus);
    if ((f.idioms || readability) && !p.idioms.empty()) r.idioms = load_idioms(p.idioms);
    if (!p.stopwords.empty()) r.stopwords = load_stopwords(p.stopwords);
    if (f.eigen && !p.embeddings.empty()) {
        auto e = load_embeddings(p.embeddings);
        r.embeddings = std::move(e.table);
        out.diagnostics.insert(out.diagnostics.end(), e.diagnostics.begin(), e.diagnostics.end());
    }
    return out;
}

CorpusLoad load_pipeline_corpus(const PipelineConfig& c) {
    if (c.paths.corpus.empty()) throw ConfigError("no corpus path configured");
    auto load = load_corpus(c.paths.corpus);
    if (!c.topics.empty()) {
        load.corpus = load.corpus.filter_topics(c.topics);
        if (load.corpus.empty()) throw UsageError("topic filter selects no posts");
    }
    return load;
}

std::vector<std::string> resolve_feature_set(const FeatureMatrix& m, std::string_view spec,
                                             const FeatureRanking* ranking, std::optional<std::size_t> top_n) {
    if (spec == "all") return m.names;
    if (spec == "eigen" || spec == "eigenvalues") return m.names_in(FeatureGroup::Eigen);
    if (spec == "linguistic" || spec == "ling") return m.names_in(FeatureGroup::Linguistic);
    if (spec == "best") {
        if (!ranking) throw UsageError("feature set 'best' needs an information-gain ranking");
        auto best = ranking->best(top_n);
        if (best.empty()) throw UsageError("no feature has positive mean information gain; 'best' set is empty");
        return best;
    }
    std::vector<std::string> names;
    std::set<std::string> seen;
    std::string_view rest = spec;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        auto name = rest.substr(0, comma);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (!name.empty()) {
            (void)m.column(name);  // throws on unknown names
            if (seen.emplace(name).second) names.emplace_back(name);
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (names.empty()) throw UsageError("empty feature set '" + std::string(spec) + "'");
    return names;
}

std::vector<GridEntry> parse_grid(std::string_view text) {
    if (text == "default" || text.empty()) {
        text = "nb:all;nb:eigen;nb:linguistic;nb:best;svm:all;svm:eigen;svm:linguistic;svm:best";
    }
    // Entries are separated by ';' so that a set may itself be a comma list.
    // A plain comma list of model:set pairs is accepted as well.
    const char sep = text.find(';') != std::string_view::npos ? ';' : ',';
    std::vector<GridEntry> grid;
    std::string_view rest = text;
    std::optional<std::size_t> last;
    while (!rest.empty()) {
        const auto cut = rest.find(sep);
        auto item = rest.substr(0, cut);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) {
            const auto colon = item.find(':');
            if (colon == std::string_view::npos) {
                if (sep == ',' && last) {
                    grid[*last].features += "," + std::string(item);
                } else {
                    throw UsageError("grid entry '" + std::string(item) + "' is not model:features");
                }
            } else {
                GridEntry e;
                try {
                    e.model = parse_model_kind(item.substr(0, colon));
                } catch (const ConfigError& err) {
                    throw UsageError(err.what());
                }
                e.features = std::string(item.substr(colon + 1));
                if (e.features.empty()) throw UsageError("grid entry '" + std::string(item) + "' has no feature set");
                grid.push_back(std::move(e));
                last = grid.size() - 1;
            }
        }
        if (cut == std::string_view::npos) break;
        rest.remove_prefix(cut + 1);
    }
    if (grid.empty()) throw UsageError("empty evaluation grid");
    return grid;
}

std::string row_name(ModelKind model, std::string_view set, std::size_t count) {
    std::string label;
    if (set == "all") {
        label = "all";
    } else if (set == "eigen" || set == "eigenvalues") {
        label = "eigenvalues";
    } else if (set == "linguistic" || set == "ling") {
        label = "linguistic";
    } else if (set == "best") {
        label = "best features";
    } else {
        label = std::string(set);
    }
    return (model == ModelKind::NaiveBayes ? "NB " : "SMO ") + label + " (" + std::to_string(count) + ")";
}

std::vector<EvalReport> run_grid(const FeatureMatrix& m, const std::vector<GridEntry>& grid,
                                 const PipelineConfig& c) {
    std::optional<FeatureRanking> ranking;
    for (const auto& e : grid) {
        if (e.features == "best" && !ranking) ranking = rank_features(m, c.binning, c.folds, c.seed);
    }
    EvalOptions options;
    options.folds = c.folds;
    options.seed = c.seed;
    options.standardization = c.standardization;
    options.standardize = c.standardize;

    std::vector<EvalReport> reports;
    for (const auto& e : grid) {
        const auto names = resolve_feature_set(m, e.features, ranking ? &*ranking : nullptr, c.best_top_n);
        ModelSpec spec = c.model;
        spec.kind = e.model;
        auto report = evaluate(m, spec, names, options);
        report.name = row_name(e.model, e.features, names.size());
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace censorpred
