#include "fixtures.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "censorpred/random.hpp"
#include "censorpred/utf8.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using censorpred::Rng;
using censorpred::uniform_index;
using censorpred::uniform_real;

TempDir::TempDir() {
    auto pattern = (fs::temp_directory_path() / "censorpred-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::write(const std::string& name, const std::string& content) const {
    const auto p = file(name);
    fs::create_directories(fs::path(p).parent_path());
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + p);
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

namespace {

std::string chars(char32_t first, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += censorpred::utf8::encode(first + static_cast<char32_t>(i));
    return s;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

PlantedFixture write_planted(const TempDir& dir, const PlantedOptions& o) {
    Rng rng(o.seed);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * uniform_real(rng); };

    // Each word owns its characters, so forward maximum matching recovers
    // exactly the words a post was built from.
    std::vector<std::string> common;
    std::vector<std::string> rare;
    std::vector<std::string> neutral;
    std::vector<std::string> swear;
    std::vector<std::string> idioms;
    for (std::size_t i = 0; i < 60; ++i) common.push_back(chars(0x4E00 + 2 * i, 2));
    for (std::size_t i = 0; i < 60; ++i) rare.push_back(chars(0x8000 + 2 * i, 2));
    for (std::size_t i = 0; i < 40; ++i) neutral.push_back(chars(0x6000 + 2 * i, 2));
    for (std::size_t i = 0; i < 4; ++i) swear.push_back(chars(0x9A00 + 2 * i, 2));
    for (std::size_t i = 0; i < 3; ++i) idioms.push_back(chars(0x5000 + 4 * i, 4));
    const std::string stop = "的";

    std::ostringstream dict;
    for (const auto& w : common) dict << w << "\t10\tn\n";
    for (const auto& w : rare) dict << w << "\t1\tn\n";
    for (const auto& w : neutral) dict << w << "\t5\tn\n";
    for (const auto& w : swear) dict << w << "\t1\tn\n";
    for (const auto& w : idioms) dict << w << "\t1\ti\n";
    dict << stop << "\t100\tuj\n";

    std::ostringstream char_freq;
    std::ostringstream word_freq;
    for (const auto& w : common) {
        for (const auto& cp : censorpred::utf8::decode(w)) {
            char_freq << censorpred::utf8::encode(cp.value) << '\t' << num(between(0.3, 2.0)) << '\n';
        }
        word_freq << w << '\t' << num(between(0.3, 2.0)) << '\n';
    }
    for (const auto& w : rare) {
        for (const auto& cp : censorpred::utf8::decode(w)) {
            char_freq << censorpred::utf8::encode(cp.value) << '\t' << num(between(0.0005, 0.005)) << '\n';
        }
    }
    for (const auto& w : neutral) {
        for (const auto& cp : censorpred::utf8::decode(w)) {
            char_freq << censorpred::utf8::encode(cp.value) << '\t' << num(between(0.01, 0.05)) << '\n';
        }
        word_freq << w << '\t' << num(between(0.01, 0.05)) << '\n';
    }
    for (const auto& w : swear) {
        for (const auto& cp : censorpred::utf8::decode(w)) {
            char_freq << censorpred::utf8::encode(cp.value) << '\t' << num(between(0.01, 0.1)) << '\n';
        }
        word_freq << w << '\t' << num(between(0.005, 0.05)) << '\n';
    }
    char_freq << stop << "\t3.5\n";
    word_freq << stop << "\t4.0\n";

    // Common and neutral words fall in two top-level classes, rare words anywhere.
    std::ostringstream thesaurus;
    for (std::size_t i = 0; i < common.size(); ++i) {
        thesaurus << (i % 2 ? "Aa01A01= " : "Ba01A01= ") << common[i] << '\n';
    }
    for (std::size_t i = 0; i < neutral.size(); ++i) {
        thesaurus << (i % 2 ? "Aa02A01= " : "Ba02A01= ") << neutral[i] << '\n';
    }
    for (const auto& w : rare) {
        thesaurus << static_cast<char>('A' + uniform_index(rng, 12)) << "b02B02= " << w << '\n';
    }

    std::ostringstream liwc;
    liwc << "%\n1\tposemo\n2\tnegemo\n3\tswear\n4\tsocial\n5\tcogmech\n%\n";
    for (const auto& w : swear) liwc << w << "\t3\n";
    // The other categories cover only neutral words, which both classes use
    // at the same rate.
    for (std::size_t i = 0; i < 32; ++i) liwc << neutral[i] << '\t' << 1 + (i % 2) + 3 * ((i / 2) % 2) << '\n';
    liwc << censorpred::utf8::encode(0x6000 + 70) << "*\t4 5\n";  // wildcard over a neutral word

    std::ostringstream keywords;
    keywords << "# class-independent terms\n";
    for (std::size_t i = 0; i < 4; ++i) keywords << neutral[32 + i] << '\n';

    std::ostringstream sentiment;
    for (std::size_t i = 0; i < 12; ++i) sentiment << neutral[i] << (i % 3 ? "\tpos\n" : "\tneg\n");

    std::ostringstream embeddings;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::string> vocab = common;
    vocab.insert(vocab.end(), rare.begin(), rare.end());
    vocab.insert(vocab.end(), neutral.begin(), neutral.end());
    vocab.insert(vocab.end(), swear.begin(), swear.end());
    vocab.insert(vocab.end(), idioms.begin(), idioms.end());
    embeddings << vocab.size() << ' ' << o.dim << '\n';
    for (const auto& w : vocab) {
        embeddings << w;
        for (std::size_t d = 0; d < o.dim; ++d) embeddings << ' ' << num(gauss(rng));
        embeddings << '\n';
    }

    std::ostringstream corpus;
    std::ostringstream annotations;
    annotations << "annotator,item,judgment\n";
    for (std::size_t i = 0; i < o.posts; ++i) {
        const bool censored = i % 2 == 0;
        const double share = censored ? o.common_share_censored : o.common_share_uncensored;
        const std::size_t words = 8 + uniform_index(rng, 13);
        std::string text = i % 7 == 0 ? "@路人甲 " : "";
        for (std::size_t w = 0; w < words; ++w) {
            const auto& pool = uniform_real(rng) < share ? common : rare;
            text += pool[uniform_index(rng, pool.size())];
            if (uniform_real(rng) < 0.05) text += stop;
        }
        const std::size_t fillers = 2 + uniform_index(rng, 3);
        for (std::size_t w = 0; w < fillers; ++w) text += neutral[uniform_index(rng, neutral.size())];
        if (uniform_real(rng) < (censored ? o.swear_rate_censored : o.swear_rate_uncensored)) {
            text += swear[uniform_index(rng, swear.size())];
        }
        if (uniform_real(rng) < 0.1) text += idioms[uniform_index(rng, idioms.size())];
        text += uniform_real(rng) < 0.5 ? "。" : "，好";
        const std::string id = "p" + std::to_string(1000 + i);
        const int day = 1 + static_cast<int>(uniform_index(rng, 28));
        char date[16];
        std::snprintf(date, sizeof date, "2013-%02d-%02d", 1 + static_cast<int>(i % 12), day);
        corpus << "{\"id\":\"" << id << "\",\"text\":\"" << text << "\",\"label\":\""
               << (censored ? "censored" : "uncensored") << "\",\"topic\":\"" << (i % 3 ? "alpha" : "beta")
               << "\",\"date\":\"" << date << "\"}\n";
        if (i < 20) {
            for (int a = 0; a < 4; ++a) {
                const bool says_censored = uniform_real(rng) < (censored ? 0.7 : 0.4);
                annotations << "judge" << a << ',' << id << ',' << (says_censored ? "yes" : "no") << '\n';
            }
        }
    }

    PlantedFixture f;
    dir.write("res/dict.tsv", dict.str());
    dir.write("res/charfreq.tsv", char_freq.str());
    dir.write("res/wordfreq.tsv", word_freq.str());
    dir.write("res/thesaurus.txt", thesaurus.str());
    dir.write("res/liwc.dic", liwc.str());
    dir.write("res/keywords.txt", keywords.str());
    dir.write("res/sentiment.tsv", sentiment.str());
    dir.write("res/idioms.txt", idioms[0] + "\n" + idioms[1] + "\n");
    dir.write("res/stopwords.txt", stop + "\n");
    dir.write("res/vectors.txt", embeddings.str());
    f.corpus = dir.write("corpus.jsonl", corpus.str());
    f.annotations = dir.write("annotations.csv", annotations.str());

    std::ostringstream config;
    config << "{\n"
           << "  \"resources\": {\n"
           << "    \"corpus\": \"corpus.jsonl\",\n"
           << "    \"dictionary\": \"res/dict.tsv\",\n"
           << "    \"keywords\": [\"res/keywords.txt\"],\n"
           << "    \"sentiment_lexicon\": \"res/sentiment.tsv\",\n"
           << "    \"liwc\": \"res/liwc.dic\",\n"
           << "    \"word_freq\": \"res/wordfreq.tsv\",\n"
           << "    \"char_freq\": \"res/charfreq.tsv\",\n"
           << "    \"thesaurus\": \"res/thesaurus.txt\",\n"
           << "    \"idioms\": \"res/idioms.txt\",\n"
           << "    \"stopwords\": \"res/stopwords.txt\",\n"
           << "    \"embeddings\": \"res/vectors.txt\"\n"
           << "  },\n"
           << "  \"features\": {\"eigen_k\": " << o.k << "},\n"
           << "  \"folds\": " << o.folds << ",\n"
           << "  \"seed\": 11\n"
           << "}\n";
    f.config = dir.write("config.json", config.str());
    return f;
}

}  // namespace testsupport
