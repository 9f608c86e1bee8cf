#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }
    /// Writes `content` to `name` inside the directory and returns the path.
    std::string write(const std::string& name, const std::string& content) const;

private:
    std::string path_;
};

std::string read_file(const std::string& path);

/// Synthetic corpus in which the classes differ only in how often posts use
/// common (high-frequency, few semantic classes) rather than rare words, and
/// in how often they contain words of one LIWC category ("swear"). Every other
/// resource (keywords, sentiment, idioms, embeddings) is class-independent.
struct PlantedOptions {
    std::size_t posts = 400;
    std::uint64_t seed = 7;
    double common_share_uncensored = 0.75;
    double common_share_censored = 0.25;
    double swear_rate_censored = 0.5;
    double swear_rate_uncensored = 0.2;
    std::size_t dim = 16;
    std::size_t k = 8;
    std::size_t folds = 10;
};

struct PlantedFixture {
    std::string config;  // JSON pipeline config with relative resource paths
    std::string corpus;
    std::string annotations;  // small annotation CSV over the first posts
};

PlantedFixture write_planted(const TempDir& dir, const PlantedOptions& options = {});

}  // namespace testsupport
