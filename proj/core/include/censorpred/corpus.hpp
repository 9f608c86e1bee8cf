#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "censorpred/diagnostic.hpp"
#include "censorpred/tokenizer.hpp"

namespace censorpred {

/// Class label. The enumerator order is the fixed class ordering used for
/// tie-breaking and report layout: Censored first.
enum class Label { Censored = 0, Uncensored = 1 };

inline constexpr std::array<Label, 2> kLabels{Label::Censored, Label::Uncensored};

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view text);

struct Post {
    std::string id;
    std::string text;  // cleaned
    Label label = Label::Censored;
    std::string topic;
    std::optional<std::string> date;  // YYYY-MM-DD
    /// Segmentation supplied by an external segmenter; empty when the post
    /// must be segmented with the dictionary.
    std::optional<std::vector<Token>> tokens;

    bool operator==(const Post&) const = default;
};

struct TopicCounts {
    std::string topic;
    std::size_t censored = 0;
    std::size_t uncensored = 0;

    bool operator==(const TopicCounts&) const = default;
};

/// Ordered, immutable collection of posts with unique ids.
class Corpus {
public:
    Corpus() = default;
    /// Throws UsageError on duplicate ids.
    explicit Corpus(std::vector<Post> posts);

    const std::vector<Post>& posts() const noexcept { return posts_; }
    std::size_t size() const noexcept { return posts_.size(); }
    bool empty() const noexcept { return posts_.empty(); }
    const Post& operator[](std::size_t i) const { return posts_[i]; }

    /// Per-topic tallies in order of first appearance.
    const std::vector<TopicCounts>& counts() const noexcept { return counts_; }
    std::size_t count(Label label) const;

    /// Posts whose topic is one of `topics` (all posts when `topics` is empty).
    Corpus filter_topics(const std::vector<std::string>& topics) const;

    bool operator==(const Corpus& other) const { return posts_ == other.posts_; }

private:
    std::vector<Post> posts_;
    std::vector<TopicCounts> counts_;
};

struct CorpusLoad {
    Corpus corpus;
    std::vector<Diagnostic> diagnostics;
};

/// Parses JSON-lines records. Records with unknown labels, duplicate ids,
/// missing fields, exclusion flags or text that cleans to nothing are skipped
/// and reported in `diagnostics`. Throws Error if the file cannot be read.
struct CorpusReadOptions {
    /// When false, records without label or topic are accepted (as
    /// Uncensored with an empty topic); used for posts to be classified.
    bool require_labels = true;
};

CorpusLoad load_corpus(const std::string& path, const CorpusReadOptions& options = {});
CorpusLoad read_corpus(std::istream& in, const std::string& source = "<stream>",
                       const CorpusReadOptions& options = {});

void write_corpus(const Corpus& corpus, std::ostream& out);

/// Strips @-mentions, paired #hashtags# and surrounding whitespace.
std::string clean_text(std::string_view raw);

struct SummaryRow {
    std::string topic;
    std::size_t censored = 0;
    std::size_t uncensored = 0;
    std::optional<std::string> first_date;
    std::optional<std::string> last_date;
};

std::vector<SummaryRow> corpus_summary(const Corpus& corpus);
void print_summary(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace censorpred
