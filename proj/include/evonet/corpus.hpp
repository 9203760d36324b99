#pragma once

#include "evonet/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace evonet::corpus {

struct Document {
    std::string id;
    std::string text;
    double ordinal = 0.0;  // position on the evolving dimension (year, rating, ...)
};

/// Lowercases and splits on every non-alphanumeric character. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Posting {
    std::size_t doc;
    std::uint32_t tf;
};

/// Term -> postings over an immutable document collection.
class InvertedIndex {
public:
    /// Throws std::invalid_argument on an empty corpus, duplicate ids, or non-finite ordinals.
    explicit InvertedIndex(std::vector<Document> documents);

    std::size_t num_docs() const noexcept { return documents_.size(); }
    const Document& document(std::size_t i) const { return documents_.at(i); }
    std::size_t doc_length(std::size_t i) const { return lengths_.at(i); }
    double average_length() const noexcept { return average_length_; }

    /// Empty span when the term does not occur.
    std::span<const Posting> postings(const std::string& term) const;

private:
    std::vector<Document> documents_;
    std::vector<std::size_t> lengths_;
    double average_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

InvertedIndex index_corpus(std::vector<Document> documents);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// ln((N - df + 0.5) / (df + 0.5) + 1); never negative.
double bm25_idf(std::size_t num_docs, std::size_t df);

struct ScoredDocument {
    std::size_t doc;  // index into the InvertedIndex
    double score;
};

/// Documents matching at least one query term, by descending score, ties by ascending id.
/// Each distinct query term contributes once. Throws std::invalid_argument when the query has
/// no tokens.
std::vector<ScoredDocument> bm25_rank(std::string_view query, const InvertedIndex& index, const Bm25Params& params = {});

/// Surface form (normalized through tokenize) -> entity id. Multi-word forms allowed.
class EntityVocabulary {
public:
    /// Throws std::invalid_argument if the surface form has no tokens or the id is empty.
    /// A later entry for the same surface replaces the earlier one.
    void add(std::string_view surface, std::string entity_id);

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t longest_form() const noexcept { return longest_; }

    /// Entity for the token run [first, first + length), if any.
    const std::string* find(std::span<const std::string> tokens) const;

    /// Distinct entity ids, sorted.
    std::vector<std::string> entity_ids() const;

private:
    std::map<std::string, std::string> entries_;  // space-joined tokens -> id
    std::size_t longest_ = 0;
};

using EntityCounts = std::map<std::string, int>;

/// Greedy longest-match scan over the document's tokens; matches never overlap.
EntityCounts link_entities(const Document& document, const EntityVocabulary& vocab);

struct GammaPoint {
    std::size_t n = 0;
    std::size_t union_size = 0;
    std::optional<double> gamma;        // n / ln(union_size); empty while union_size <= 1
    std::optional<double> gamma_prime;  // smoothed derivative
};

struct GammaCurve {
    std::vector<GammaPoint> points;  // points[k].n == k + 1
};

inline constexpr std::size_t kSmoothingWindow = 5;
inline constexpr double kDefaultGammaThreshold = 10.0;
inline constexpr double kDefaultConvergenceTol = 0.01;

/// Running entity-set union over documents in rank order, gamma = n / ln|union|, and a
/// derivative from centered differences (one-sided at the ends) smoothed by a centered moving
/// average of kSmoothingWindow points.
GammaCurve gamma_curve(const std::vector<std::set<std::string>>& entity_sets);

/// Largest |gamma'(k) - gamma'(k-1)| over the trailing window ending at n (1-based), or empty
/// if any point it needs is undefined.
std::optional<double> derivative_drift(const GammaCurve& curve, std::size_t n);

/// Smallest n whose derivative drift is within tol and whose gamma exceeds the threshold.
std::optional<std::size_t> select_cutoff(const GammaCurve& curve, double gamma_threshold = kDefaultGammaThreshold,
                                         double convergence_tol = kDefaultConvergenceTol);

/// Fixed-width windows [start + k*width, start + (k+1)*width) for k = 0..floor((end-start)/width).
struct WindowSpec {
    double start = 0.0;
    double end = 0.0;
    double width = 1.0;

    std::size_t num_windows() const;
    double midpoint(std::size_t k) const;
};

struct LinkedDocument {
    Document document;
    EntityCounts entities;
};

struct PanelBuild {
    ObservationPanel panel;
    std::size_t excluded_out_of_range = 0;
    std::vector<double> dropped_windows;  // midpoints of windows with no documents
};

/// One row per in-range document (rank order within each window), one column per entity of
/// entity_set. Throws std::invalid_argument when every window is empty or the windows are malformed.
PanelBuild build_panel(std::span<const LinkedDocument> documents, std::span<const std::string> entity_set,
                       const WindowSpec& windows);

}  // namespace evonet::corpus
