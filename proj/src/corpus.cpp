#include "evonet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace evonet::corpus {

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

InvertedIndex::InvertedIndex(std::vector<Document> documents) : documents_(std::move(documents))
{
    if (documents_.empty()) {
        throw std::invalid_argument("cannot index an empty corpus");
    }
    std::unordered_set<std::string> ids;
    std::size_t total = 0;
    lengths_.reserve(documents_.size());
    for (std::size_t d = 0; d < documents_.size(); ++d) {
        const auto& doc = documents_[d];
        if (!ids.insert(doc.id).second) {
            throw std::invalid_argument("duplicate document id: " + doc.id);
        }
        if (!std::isfinite(doc.ordinal)) {
            throw std::invalid_argument("document " + doc.id + " has a non-finite ordinal");
        }
        const auto tokens = tokenize(doc.text);
        lengths_.push_back(tokens.size());
        total += tokens.size();
        std::map<std::string, std::uint32_t> tf;
        for (const auto& tok : tokens) {
            ++tf[tok];
        }
        for (auto& [term, count] : tf) {
            postings_[term].push_back({d, count});
        }
    }
    average_length_ = static_cast<double>(total) / static_cast<double>(documents_.size());
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const
{
    const auto it = postings_.find(term);
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

InvertedIndex index_corpus(std::vector<Document> documents)
{
    return InvertedIndex(std::move(documents));
}

double bm25_idf(std::size_t num_docs, std::size_t df)
{
    const double n = static_cast<double>(num_docs);
    const double f = static_cast<double>(df);
    return std::log((n - f + 0.5) / (f + 0.5) + 1.0);
}

std::vector<ScoredDocument> bm25_rank(std::string_view query, const InvertedIndex& index, const Bm25Params& params)
{
    auto terms = tokenize(query);
    if (terms.empty()) {
        throw std::invalid_argument("query has no tokens");
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    std::vector<double> score(index.num_docs(), 0.0);
    const double avgdl = index.average_length();
    for (const auto& term : terms) {
        const auto postings = index.postings(term);
        if (postings.empty()) {
            continue;
        }
        const double idf = bm25_idf(index.num_docs(), postings.size());
        for (const auto& p : postings) {
            const double tf = p.tf;
            const double len_ratio = avgdl > 0.0 ? static_cast<double>(index.doc_length(p.doc)) / avgdl : 0.0;
            const double norm = params.k1 * (1.0 - params.b + params.b * len_ratio);
            score[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + norm);
        }
    }

    std::vector<ScoredDocument> ranked;
    for (std::size_t d = 0; d < score.size(); ++d) {
        if (score[d] > 0.0) {
            ranked.push_back({d, score[d]});
        }
    }
    std::sort(ranked.begin(), ranked.end(), [&](const ScoredDocument& a, const ScoredDocument& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return index.document(a.doc).id < index.document(b.doc).id;
    });
    return ranked;
}

namespace {

std::string join(std::span<const std::string> tokens)
{
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

}  // namespace

void EntityVocabulary::add(std::string_view surface, std::string entity_id)
{
    const auto tokens = tokenize(surface);
    if (tokens.empty()) {
        throw std::invalid_argument("vocabulary surface form has no tokens: '" + std::string(surface) + "'");
    }
    if (entity_id.empty()) {
        throw std::invalid_argument("vocabulary entry has an empty entity id");
    }
    longest_ = std::max(longest_, tokens.size());
    entries_[join(tokens)] = std::move(entity_id);
}

const std::string* EntityVocabulary::find(std::span<const std::string> tokens) const
{
    const auto it = entries_.find(join(tokens));
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> EntityVocabulary::entity_ids() const
{
    std::set<std::string> ids;
    for (const auto& [surface, id] : entries_) {
        ids.insert(id);
    }
    return {ids.begin(), ids.end()};
}

EntityCounts link_entities(const Document& document, const EntityVocabulary& vocab)
{
    EntityCounts counts;
    const auto tokens = tokenize(document.text);
    const std::span<const std::string> all(tokens);
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t matched = 0;
        for (std::size_t len = std::min(vocab.longest_form(), tokens.size() - i); len > 0; --len) {
            if (const auto* id = vocab.find(all.subspan(i, len))) {
                ++counts[*id];
                matched = len;
                break;
            }
        }
        i += matched > 0 ? matched : 1;
    }
    return counts;
}

GammaCurve gamma_curve(const std::vector<std::set<std::string>>& entity_sets)
{
    GammaCurve curve;
    const std::size_t count = entity_sets.size();
    curve.points.resize(count);
    std::set<std::string> seen;
    for (std::size_t k = 0; k < count; ++k) {
        seen.insert(entity_sets[k].begin(), entity_sets[k].end());
        auto& p = curve.points[k];
        p.n = k + 1;
        p.union_size = seen.size();
        if (p.union_size > 1) {
            p.gamma = static_cast<double>(p.n) / std::log(static_cast<double>(p.union_size));
        }
    }

    const auto g = [&](std::size_t k) { return curve.points[k].gamma; };
    std::vector<std::optional<double>> raw(count);
    for (std::size_t k = 0; k < count; ++k) {
        const bool has_prev = k > 0 && g(k - 1);
        const bool has_next = k + 1 < count && g(k + 1);
        if (has_prev && has_next) {
            raw[k] = (*g(k + 1) - *g(k - 1)) / 2.0;
        } else if (has_next && g(k)) {
            raw[k] = *g(k + 1) - *g(k);
        } else if (has_prev && g(k)) {
            raw[k] = *g(k) - *g(k - 1);
        }
    }

    constexpr std::size_t half = kSmoothingWindow / 2;
    for (std::size_t k = 0; k < count; ++k) {
        if (!g(k)) {
            continue;
        }
        double sum = 0.0;
        std::size_t used = 0;
        const std::size_t lo = k >= half ? k - half : 0;
        const std::size_t hi = std::min(count - 1, k + half);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (raw[j]) {
                sum += *raw[j];
                ++used;
            }
        }
        if (used > 0) {
            curve.points[k].gamma_prime = sum / static_cast<double>(used);
        }
    }
    return curve;
}

std::optional<double> derivative_drift(const GammaCurve& curve, std::size_t n)
{
    // Needs gamma' at n-5 .. n (1-based), i.e. indices n-6 .. n-1.
    if (n < kSmoothingWindow + 1 || n > curve.points.size()) {
        return std::nullopt;
    }
    double drift = 0.0;
    for (std::size_t k = n - kSmoothingWindow; k < n; ++k) {
        const auto& cur = curve.points[k].gamma_prime;
        const auto& prev = curve.points[k - 1].gamma_prime;
        if (!cur || !prev) {
            return std::nullopt;
        }
        drift = std::max(drift, std::abs(*cur - *prev));
    }
    return drift;
}

std::optional<std::size_t> select_cutoff(const GammaCurve& curve, double gamma_threshold, double convergence_tol)
{
    for (const auto& p : curve.points) {
        if (!p.gamma || !(*p.gamma > gamma_threshold)) {
            continue;
        }
        const auto drift = derivative_drift(curve, p.n);
        if (drift && *drift <= convergence_tol) {
            return p.n;
        }
    }
    return std::nullopt;
}

std::size_t WindowSpec::num_windows() const
{
    if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(width) || !(width > 0.0) || end < start) {
        throw std::invalid_argument("window spec needs finite start <= end and positive width");
    }
    return static_cast<std::size_t>(std::floor((end - start) / width)) + 1;
}

double WindowSpec::midpoint(std::size_t k) const
{
    return start + (static_cast<double>(k) + 0.5) * width;
}

PanelBuild build_panel(std::span<const LinkedDocument> documents, std::span<const std::string> entity_set,
                       const WindowSpec& windows)
{
    const std::size_t count = windows.num_windows();
    if (entity_set.empty()) {
        throw std::invalid_argument("entity set is empty");
    }
    std::map<std::string, Eigen::Index> column;
    for (std::size_t j = 0; j < entity_set.size(); ++j) {
        if (!column.emplace(entity_set[j], static_cast<Eigen::Index>(j)).second) {
            throw std::invalid_argument("duplicate entity in entity set: " + entity_set[j]);
        }
    }

    PanelBuild out;
    std::vector<std::vector<const LinkedDocument*>> buckets(count);
    for (const auto& doc : documents) {
        const double o = doc.document.ordinal;
        if (!(o >= windows.start && o <= windows.end)) {
            ++out.excluded_out_of_range;
            continue;
        }
        const auto k = std::min(count - 1, static_cast<std::size_t>(std::floor((o - windows.start) / windows.width)));
        buckets[k].push_back(&doc);
    }

    const auto m = static_cast<Eigen::Index>(entity_set.size());
    out.panel.entity_names.assign(entity_set.begin(), entity_set.end());
    for (std::size_t k = 0; k < count; ++k) {
        if (buckets[k].empty()) {
            out.dropped_windows.push_back(windows.midpoint(k));
            continue;
        }
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(buckets[k].size()), m);
        for (std::size_t r = 0; r < buckets[k].size(); ++r) {
            for (const auto& [entity, n] : buckets[k][r]->entities) {
                if (const auto it = column.find(entity); it != column.end()) {
                    x(static_cast<Eigen::Index>(r), it->second) = n;
                }
            }
        }
        out.panel.timestamps.push_back(windows.midpoint(k));
        out.panel.counts.push_back(std::move(x));
    }
    if (out.panel.timestamps.empty()) {
        throw std::invalid_argument("every ordinal window is empty");
    }
    return out;
}

}  // namespace evonet::corpus
