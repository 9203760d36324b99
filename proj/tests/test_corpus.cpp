#include "evonet/corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace evonet::corpus;

namespace {

std::vector<std::set<std::string>> identical_sets(std::size_t count, std::size_t size)
{
    std::set<std::string> s;
    for (std::size_t k = 0; k < size; ++k) {
        s.insert("e" + std::to_string(k));
    }
    return std::vector<std::set<std::string>>(count, s);
}

// Okapi BM25 written out term by term, for cross-checking the ranked scores.
double bm25_by_hand(double tf, double len, double avgdl, double n, double df)
{
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    return idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * len / avgdl));
}

}  // namespace

TEST_CASE("tokenizer")
{
    CHECK(tokenize("Deep-Learning, SVMs & k2!") == std::vector<std::string>{"deep", "learning", "svms", "k2"});
    CHECK(tokenize("  ").empty());
}

TEST_CASE("inverted index")
{
    const auto index = index_corpus({{"d1", "a b a", 1.0}});
    REQUIRE(index.postings("a").size() == 1);
    CHECK(index.postings("a")[0].tf == 2);
    CHECK(index.postings("b")[0].tf == 1);
    CHECK(index.doc_length(0) == 3);
    CHECK(index.postings("zzz").empty());

    CHECK_THROWS_AS(index_corpus({}), std::invalid_argument);
    CHECK_THROWS_AS(index_corpus({{"d1", "x", 1}, {"d1", "y", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(index_corpus({{"d1", "x", std::nan("")}}), std::invalid_argument);

    const auto with_empty = index_corpus({{"d1", "", 1}, {"d2", "x", 2}});
    CHECK(with_empty.doc_length(0) == 0);
    const auto hits = bm25_rank("x", with_empty);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].doc == 1);
}

TEST_CASE("BM25 ranking")
{
    const auto index = index_corpus({{"doc1", "x x y z", 0}, {"doc2", "x y z w", 0}, {"doc3", "y z w v", 0}});
    const auto ranked = bm25_rank("x", index);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].doc == 0);
    CHECK(ranked[1].doc == 1);
    // idf = ln(1.6); doc1: 2*2.2/3.2, doc2: 1*2.2/2.2 (all lengths equal the average).
    CHECK(ranked[0].score == doctest::Approx(0.6462549902128864).epsilon(1e-14));
    CHECK(ranked[1].score == doctest::Approx(0.4700036292457356).epsilon(1e-14));
    CHECK(ranked[0].score == doctest::Approx(bm25_by_hand(2, 4, 4, 3, 2)));
    CHECK(bm25_idf(3, 2) == doctest::Approx(std::log(1.6)));

    CHECK(bm25_rank("absent", index).empty());
    CHECK_THROWS_AS(bm25_rank(" ,; ", index), std::invalid_argument);

    const auto twins = index_corpus({{"b", "same text", 0}, {"a", "same text", 0}, {"c", "other", 0}});
    const auto tied = bm25_rank("same", twins);
    REQUIRE(tied.size() == 2);
    CHECK(tied[0].score == tied[1].score);
    CHECK(twins.document(tied[0].doc).id == "a");
    CHECK(twins.document(tied[1].doc).id == "b");

    // Repeating a query term does not change the score.
    CHECK(bm25_rank("x x", index)[0].score == ranked[0].score);
}

TEST_CASE("BM25 scores are deterministic and non-increasing on random corpora")
{
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> word(0, 14);
    std::uniform_int_distribution<int> length(0, 20);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Document> docs;
        for (int d = 0; d < 25; ++d) {
            std::string text;
            for (int w = length(rng); w > 0; --w) {
                text += "w" + std::to_string(word(rng)) + " ";
            }
            docs.push_back({"d" + std::to_string(d), text, 0});
        }
        const auto index = index_corpus(docs);
        const std::string query = "w" + std::to_string(word(rng)) + " w" + std::to_string(word(rng));
        const auto a = bm25_rank(query, index);
        const auto b = bm25_rank(query, index);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].doc == b[k].doc);
            CHECK(a[k].score == b[k].score);
            CHECK(a[k].score > 0.0);
            if (k > 0) {
                CHECK(a[k].score <= a[k - 1].score);
            }
        }
    }
}

TEST_CASE("entity linking")
{
    EntityVocabulary vocab;
    vocab.add("Deep Learning", "e1");
    vocab.add("learning", "e2");
    vocab.add("svm", "e3");
    CHECK(vocab.longest_form() == 2);
    CHECK(vocab.entity_ids() == std::vector<std::string>{"e1", "e2", "e3"});

    CHECK(link_entities({"d", "deep learning", 0}, vocab) == EntityCounts{{"e1", 1}});
    CHECK(link_entities({"d", "nothing here", 0}, vocab).empty());
    CHECK(link_entities({"d", "SVM and svm", 0}, vocab) == EntityCounts{{"e3", 2}});
    CHECK(link_entities({"d", "deep deep learning learning", 0}, vocab) == EntityCounts{{"e1", 1}, {"e2", 1}});

    CHECK_THROWS_AS(vocab.add(" - ", "e9"), std::invalid_argument);
    CHECK_THROWS_AS(vocab.add("ok", ""), std::invalid_argument);
}

TEST_CASE("linking is a pure function of text and vocabulary")
{
    std::mt19937_64 rng(10);
    const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
    EntityVocabulary vocab;
    vocab.add("a b", "ab");
    vocab.add("a", "a");
    vocab.add("c d e", "cde");
    vocab.add("d", "d");
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        for (int w = 0; w < 30; ++w) {
            text += words[pick(rng)] + (trial % 2 ? "," : " ");
        }
        const auto first = link_entities({"x", text, 0}, vocab);
        CHECK(first == link_entities({"y", text, 5}, vocab));
        int linked_tokens = 0;
        for (const auto& [id, n] : first) {
            linked_tokens += n * static_cast<int>(tokenize(id == "cde" ? "c d e" : id == "ab" ? "a b" : id).size());
        }
        CHECK(linked_tokens <= 30);  // matches never overlap
    }
}

TEST_CASE("gamma curve")
{
    const auto two = gamma_curve({{"a", "b"}, {"b", "c"}});
    CHECK(two.points[0].union_size == 2);
    CHECK(two.points[1].union_size == 3);
    CHECK(*two.points[1].gamma == doctest::Approx(1.820478453253675).epsilon(1e-14));

    const auto single = gamma_curve({{"a"}});
    CHECK_FALSE(single.points[0].gamma.has_value());
    CHECK_FALSE(single.points[0].gamma_prime.has_value());

    const auto flat = gamma_curve(identical_sets(60, 100));
    for (const auto& p : flat.points) {
        CHECK(*p.gamma == doctest::Approx(static_cast<double>(p.n) / std::log(100.0)));
        CHECK(*p.gamma_prime == doctest::Approx(0.2171472409516259).epsilon(1e-12));
    }
    CHECK(gamma_curve({}).points.empty());
}

TEST_CASE("cutoff selection")
{
    // 10 ln 100 = 46.05, so the first n with gamma > 10 is 47.
    const auto flat = gamma_curve(identical_sets(80, 100));
    CHECK(select_cutoff(flat) == 47u);
    CHECK(select_cutoff(flat, 5.0) == 24u);
    CHECK(*derivative_drift(flat, 47) <= 1e-12);
    CHECK_FALSE(derivative_drift(flat, 5).has_value());

    // One new entity per document: gamma = n / ln(n + 1) stays below 10 for n < 36.
    std::vector<std::set<std::string>> growing;
    for (int k = 0; k < 30; ++k) {
        growing.push_back({"e" + std::to_string(k), "shared"});
    }
    CHECK_FALSE(select_cutoff(gamma_curve(growing)).has_value());
    CHECK_FALSE(select_cutoff(gamma_curve({})).has_value());

    // A late burst of new entities breaks convergence until the curve settles again.
    auto burst = identical_sets(80, 20);
    for (std::size_t k = 25; k < 30; ++k) {
        burst[k].insert("late" + std::to_string(k));
    }
    const auto cut = select_cutoff(gamma_curve(burst), 10.0);
    REQUIRE(cut.has_value());
    CHECK(*cut > 30u);
    CHECK(*derivative_drift(gamma_curve(burst), *cut) <= kDefaultConvergenceTol);
}

TEST_CASE("union is monotone and gamma grows once it saturates, on random lists")
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> entity(0, 40);
    std::uniform_int_distribution<int> size(0, 6);
    std::uniform_int_distribution<int> docs(1, 80);
    for (int trial = 0; trial < 250; ++trial) {
        std::vector<std::set<std::string>> sets(static_cast<std::size_t>(docs(rng)));
        for (auto& s : sets) {
            for (int k = size(rng); k > 0; --k) {
                s.insert("e" + std::to_string(entity(rng)));
            }
        }
        const auto curve = gamma_curve(sets);
        REQUIRE(curve.points.size() == sets.size());
        for (std::size_t k = 0; k < curve.points.size(); ++k) {
            const auto& p = curve.points[k];
            CHECK(p.n == k + 1);
            CHECK(p.gamma.has_value() == (p.union_size > 1));
            if (k > 0) {
                const auto& q = curve.points[k - 1];
                CHECK(p.union_size >= q.union_size);
                if (p.union_size == q.union_size && p.gamma) {
                    CHECK(*p.gamma > *q.gamma);
                }
            }
        }
    }
}

TEST_CASE("windows")
{
    const WindowSpec years{1985, 2015, 5};
    CHECK(years.num_windows() == 7);
    CHECK(years.midpoint(0) == 1987.5);
    CHECK(years.midpoint(6) == 2017.5);
    CHECK_THROWS_AS((WindowSpec{0, 10, 0}.num_windows()), std::invalid_argument);
    CHECK_THROWS_AS((WindowSpec{10, 0, 1}.num_windows()), std::invalid_argument);
}

TEST_CASE("panel assembly")
{
    const std::vector<std::string> entities = {"e1", "e2"};
    const std::vector<LinkedDocument> docs = {
        {{"a", "", 2001}, {{"e1", 2}}},
        {{"b", "", 2002}, {{"e1", 0}, {"e2", 1}}},
        {{"c", "", 1970}, {{"e1", 5}}},
    };
    const auto built = build_panel(docs, entities, {2000, 2004, 5});
    REQUIRE(built.panel.timestamps == std::vector<double>{2002.5});
    Eigen::MatrixXd expected(2, 2);
    expected << 2, 0, 0, 1;
    CHECK(built.panel.counts[0] == expected);
    CHECK(built.excluded_out_of_range == 1);
    CHECK(built.panel.entity_names == entities);

    const auto gappy = build_panel(docs, entities, {1990, 2004, 5});
    CHECK(gappy.panel.timestamps == std::vector<double>{2002.5});
    CHECK(gappy.dropped_windows == std::vector<double>{1992.5, 1997.5});

    CHECK_THROWS_AS(build_panel(docs, entities, {1900, 1910, 5}), std::invalid_argument);
    CHECK_THROWS_AS(build_panel(docs, std::vector<std::string>{}, {2000, 2004, 5}), std::invalid_argument);
}

TEST_CASE("panel conserves linked counts on random corpora")
{
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<int> year(1980, 2020);
    std::uniform_int_distribution<int> count(0, 4);
    std::uniform_int_distribution<int> ndocs(1, 60);
    const std::vector<std::string> entities = {"a", "b", "c", "d"};
    for (int trial = 0; trial < 250; ++trial) {
        std::vector<LinkedDocument> docs;
        for (int d = ndocs(rng); d > 0; --d) {
            LinkedDocument doc{{"d" + std::to_string(d), "", static_cast<double>(year(rng))}, {}};
            for (const auto& e : entities) {
                if (const int n = count(rng); n > 0) {
                    doc.entities[e] = n;
                }
            }
            doc.entities["unlisted"] = 1;
            docs.push_back(doc);
        }
        const WindowSpec spec{1985, 2015, 1.0 + trial % 7};
        std::vector<double> expected(entities.size(), 0.0);
        std::size_t inside = 0;
        for (const auto& d : docs) {
            if (d.document.ordinal < spec.start || d.document.ordinal > spec.end) {
                continue;
            }
            ++inside;
            for (std::size_t j = 0; j < entities.size(); ++j) {
                const auto it = d.entities.find(entities[j]);
                expected[j] += it == d.entities.end() ? 0 : it->second;
            }
        }
        if (inside == 0) {
            CHECK_THROWS_AS(build_panel(docs, entities, spec), std::invalid_argument);
            continue;
        }
        const auto built = build_panel(docs, entities, spec);
        CHECK(built.excluded_out_of_range == docs.size() - inside);
        CHECK(built.panel.total_samples() == inside);
        CHECK(built.panel.timestamps.size() + built.dropped_windows.size() == spec.num_windows());
        for (std::size_t j = 0; j < entities.size(); ++j) {
            double total = 0.0;
            for (const auto& x : built.panel.counts) {
                total += x.col(static_cast<Eigen::Index>(j)).sum();
            }
            CHECK(total == expected[j]);
        }
    }
}
