#include "evonet/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace evonet;
using nlohmann::json;

namespace {

NetworkSeries two_node_series()
{
    NetworkSeries s;
    s.timestamps = {1.5, 2.5};
    s.entity_names = {"alpha", "be\"ta"};
    s.hyperparameters = {0.75, 0.2, 0.1};
    for (double off : {-0.4761904, 0.0}) {
        PrecisionEstimate e;
        e.theta.resize(2, 2);
        e.theta << 1.19, off, off, 1.19;
        e.lambda = 0.2;
        e.duality_gap = 1e-9;
        e.edges = support_edges(e.theta, 1e-6);
        s.estimates.push_back(e);
    }
    return s;
}

}  // namespace

TEST_CASE("panel JSON round trip")
{
    ObservationPanel p;
    p.timestamps = {1, 2};
    p.entity_names = {"a", "b"};
    p.counts = {Eigen::MatrixXd(1, 2), Eigen::MatrixXd(0, 2)};
    p.counts[0] << 3, 0;
    std::stringstream buf;
    io::write_panel_json(buf, p);
    const auto back = io::read_panel_json(buf);
    CHECK(back.timestamps == p.timestamps);
    CHECK(back.entity_names == p.entity_names);
    CHECK(back.counts[0] == p.counts[0]);
    CHECK(back.counts[1].rows() == 0);
    CHECK(back.counts[1].cols() == 2);
}

TEST_CASE("malformed panels")
{
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return io::read_panel_json(in);
    };
    CHECK_THROWS_AS(parse("{not json"), io::FormatError);
    CHECK_THROWS_AS(parse(R"({"timestamps": [1], "entityNames": ["a"]})"), io::FormatError);
    CHECK_THROWS_AS(parse(R"({"timestamps": [1], "entityNames": ["a"], "counts": [[[1, 2]]]})"), io::FormatError);
    CHECK_THROWS_AS(parse(R"({"timestamps": [2, 1], "entityNames": ["a"], "counts": [[[1]], [[1]]]})"),
                    io::FormatError);
    CHECK_THROWS_AS(parse(R"({"timestamps": [1], "entityNames": ["a"], "counts": [[[-1]]]})"), io::FormatError);
    CHECK_THROWS_AS(parse(R"({"timestamps": "x", "entityNames": ["a"], "counts": []})"), io::FormatError);
}

TEST_CASE("series JSON layout")
{
    std::stringstream buf;
    io::write_series_json(buf, two_node_series());
    const auto doc = json::parse(buf.str());
    CHECK(doc["timestamps"] == json({1.5, 2.5}));
    CHECK(doc["entityNames"][0] == "alpha");
    CHECK(doc["hyperparameters"]["bandwidth"] == 0.75);
    CHECK(doc["hyperparameters"]["c"] == 0.1);
    REQUIRE(doc["perTimestamp"].size() == 2);
    const auto& first = doc["perTimestamp"][0];
    CHECK(first["theta"].size() == 4);
    CHECK(first["theta"][1] == -0.4761904);
    CHECK(first["edges"] == json::parse("[[0, 1]]"));
    CHECK(first["lambda"] == 0.2);
    CHECK(first["dualityGap"] == 1e-9);
    CHECK(doc["perTimestamp"][1]["edges"].empty());
}

TEST_CASE("DOT export")
{
    const auto s = two_node_series();
    std::ostringstream dot;
    io::write_dot(dot, s, 0);
    const std::string text = dot.str();
    CHECK(text.rfind("graph \"t=1.5\" {", 0) == 0);
    CHECK(text.find("n0 [label=\"alpha\"];") != std::string::npos);
    CHECK(text.find("n1 [label=\"be\\\"ta\"];") != std::string::npos);
    CHECK(text.find("n0 -- n1 [weight=0.476190];") != std::string::npos);

    std::ostringstream empty;
    io::write_dot(empty, s, 1);
    CHECK(empty.str().find("--") == std::string::npos);
    CHECK(io::dot_file_name(7) == "t007.dot");
}

TEST_CASE("gamma CSV leaves undefined values blank")
{
    const auto curve = corpus::gamma_curve({{"a"}, {"a", "b"}, {"c"}});
    std::ostringstream out;
    io::write_gamma_csv(out, curve);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "n,unionSize,gamma,gammaPrime");
    std::getline(lines, line);
    CHECK(line == "1,1,,");
    std::getline(lines, line);
    CHECK(line.rfind("2,2,2.88539", 0) == 0);
}

TEST_CASE("corpus JSONL and vocabulary TSV")
{
    std::istringstream jsonl("{\"id\": \"a\", \"text\": \"Deep learning\", \"ordinal\": 1999}\n\n"
                             "{\"id\": \"b\", \"text\": \"svm\", \"ordinal\": 2001.5}\n");
    const auto docs = io::read_corpus_jsonl(jsonl);
    REQUIRE(docs.size() == 2);
    CHECK(docs[1].ordinal == 2001.5);

    std::istringstream bad("{\"id\": \"a\", \"text\": \"x\"}\n");
    CHECK_THROWS_WITH_AS(io::read_corpus_jsonl(bad), doctest::Contains("line 1"), io::FormatError);

    std::istringstream tsv("# comment\nDeep Learning\tdl\r\n\nsvm\tsvm\n");
    const auto vocab = io::read_vocabulary_tsv(tsv);
    CHECK(vocab.size() == 2);
    CHECK(corpus::link_entities(docs[0], vocab) == corpus::EntityCounts{{"dl", 1}});

    std::istringstream no_tab("svm svm\n");
    CHECK_THROWS_AS(io::read_vocabulary_tsv(no_tab), io::FormatError);
}

TEST_CASE("bench report JSON and table")
{
    synth::BenchReport r;
    r.seed = 3;
    r.network = "20-local";
    r.true_mean_edges = 38.5;
    r.rows = {{"SetEvolve", 0.66, 1980, 19.8, 0.5, 0.4, 0.12}, {"Static", 0.36, 120, 120, 0.2, 0.05, 0.01}};
    std::ostringstream a;
    io::write_bench_json(a, r);
    const auto doc = json::parse(a.str());
    CHECK(doc["rows"][0]["macroF1"] == 0.66);
    CHECK(doc["rows"][0]["totalEdges"] == 1980);
    CHECK_FALSE(doc["rows"][0].contains("runtimeSeconds"));
    std::ostringstream b;
    io::write_bench_json(b, r, true);
    CHECK(json::parse(b.str())["rows"][1]["runtimeSeconds"] == 0.01);

    std::ostringstream table;
    io::write_bench_table(table, r);
    CHECK(table.str().find("SetEvolve") != std::string::npos);
    CHECK(table.str().find("0.6600") != std::string::npos);
}
