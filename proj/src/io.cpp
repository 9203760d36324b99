#include "evonet/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace evonet::io {

using nlohmann::json;

namespace {

json parse_or_throw(std::istream& in, const std::string& what)
{
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(what + ": " + e.what());
    }
}

template <class T>
T field(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw FormatError(where + ": missing field '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(where + ": bad field '" + key + "': " + e.what());
    }
}

json matrix_rows(const Eigen::MatrixXd& x)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            row.push_back(x(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fixed6(double v)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(6) << v;
    return s.str();
}

std::string dot_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out + "\"";
}

}  // namespace

ObservationPanel read_panel_json(std::istream& in)
{
    const json doc = parse_or_throw(in, "panel JSON");
    ObservationPanel panel;
    panel.timestamps = field<std::vector<double>>(doc, "timestamps", "panel");
    panel.entity_names = field<std::vector<std::string>>(doc, "entityNames", "panel");
    const auto counts = field<std::vector<std::vector<std::vector<double>>>>(doc, "counts", "panel");
    const auto m = static_cast<Eigen::Index>(panel.entity_names.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const auto& rows = counts[k];
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), m);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<Eigen::Index>(rows[r].size()) != m) {
                throw FormatError("panel: timestamp " + std::to_string(k) + " row " + std::to_string(r) + " has " +
                                  std::to_string(rows[r].size()) + " values, expected " + std::to_string(m));
            }
            for (Eigen::Index c = 0; c < m; ++c) {
                x(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
            }
        }
        panel.counts.push_back(std::move(x));
    }
    try {
        validate(panel);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("panel: ") + e.what());
    }
    return panel;
}

void write_panel_json(std::ostream& out, const ObservationPanel& panel)
{
    json doc;
    doc["timestamps"] = panel.timestamps;
    doc["entityNames"] = panel.entity_names;
    json counts = json::array();
    for (const auto& x : panel.counts) {
        counts.push_back(matrix_rows(x));
    }
    doc["counts"] = std::move(counts);
    out << doc.dump(2) << '\n';
}

void write_series_json(std::ostream& out, const NetworkSeries& series)
{
    json doc;
    doc["timestamps"] = series.timestamps;
    doc["entityNames"] = series.entity_names;
    doc["hyperparameters"] = {{"bandwidth", series.hyperparameters.bandwidth},
                              {"lambda", series.hyperparameters.lambda},
                              {"c", series.hyperparameters.c}};
    json per = json::array();
    for (std::size_t k = 0; k < series.estimates.size(); ++k) {
        const auto& e = series.estimates[k];
        json theta = json::array();
        for (Eigen::Index r = 0; r < e.theta.rows(); ++r) {
            for (Eigen::Index c = 0; c < e.theta.cols(); ++c) {
                theta.push_back(e.theta(r, c));
            }
        }
        json edges = json::array();
        for (const auto& edge : e.edges) {
            edges.push_back({edge.i, edge.j});
        }
        per.push_back({{"timestamp", series.timestamps[k]},
                       {"theta", std::move(theta)},
                       {"edges", std::move(edges)},
                       {"lambda", e.lambda},
                       {"dualityGap", e.duality_gap}});
    }
    doc["perTimestamp"] = std::move(per);
    out << doc.dump(2) << '\n';
}

std::string dot_file_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%03zu.dot", k);
    return buf;
}

void write_dot(std::ostream& out, const NetworkSeries& series, std::size_t k)
{
    const auto& e = series.estimates.at(k);
    std::ostringstream label;
    label << series.timestamps.at(k);
    out << "graph " << dot_quote("t=" + label.str()) << " {\n";
    for (std::size_t v = 0; v < series.entity_names.size(); ++v) {
        out << "  n" << v << " [label=" << dot_quote(series.entity_names[v]) << "];\n";
    }
    for (const auto& edge : e.edges) {
        const double w = std::abs(e.theta(static_cast<Eigen::Index>(edge.i), static_cast<Eigen::Index>(edge.j)));
        out << "  n" << edge.i << " -- n" << edge.j << " [weight=" << fixed6(w) << "];\n";
    }
    out << "}\n";
}

void write_gamma_csv(std::ostream& out, const corpus::GammaCurve& curve)
{
    out << "n,unionSize,gamma,gammaPrime\n";
    const auto opt = [](const std::optional<double>& v) {
        if (!v) {
            return std::string();
        }
        std::ostringstream s;
        s << std::setprecision(17) << *v;
        return s.str();
    };
    for (const auto& p : curve.points) {
        out << p.n << ',' << p.union_size << ',' << opt(p.gamma) << ',' << opt(p.gamma_prime) << '\n';
    }
}

std::vector<corpus::Document> read_corpus_jsonl(std::istream& in)
{
    std::vector<corpus::Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = "corpus line " + std::to_string(lineno);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
        corpus::Document d;
        d.id = field<std::string>(obj, "id", where);
        d.text = field<std::string>(obj, "text", where);
        d.ordinal = field<double>(obj, "ordinal", where);
        docs.push_back(std::move(d));
    }
    return docs;
}

corpus::EntityVocabulary read_vocabulary_tsv(std::istream& in)
{
    corpus::EntityVocabulary vocab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw FormatError("vocabulary line " + std::to_string(lineno) + ": expected surface<TAB>entityId");
        }
        try {
            vocab.add(line.substr(0, tab), line.substr(tab + 1));
        } catch (const std::invalid_argument& e) {
            throw FormatError("vocabulary line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return vocab;
}

void write_bench_json(std::ostream& out, const synth::BenchReport& report, bool include_runtime)
{
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row = {{"method", r.method},   {"macroF1", r.macro_f1}, {"totalEdges", r.total_edges},
                    {"meanEdges", r.mean_edges}, {"lambda", r.lambda},    {"c", r.c}};
        if (include_runtime) {
            row["runtimeSeconds"] = r.runtime_seconds;
        }
        rows.push_back(std::move(row));
    }
    json doc = {{"seed", report.seed},
                {"network", report.network},
                {"trueMeanEdges", report.true_mean_edges},
                {"rows", std::move(rows)}};
    out << doc.dump(2) << '\n';
}

void write_bench_table(std::ostream& out, const synth::BenchReport& report)
{
    out << "network " << report.network << "  seed " << report.seed << "  true |E|/t " << std::fixed
        << std::setprecision(1) << report.true_mean_edges << '\n';
    out << std::left << std::setw(10) << "method" << std::right << std::setw(8) << "F1" << std::setw(8) << "|E|/t"
        << std::setw(10) << "total|E|" << std::setw(10) << "lambda" << std::setw(7) << "c" << std::setw(11)
        << "runtime(s)" << '\n';
    for (const auto& r : report.rows) {
        out << std::left << std::setw(10) << r.method << std::right << std::setprecision(4) << std::setw(8)
            << r.macro_f1 << std::setprecision(1) << std::setw(8) << r.mean_edges << std::setw(10) << r.total_edges
            << std::setprecision(4) << std::setw(10) << r.lambda << std::setprecision(2) << std::setw(7) << r.c
            << std::setprecision(3) << std::setw(11) << r.runtime_seconds << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

}  // namespace evonet::io
