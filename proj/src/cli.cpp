#include "evonet/cli.hpp"

#include "evonet/corpus.hpp"
#include "evonet/errors.hpp"
#include "evonet/evolve.hpp"
#include "evonet/io.hpp"
#include "evonet/nonparanormal.hpp"
#include "evonet/synthbench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace evonet::cli {

namespace fs = std::filesystem;

namespace {

/// Bad flags or input files; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultSeed = 20240601;

struct NetworkFlags {
    std::optional<double> lambda;
    std::optional<double> c;
    std::vector<double> grid{std::begin(kDefaultLambdaGrid), std::end(kDefaultLambdaGrid)};
    std::optional<double> bandwidth;
    double bandwidth_c = 1.0;
    unsigned threads = 1;
};

void add_network_flags(CLI::App& cmd, NetworkFlags& f)
{
    auto* lambda = cmd.add_option("--lambda", f.lambda, "Penalty used directly at every timestamp");
    auto* c = cmd.add_option("--c", f.c, "Penalty scale: lambda = c * n^(-1/6) * ln n * sqrt(ln m)");
    lambda->excludes(c);
    cmd.add_option("--grid", f.grid, "Candidate c values for stability selection when neither --lambda nor --c is set")
        ->expected(1, -1)
        ->check(CLI::NonNegativeNumber);
    auto* h = cmd.add_option("--bandwidth", f.bandwidth, "Absolute box-kernel half-width")->check(CLI::PositiveNumber);
    cmd.add_option("--bandwidth-c", f.bandwidth_c, "Bandwidth scale: h = c_h * n^(-1/6) * span")
        ->check(CLI::PositiveNumber)
        ->excludes(h);
    cmd.add_option("--threads", f.threads, "Concurrent per-timestamp solves")->check(CLI::Range(1U, 256U));
}

fs::path prepare_out_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw UsageError("cannot create output directory '" + dir + "'");
    }
    return fs::path(dir);
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return f;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot read '" + path + "'");
    }
    return f;
}

NetworkSeries estimate_with_flags(const TransformedPanel& g, const NetworkFlags& f, std::ostream& err)
{
    const auto n = static_cast<std::size_t>(pooled_rows(g).rows());
    const std::size_t m = g.entity_names.size();
    KernelSpec spec;
    if (f.bandwidth) {
        spec.bandwidth = *f.bandwidth;
    } else {
        const double span = g.timestamps.back() - g.timestamps.front();
        spec.bandwidth = default_bandwidth(n, f.bandwidth_c, span > 0.0 ? span : 1.0);
    }
    EstimateOptions opts;
    opts.threads = f.threads;

    if (f.lambda) {
        return estimate_series(g, spec, *f.lambda, opts);
    }
    if (f.c) {
        auto series = estimate_series(g, spec, default_lambda(n, m, *f.c), opts);
        series.hyperparameters.c = *f.c;
        return series;
    }
    auto tuned = select_lambda_by_stability(g, spec, f.grid, opts);
    err << "selected c = " << tuned.series.hyperparameters.c << " (lambda = " << tuned.series.hyperparameters.lambda
        << ") by edge stability\n";
    return std::move(tuned.series);
}

void write_series_outputs(const fs::path& dir, const NetworkSeries& series)
{
    {
        auto f = open_out(dir / "series.json");
        io::write_series_json(f, series);
    }
    const fs::path dot_dir = dir / "dot";
    fs::create_directories(dot_dir);
    for (std::size_t k = 0; k < series.estimates.size(); ++k) {
        auto f = open_out(dot_dir / io::dot_file_name(k));
        io::write_dot(f, series, k);
    }
}

// --- bench ---------------------------------------------------------------

struct BenchFlags {
    synth::BenchConfig config;
    std::string evolution = "local";
    std::string out = "bench_out";
};

int cmd_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err)
{
    synth::BenchConfig config = flags.config;
    try {
        config.evolution = synth::parse_evolution(flags.evolution);
        synth::validate(config);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto dir = prepare_out_dir(flags.out);
    err << "running benchmark " << config.m << "-" << flags.evolution << " seed " << config.seed << '\n';
    const auto report = synth::run_benchmark(config);
    {
        auto f = open_out(dir / "bench_report.json");
        io::write_bench_json(f, report);
    }
    std::ostringstream table;
    io::write_bench_table(table, report);
    {
        auto f = open_out(dir / "bench_report.txt");
        f << table.str();
    }
    out << table.str();
    return kSuccess;
}

// --- estimate ------------------------------------------------------------

struct EstimateFlags {
    std::string panel;
    std::string out = "estimate_out";
    NetworkFlags network;
};

int cmd_estimate(const EstimateFlags& flags, std::ostream& out, std::ostream& err)
{
    auto in = open_in(flags.panel);
    ObservationPanel panel;
    try {
        panel = io::read_panel_json(in);
    } catch (const io::FormatError& e) {
        throw UsageError(e.what());
    }
    if (panel.timestamps.empty()) {
        throw UsageError("panel has no timestamps");
    }
    const auto dir = prepare_out_dir(flags.out);
    const auto series = estimate_with_flags(gaussianize(panel), flags.network, err);
    write_series_outputs(dir, series);
    out << "estimated " << series.estimates.size() << " networks over " << series.entity_names.size()
        << " entities; mean edges " << mean_edge_count(series) << '\n';
    return kSuccess;
}

// --- query ---------------------------------------------------------------

struct QueryFlags {
    std::string corpus;
    std::string vocab;
    std::string query;
    std::string out = "query_out";
    corpus::Bm25Params bm25;
    double gamma_threshold = corpus::kDefaultGammaThreshold;
    double convergence_tol = corpus::kDefaultConvergenceTol;
    std::optional<double> window_start;
    std::optional<double> window_end;
    double window_width = 5.0;
    NetworkFlags network;
};

int cmd_query(const QueryFlags& flags, std::ostream& out, std::ostream& err)
{
    std::vector<corpus::Document> docs;
    corpus::EntityVocabulary vocab;
    try {
        auto cin = open_in(flags.corpus);
        docs = io::read_corpus_jsonl(cin);
        auto vin = open_in(flags.vocab);
        vocab = io::read_vocabulary_tsv(vin);
    } catch (const io::FormatError& e) {
        throw UsageError(e.what());
    }
    if (vocab.empty()) {
        throw UsageError("vocabulary is empty");
    }
    std::optional<corpus::InvertedIndex> index;
    std::vector<corpus::ScoredDocument> ranked;
    try {
        index.emplace(std::move(docs));
        ranked = corpus::bm25_rank(flags.query, *index, flags.bm25);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto dir = prepare_out_dir(flags.out);

    std::vector<corpus::LinkedDocument> linked;
    std::vector<std::set<std::string>> sets;
    for (const auto& r : ranked) {
        const auto& doc = index->document(r.doc);
        auto entities = corpus::link_entities(doc, vocab);
        std::set<std::string> s;
        for (const auto& [id, count] : entities) {
            s.insert(id);
        }
        sets.push_back(std::move(s));
        linked.push_back({doc, std::move(entities)});
    }
    const auto curve = corpus::gamma_curve(sets);
    {
        auto f = open_out(dir / "gamma.csv");
        io::write_gamma_csv(f, curve);
    }
    const auto cutoff = corpus::select_cutoff(curve, flags.gamma_threshold, flags.convergence_tol);
    if (!cutoff) {
        err << "no cutoff: gamma never exceeded " << flags.gamma_threshold << " with a converged derivative over "
            << ranked.size() << " ranked documents\n";
        return kNoCutoff;
    }

    const std::size_t n_star = *cutoff;
    linked.resize(n_star);
    std::set<std::string> union_set;
    for (std::size_t k = 0; k < n_star; ++k) {
        union_set.insert(sets[k].begin(), sets[k].end());
    }
    const std::vector<std::string> entities(union_set.begin(), union_set.end());

    corpus::WindowSpec windows;
    double lo = linked.front().document.ordinal;
    double hi = lo;
    for (const auto& d : linked) {
        lo = std::min(lo, d.document.ordinal);
        hi = std::max(hi, d.document.ordinal);
    }
    windows.start = flags.window_start.value_or(lo);
    windows.end = flags.window_end.value_or(hi);
    windows.width = flags.window_width;
    corpus::PanelBuild build;
    try {
        build = corpus::build_panel(linked, entities, windows);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (build.excluded_out_of_range > 0) {
        err << "warning: " << build.excluded_out_of_range << " documents fall outside the window range\n";
    }
    for (double t : build.dropped_windows) {
        err << "warning: window at " << t << " has no documents and was dropped\n";
    }

    // Entities whose counts never vary carry no dependence information; drop them here rather
    // than failing the whole query.
    ObservationPanel panel = build.panel;
    const auto model = fit_copula(panel);
    if (!model.rejected.empty()) {
        for (const auto& name : model.rejected_names()) {
            err << "warning: entity " << name << " has constant counts and was dropped\n";
        }
        panel = drop_variables(panel, model.rejected);
    }
    {
        auto f = open_out(dir / "panel.json");
        io::write_panel_json(f, panel);
    }
    {
        nlohmann::json summary = {{"query", flags.query},
                                  {"rankedDocuments", ranked.size()},
                                  {"nStar", n_star},
                                  {"unionSize", entities.size()},
                                  {"gamma", *curve.points[n_star - 1].gamma},
                                  {"entities", panel.entity_names},
                                  {"excludedOutOfRange", build.excluded_out_of_range},
                                  {"droppedWindows", build.dropped_windows}};
        auto f = open_out(dir / "cutoff.json");
        f << summary.dump(2) << '\n';
    }
    if (panel.entity_names.empty()) {
        throw std::runtime_error("every linked entity has constant counts; nothing to estimate");
    }

    const auto series = estimate_with_flags(gaussianize(panel), flags.network, err);
    write_series_outputs(dir, series);
    out << "n* = " << n_star << " of " << ranked.size() << " ranked documents; " << panel.entity_names.size()
        << " entities over " << series.timestamps.size() << " windows; mean edges " << mean_edge_count(series)
        << '\n';
    return kSuccess;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Evolving entity networks from ranked documents and count panels"};
    app.name("evonet");
    app.require_subcommand(1);

    BenchFlags bench;
    bench.config.seed = kDefaultSeed;
    auto* b = app.add_subcommand("bench", "Synthetic evolving-network benchmark: SetEvolve vs Static");
    b->add_option("--m", bench.config.m, "Number of variables");
    b->add_option("--T", bench.config.T, "Number of timestamps");
    b->add_option("--samples", bench.config.samples_per_t, "Samples per timestamp");
    b->add_option("--max-value", bench.config.max_value, "Largest discrete level");
    b->add_option("--evolution", bench.evolution, "global or local")->check(CLI::IsMember({"global", "local"}));
    b->add_option("--change-point", bench.config.change_point, "Timestamp where the structure changes");
    b->add_option("--density", bench.config.edge_density, "Edge probability of the random support");
    b->add_option("--noise", bench.config.noise_rate, "Poisson noise rate added to every count");
    b->add_option("--seed", bench.config.seed, "Seed for every random phase")->capture_default_str();
    b->add_option("--grid", bench.config.lambda_grid, "Candidate c values for stability selection")
        ->expected(1, -1);
    b->add_option("--bandwidth-c", bench.config.bandwidth_c, "Bandwidth scale");
    b->add_option("--threads", bench.config.estimate.threads, "Concurrent per-timestamp solves")
        ->check(CLI::Range(1U, 256U));
    b->add_option("--out", bench.out, "Output directory")->capture_default_str();

    EstimateFlags estimate;
    auto* e = app.add_subcommand("estimate", "Estimate a network series from a panel JSON file");
    e->add_option("--panel", estimate.panel, "Panel JSON {timestamps, entityNames, counts}")->required();
    e->add_option("--out", estimate.out, "Output directory")->capture_default_str();
    add_network_flags(*e, estimate.network);

    QueryFlags query;
    auto* q = app.add_subcommand("query", "Rank a corpus, select n* by the gamma curve, and estimate networks");
    q->add_option("--corpus", query.corpus, "JSONL documents {id, text, ordinal}")->required();
    q->add_option("--vocab", query.vocab, "TSV surface<TAB>entityId")->required();
    q->add_option("--query", query.query, "Query text")->required();
    q->add_option("--out", query.out, "Output directory")->capture_default_str();
    q->add_option("--k1", query.bm25.k1, "BM25 term saturation")->check(CLI::NonNegativeNumber);
    q->add_option("--b", query.bm25.b, "BM25 length normalization")->check(CLI::Range(0.0, 1.0));
    q->add_option("--gamma-threshold", query.gamma_threshold, "Minimum gamma at the cutoff");
    q->add_option("--convergence-tol", query.convergence_tol, "Largest allowed step in smoothed gamma'")
        ->check(CLI::NonNegativeNumber);
    q->add_option("--window-start", query.window_start, "First ordinal window start (default: smallest ordinal)");
    q->add_option("--window-end", query.window_end, "Last ordinal covered (default: largest ordinal)");
    q->add_option("--window-width", query.window_width, "Ordinal window width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_network_flags(*q, query.network);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (b->parsed()) {
            return cmd_bench(bench, out, err);
        }
        if (e->parsed()) {
            return cmd_estimate(estimate, out, err);
        }
        return cmd_query(query, out, err);
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << '\n';
        return kUsageError;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kRuntimeFailure;
    }
}

}  // namespace evonet::cli
