#pragma once

#include "evonet/corpus.hpp"
#include "evonet/evolve.hpp"
#include "evonet/panel.hpp"
#include "evonet/synthbench.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace evonet::io {

/// Input that does not parse or does not have the expected shape.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {"timestamps": [..], "entityNames": [..], "counts": [ [[row], ...] per timestamp ]}
ObservationPanel read_panel_json(std::istream& in);
void write_panel_json(std::ostream& out, const ObservationPanel& panel);

// {"timestamps", "entityNames", "hyperparameters": {bandwidth, lambda, c},
//  "perTimestamp": [{"timestamp", "theta" (row-major), "edges", "lambda", "dualityGap"}]}
void write_series_json(std::ostream& out, const NetworkSeries& series);

/// Undirected graph of one timestamp; edge weight is |theta_ij| with 6 decimals.
void write_dot(std::ostream& out, const NetworkSeries& series, std::size_t k);
/// "t000.dot", "t001.dot", ... in timestamp order.
std::string dot_file_name(std::size_t k);

/// n,unionSize,gamma,gammaPrime; undefined values are left empty.
void write_gamma_csv(std::ostream& out, const corpus::GammaCurve& curve);

/// One {"id", "text", "ordinal"} object per line; blank lines are skipped.
std::vector<corpus::Document> read_corpus_jsonl(std::istream& in);

/// "surface<TAB>entityId" per line; blank lines and lines starting with '#' are skipped.
corpus::EntityVocabulary read_vocabulary_tsv(std::istream& in);

/// Runtimes are left out unless asked for, so that equal seeds give byte-identical files.
void write_bench_json(std::ostream& out, const synth::BenchReport& report, bool include_runtime = false);
void write_bench_table(std::ostream& out, const synth::BenchReport& report);

}  // namespace evonet::io
