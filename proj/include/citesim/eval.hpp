#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citesim/config.hpp"
#include "citesim/engine.hpp"
#include "citesim/graph.hpp"
#include "citesim/similarity_matrix.hpp"

namespace citesim {

// Reference lists as read from disk, before resolution against a graph.
struct RawCorpus {
  std::vector<std::pair<std::string, std::vector<std::string>>> fields;
};

// Sections `[field-name]` followed by one external paper id per line. Blank
// lines and `#` comments are skipped. Throws DataError on ids outside a
// section or on an empty section name.
RawCorpus read_corpus(std::istream& in);

struct EvalCorpus {
  std::string name;
  std::vector<std::pair<std::string, std::vector<PaperId>>> fields;

  std::size_t paper_count() const;
};

struct CorpusResolution {
  EvalCorpus corpus;
  std::vector<std::string> unresolved;      // ids not present in the graph
  std::vector<std::string> dropped_fields;  // fewer than 2 resolvable papers
};

// Maps ids onto the graph, dropping (and listing) the ones it lacks. Fields
// left with fewer than two papers are dropped. Throws DataError when nothing
// usable remains.
CorpusResolution resolve_corpus(const RawCorpus& raw, const CitationGraph& g,
                                std::string name = "corpus");

// Fraction of the top-`count` papers for `query` that belong to
// `reference` \ {query}. Zero-score filler does not count as a hit, and
// missing slots are misses.
double precision_at_m(const SimilarityMatrix& m, PaperId query,
                      std::span<const PaperId> reference, std::size_t count);

struct PrecisionRow {
  std::string measure;
  std::size_t m;
  double precision;

  friend bool operator==(const PrecisionRow&, const PrecisionRow&) = default;
};

struct PrecisionTable {
  std::vector<PrecisionRow> rows;  // config order, then m order
  std::size_t query_count = 0;

  std::optional<double> precision(std::string_view measure, std::size_t m) const;
  friend bool operator==(const PrecisionTable&, const PrecisionTable&) = default;
};

// Every paper of every field serves once as a query against its own field's
// list; rows hold the mean precision over all queries.
PrecisionTable run_benchmark(const CitationGraph& g, const EvalCorpus& corpus,
                             std::span<const MeasureConfig> configs,
                             std::span<const std::size_t> m_values,
                             const EngineOptions& opts = {});

struct Histogram {
  static constexpr std::size_t kBuckets = 10;
  // [0,0.1), [0.1,0.2), ..., [0.9,1.0]
  std::array<std::size_t, kBuckets> buckets{};
  std::size_t na = 0;
  std::size_t total_pairs = 0;

  static std::string bucket_label(std::size_t i);
};

// Off-diagonal pairs only. Throws ConfigError for raw-count matrices.
Histogram score_histogram(const SimilarityMatrix& m);

// Highest off-diagonal measured scores, descending; at most `count`.
std::vector<double> top_pair_scores(const SimilarityMatrix& m, std::size_t count);

struct TracePoint {
  int k;
  double mean_top10;
  std::size_t pairs_used;  // < 10 only on tiny graphs
  double max_delta;
};

// Runs exactly `iterations` steps and records the mean of the ten highest
// scores after each one. The top ten are re-selected at every k.
std::vector<TracePoint> convergence_trace(const CitationGraph& g, const MeasureConfig& cfg,
                                          int iterations, const EngineOptions& opts = {});

enum class CaseTag { P1, P2, P3 };
std::string_view to_string(CaseTag t);
std::optional<CaseTag> parse_case_tag(std::string_view s);

struct CasePair {
  PaperId p;
  PaperId q;
  CaseTag tag;
};

struct CaseTable {
  std::vector<std::string> measures;
  std::vector<CasePair> pairs;
  std::vector<std::vector<std::optional<double>>> scores;  // [measure][pair], nullopt = N/A
};

CaseTable case_analysis(const CitationGraph& g, std::span<const CasePair> pairs,
                        std::span<const MeasureConfig> configs,
                        const EngineOptions& opts = {});

}  // namespace citesim
