#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citesim/engine.hpp"
#include "citesim/eval.hpp"
#include "citesim/graph.hpp"
#include "citesim/similarity_matrix.hpp"

namespace citesim {

// Real numbers are written with 17 significant digits so that reading them
// back yields the identical double.
std::string format_score(double v);

// `p,q,score` with external ids, p <= q in id order, including the unit
// diagonal. Rows with score <= threshold and N/A pairs are omitted.
void write_matrix_csv(std::ostream& out, const CitationGraph& g, const SimilarityMatrix& m,
                      double threshold = 0.0);

struct MatrixRow {
  PaperId p;
  PaperId q;
  double score;
};

// Inverse of write_matrix_csv; throws DataError on malformed rows or ids the
// graph does not know.
std::vector<MatrixRow> read_matrix_csv(std::istream& in, const CitationGraph& g);

// Compares a re-read export against `m`: every row must match bit-for-bit and
// every omitted pair must be N/A or <= threshold. Returns mismatch messages.
std::vector<std::string> verify_matrix(std::span<const MatrixRow> rows,
                                       const CitationGraph& g, const SimilarityMatrix& m,
                                       double threshold = 0.0);

void write_iteration_csv(std::ostream& out, const IterationReport& report);
void write_topk_csv(std::ostream& out, const CitationGraph& g,
                    std::span<const RankedPaper> ranked);
void write_precision_csv(std::ostream& out, const PrecisionTable& table);
void write_histogram_csv(std::ostream& out, const Histogram& h);
void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);
void write_case_csv(std::ostream& out, const CitationGraph& g, const CaseTable& table);

// CSV `p,q,case` with external ids and case in {P1,P2,P3}.
std::vector<CasePair> read_case_pairs(std::istream& in, const CitationGraph& g);

}  // namespace citesim
