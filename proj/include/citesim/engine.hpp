#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "citesim/config.hpp"
#include "citesim/graph.hpp"
#include "citesim/similarity_matrix.hpp"

namespace citesim {

struct EngineOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
  // Graphs with more nodes than this use sparse matrix storage.
  std::size_t dense_limit = 20000;
};

struct IterationReport {
  int iterations_run = 0;
  bool converged = false;
  std::vector<double> max_delta_per_iteration;
  std::vector<std::string> warnings;
};

struct SimilarityResult {
  SimilarityMatrix matrix;
  IterationReport report;  // empty for non-iterative measures
};

// Non-iterative measures. `raw_count` yields intersection sizes (unbounded);
// `jaccard` divides by the union size, 0 when both sets are empty.
SimilarityMatrix cocitation(const CitationGraph& g, const MeasureConfig& cfg,
                            const EngineOptions& opts = {});
SimilarityMatrix coupling(const CitationGraph& g, const MeasureConfig& cfg,
                          const EngineOptions& opts = {});
// lambda * cocitation + (1 - lambda) * coupling, in the configured mode.
SimilarityMatrix amsler(const CitationGraph& g, const MeasureConfig& cfg,
                        const EngineOptions& opts = {});

// SimRank, rvs-SimRank, P-Rank and pairwise-normalized C-Rank. Stops after
// k_max iterations or as soon as an iteration changes no entry by epsilon or
// more.
SimilarityResult iterate_pairwise(const CitationGraph& g, const MeasureConfig& cfg,
                                  const EngineOptions& opts = {});

// Jaccard-normalized C-Rank over undirected neighborhoods L(p). Same
// stopping rule as iterate_pairwise.
SimilarityResult crank_jaccard(const CitationGraph& g, const MeasureConfig& cfg,
                               const EngineOptions& opts = {});

// Iterates an iterative measure to its fixed point with k_max as a hard cap.
// Requires C < 1.
SimilarityResult converge(const CitationGraph& g, const MeasureConfig& cfg,
                          const EngineOptions& opts = {});

// Any measure. Iterative measures run with the iterate_* stopping rule.
SimilarityResult compute(const CitationGraph& g, const MeasureConfig& cfg,
                         const EngineOptions& opts = {});

// Stepwise driver for the iterative measures. Each step() reads the
// previous matrix and writes a fresh one, so every entry of R_{k+1} depends
// only on R_k and the result is independent of the thread schedule.
class IterativeEngine {
 public:
  IterativeEngine(const CitationGraph& g, const MeasureConfig& cfg,
                  const EngineOptions& opts = {});
  ~IterativeEngine();
  IterativeEngine(IterativeEngine&&) noexcept;
  IterativeEngine& operator=(IterativeEngine&&) noexcept;

  // Computes R_{k+1} from R_k and returns max |R_{k+1} - R_k| over all pairs.
  double step();

  // Replaces the iterate (normally R_0 = identity), e.g. to restart from a
  // perturbed matrix. Size and storage must match; the N/A rule is kept.
  void reset(SimilarityMatrix start);

  const SimilarityMatrix& current() const noexcept;
  int iteration() const noexcept;
  SimilarityMatrix release() &&;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RankedPaper {
  PaperId id;
  double score;
  bool zero_fill;  // score is exactly 0; only present to fill the requested count

  friend bool operator==(const RankedPaper&, const RankedPaper&) = default;
};

// Up to `count` papers by descending score, ties by ascending id. The query
// and N/A pairs are excluded.
std::vector<RankedPaper> top_k(const SimilarityMatrix& m, PaperId query, std::size_t count);

struct ReductionReport {
  std::vector<std::string> violations;
  std::size_t pairs_compared = 0;
  bool holds() const noexcept { return violations.empty(); }
};

// Checks the known collapses of P-Rank onto SimRank / rvs-SimRank and, at one
// iteration with C = 1, onto pairwise-normalized co-citation counts.
// `iterations` bounds the multi-step identities.
ReductionReport reduction_check(const CitationGraph& g, double tolerance = 1e-12,
                                int iterations = 5);

}  // namespace citesim
