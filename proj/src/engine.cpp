#include "citesim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "citesim/error.hpp"
#include "parallel.hpp"

namespace citesim {

namespace {

using Span = std::span<const PaperId>;

std::size_t intersection_size(Span a, Span b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

double set_score(Span a, Span b, Normalization norm) {
  const auto common = intersection_size(a, b);
  if (norm == Normalization::raw_count) return static_cast<double>(common);
  const auto uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

// C / (|A||B|) * sum over A x B of R(a, b); 0 when either set is empty.
double pairwise_term(Span a, Span b, double decay, const SimilarityMatrix& r) {
  if (a.empty() || b.empty()) return 0.0;
  double sum = 0.0;
  for (const auto x : a)
    for (const auto y : b) sum += r.value(x, y);
  return decay / (static_cast<double>(a.size()) * static_cast<double>(b.size())) * sum;
}

// Per-worker membership stamps: mark_p[x] == p  <=>  x in L(p). A stale stamp
// is still correct because L(p) never changes.
struct Scratch {
  std::vector<PaperId> mark_p;
  std::vector<PaperId> mark_q;

  explicit Scratch(std::size_t n)
      : mark_p(n, std::numeric_limits<PaperId>::max()),
        mark_q(n, std::numeric_limits<PaperId>::max()) {}
};

double crank_jaccard_entry(const CitationGraph& g, PaperId p, PaperId q, double decay,
                           const SimilarityMatrix& r, Scratch& s) {
  const auto lp = g.undirected(p);
  const auto lq = g.undirected(q);
  for (const auto x : lp) s.mark_p[x] = p;
  for (const auto y : lq) s.mark_q[y] = q;

  std::size_t common = 0;
  for (const auto x : lp) common += s.mark_q[x] == q ? 1 : 0;
  const auto uni = lp.size() + lq.size() - common;
  if (uni == 0) return 0.0;

  // p' in L(p) \ L(q), q' in L(q)
  double only_p = 0.0;
  for (const auto x : lp) {
    if (s.mark_q[x] == q) continue;
    for (const auto y : lq) only_p += r.value(x, y);
  }
  // p' in L(p), q' in L(q) \ L(p)
  double only_q = 0.0;
  for (const auto x : lp) {
    for (const auto y : lq) {
      if (s.mark_p[y] == p) continue;
      only_q += r.value(x, y);
    }
  }

  const double u = static_cast<double>(uni);
  double acc = static_cast<double>(common) / u;
  if (!lq.empty()) acc += only_p / (u * static_cast<double>(lq.size()));
  if (!lp.empty()) acc += only_q / (u * static_cast<double>(lp.size()));
  return decay * acc;
}

NaMask::Rule na_rule(const MeasureConfig& cfg) {
  switch (cfg.measure) {
    case Measure::simrank:
      return NaMask::Rule::in;
    case Measure::rvs_simrank:
      return NaMask::Rule::out;
    case Measure::prank:
      return NaMask::Rule::in_and_out;
    case Measure::crank:
      return cfg.normalization == Normalization::pairwise ? NaMask::Rule::undirected
                                                          : NaMask::Rule::none;
    default:
      return NaMask::Rule::none;
  }
}

// Views whose reverse lists the pairs that can become nonzero: if R(a, b) is
// nonzero and a in N(p), b in N(q), then (p, q) is a candidate. The reverse of
// the in-view is the out-view and vice versa.
std::vector<LinkView> reverse_views(Measure m) {
  switch (m) {
    case Measure::cocitation:
    case Measure::simrank:
      return {LinkView::out};
    case Measure::coupling:
    case Measure::rvs_simrank:
      return {LinkView::in};
    case Measure::amsler:
    case Measure::prank:
      return {LinkView::out, LinkView::in};
    case Measure::crank:
      return {LinkView::undirected};
  }
  return {};
}

std::vector<std::uint64_t> sparse_candidates(const CitationGraph& g,
                                             const SimilarityMatrix& support,
                                             const std::vector<LinkView>& views) {
  const auto n = g.size();
  std::vector<std::uint64_t> cand;
  auto expand = [&](PaperId a, PaperId b) {
    for (const auto v : views) {
      for (const auto p : g.view(a, v)) {
        for (const auto q : g.view(b, v)) {
          if (p == q) continue;
          const auto lo = std::min(p, q), hi = std::max(p, q);
          cand.push_back(static_cast<std::uint64_t>(lo) * n + hi);
        }
      }
    }
  };
  for (PaperId a = 0; a < n; ++a) expand(a, a);
  support.for_each_stored([&](PaperId a, PaperId b, double v) {
    if (v != 0.0) expand(a, b);
  });
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  return cand;
}

// Writes kernel(p, q, scratch) into `out` for every off-diagonal pair that
// may be nonzero and returns max |out - prev| (0 when prev is null). In sparse
// mode, `support` decides the candidate pairs.
template <class Kernel>
double fill(const CitationGraph& g, SimilarityMatrix& out, const SimilarityMatrix* prev,
            const SimilarityMatrix& support, const std::vector<LinkView>& views,
            unsigned threads, Kernel&& kernel) {
  const auto n = g.size();
  threads = detail::resolve_threads(threads);
  std::vector<double> worker_delta(threads, 0.0);

  if (out.storage() == SimilarityMatrix::Storage::dense) {
    auto values = out.dense_values();
    std::atomic<std::size_t> next_row{0};
    detail::run_workers(threads, [&](unsigned w) {
      Scratch scratch(n);
      double delta = 0.0;
      for (std::size_t row; (row = next_row.fetch_add(1)) < n;) {
        const auto p = static_cast<PaperId>(row);
        if (p + 1 >= n) continue;
        std::size_t idx = out.tri_index(p, p + 1);
        for (PaperId q = p + 1; q < n; ++q, ++idx) {
          const double v = kernel(p, q, scratch);
          values[idx] = v;
          if (prev != nullptr) {
            delta = std::max(delta, std::abs(v - prev->dense_values()[idx]));
          }
        }
      }
      worker_delta[w] = delta;
    });
    return *std::max_element(worker_delta.begin(), worker_delta.end());
  }

  auto keys = sparse_candidates(g, support, views);
  std::vector<double> vals(keys.size());
  constexpr std::size_t kChunk = 1024;
  std::atomic<std::size_t> next_chunk{0};
  detail::run_workers(threads, [&](unsigned) {
    Scratch scratch(n);
    for (std::size_t c; (c = next_chunk.fetch_add(1)) * kChunk < keys.size();) {
      const auto end = std::min(keys.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        const auto [p, q] = out.key_pair(keys[i]);
        vals[i] = kernel(p, q, scratch);
      }
    }
  });
  out.assign_sparse(std::move(keys), std::move(vals));

  if (prev == nullptr) return 0.0;
  // Merge the two sorted key sets; a key missing on one side reads as 0.
  double delta = 0.0;
  const auto ak = out.sparse_keys();
  const auto av = out.sparse_values();
  const auto bk = prev->sparse_keys();
  const auto bv = prev->sparse_values();
  std::size_t i = 0, j = 0;
  while (i < ak.size() || j < bk.size()) {
    if (j == bk.size() || (i < ak.size() && ak[i] < bk[j])) {
      delta = std::max(delta, std::abs(av[i++]));
    } else if (i == ak.size() || bk[j] < ak[i]) {
      delta = std::max(delta, std::abs(bv[j++]));
    } else {
      delta = std::max(delta, std::abs(av[i++] - bv[j++]));
    }
  }
  return delta;
}

void require_measure(const MeasureConfig& cfg, Measure m) {
  validate(cfg);
  if (cfg.measure != m) {
    throw ConfigError("expected measure " + std::string(to_string(m)) + ", got " +
                      std::string(to_string(cfg.measure)));
  }
}

SimilarityMatrix non_iterative(const CitationGraph& g, const MeasureConfig& cfg,
                               const EngineOptions& opts) {
  const auto contract = cfg.normalization == Normalization::raw_count
                            ? ScoreContract::raw_count
                            : ScoreContract::unit_interval;
  SimilarityMatrix out(g.size(), SimilarityMatrix::choose_storage(g.size(), opts.dense_limit),
                       contract);
  const SimilarityMatrix empty_support(g.size(), SimilarityMatrix::Storage::sparse);
  const auto norm = cfg.normalization;
  const double lambda = cfg.lambda;
  const auto views = reverse_views(cfg.measure);

  switch (cfg.measure) {
    case Measure::cocitation:
      fill(g, out, nullptr, empty_support, views, opts.threads,
           [&](PaperId p, PaperId q, Scratch&) { return set_score(g.in(p), g.in(q), norm); });
      break;
    case Measure::coupling:
      fill(g, out, nullptr, empty_support, views, opts.threads,
           [&](PaperId p, PaperId q, Scratch&) { return set_score(g.out(p), g.out(q), norm); });
      break;
    case Measure::amsler:
      fill(g, out, nullptr, empty_support, views, opts.threads,
           [&](PaperId p, PaperId q, Scratch&) {
             return lambda * set_score(g.in(p), g.in(q), norm) +
                    (1.0 - lambda) * set_score(g.out(p), g.out(q), norm);
           });
      break;
    default:
      throw ConfigError("not a non-iterative measure");
  }
  return out;
}

void run_to_stop(IterativeEngine& engine, const MeasureConfig& cfg, IterationReport& report) {
  while (report.iterations_run < cfg.k_max) {
    const double delta = engine.step();
    report.max_delta_per_iteration.push_back(delta);
    ++report.iterations_run;
    if (delta < cfg.epsilon) {
      report.converged = true;
      break;
    }
  }
}

SimilarityResult run_iterative(const CitationGraph& g, const MeasureConfig& cfg,
                               const EngineOptions& opts) {
  SimilarityResult result;
  if (cfg.decay == 1.0) {
    result.report.warnings.emplace_back(
        "C = 1: the fixed point is only guaranteed unique for C < 1");
  }
  IterativeEngine engine(g, cfg, opts);
  run_to_stop(engine, cfg, result.report);
  result.matrix = std::move(engine).release();
  return result;
}

}  // namespace

// --- IterativeEngine --------------------------------------------------------

struct IterativeEngine::Impl {
  const CitationGraph* graph;
  MeasureConfig cfg;
  EngineOptions opts;
  SimilarityMatrix current;
  std::vector<LinkView> views;
};

IterativeEngine::IterativeEngine(const CitationGraph& g, const MeasureConfig& cfg,
                                 const EngineOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  validate(cfg);
  if (!is_iterative(cfg.measure)) {
    throw ConfigError(std::string(to_string(cfg.measure)) + " is not an iterative measure");
  }
  impl_->graph = &g;
  impl_->cfg = cfg;
  impl_->opts = opts;
  impl_->views = reverse_views(cfg.measure);
  impl_->current =
      SimilarityMatrix(g.size(), SimilarityMatrix::choose_storage(g.size(), opts.dense_limit));
  impl_->current.set_na_mask(NaMask(g, na_rule(cfg)));
}

IterativeEngine::~IterativeEngine() = default;
IterativeEngine::IterativeEngine(IterativeEngine&&) noexcept = default;
IterativeEngine& IterativeEngine::operator=(IterativeEngine&&) noexcept = default;

double IterativeEngine::step() {
  const auto& g = *impl_->graph;
  const auto& cfg = impl_->cfg;
  const auto& prev = impl_->current;
  SimilarityMatrix next(g.size(), prev.storage());
  next.set_na_mask(prev.na_mask());
  const double c = cfg.decay;
  const double lambda = cfg.lambda;

  double delta = 0.0;
  auto run = [&](auto&& kernel) {
    delta = fill(g, next, &prev, prev, impl_->views, impl_->opts.threads, kernel);
  };
  switch (cfg.measure) {
    case Measure::simrank:
      run([&](PaperId p, PaperId q, Scratch&) {
        return pairwise_term(g.in(p), g.in(q), c, prev);
      });
      break;
    case Measure::rvs_simrank:
      run([&](PaperId p, PaperId q, Scratch&) {
        return pairwise_term(g.out(p), g.out(q), c, prev);
      });
      break;
    case Measure::prank:
      run([&](PaperId p, PaperId q, Scratch&) {
        return lambda * pairwise_term(g.in(p), g.in(q), c, prev) +
               (1.0 - lambda) * pairwise_term(g.out(p), g.out(q), c, prev);
      });
      break;
    case Measure::crank:
      if (cfg.normalization == Normalization::pairwise) {
        run([&](PaperId p, PaperId q, Scratch&) {
          return pairwise_term(g.undirected(p), g.undirected(q), c, prev);
        });
      } else {
        run([&](PaperId p, PaperId q, Scratch& s) {
          return crank_jaccard_entry(g, p, q, c, prev, s);
        });
      }
      break;
    default:
      throw std::logic_error("unreachable");
  }
  next.set_iteration(prev.iteration() + 1);
  impl_->current = std::move(next);
  return delta;
}

void IterativeEngine::reset(SimilarityMatrix start) {
  if (start.size() != impl_->current.size() || start.storage() != impl_->current.storage()) {
    throw ConfigError("start matrix does not match the engine's size or storage");
  }
  start.set_na_mask(impl_->current.na_mask());
  start.set_iteration(0);
  impl_->current = std::move(start);
}

const SimilarityMatrix& IterativeEngine::current() const noexcept { return impl_->current; }
int IterativeEngine::iteration() const noexcept { return impl_->current.iteration(); }
SimilarityMatrix IterativeEngine::release() && { return std::move(impl_->current); }

// --- measures ---------------------------------------------------------------

SimilarityMatrix cocitation(const CitationGraph& g, const MeasureConfig& cfg,
                            const EngineOptions& opts) {
  require_measure(cfg, Measure::cocitation);
  return non_iterative(g, cfg, opts);
}

SimilarityMatrix coupling(const CitationGraph& g, const MeasureConfig& cfg,
                          const EngineOptions& opts) {
  require_measure(cfg, Measure::coupling);
  return non_iterative(g, cfg, opts);
}

SimilarityMatrix amsler(const CitationGraph& g, const MeasureConfig& cfg,
                        const EngineOptions& opts) {
  require_measure(cfg, Measure::amsler);
  return non_iterative(g, cfg, opts);
}

SimilarityResult iterate_pairwise(const CitationGraph& g, const MeasureConfig& cfg,
                                  const EngineOptions& opts) {
  validate(cfg);
  const bool ok = cfg.measure == Measure::simrank || cfg.measure == Measure::rvs_simrank ||
                  cfg.measure == Measure::prank ||
                  (cfg.measure == Measure::crank && cfg.normalization == Normalization::pairwise);
  if (!ok) throw ConfigError("iterate_pairwise needs a pairwise-normalized iterative measure");
  return run_iterative(g, cfg, opts);
}

SimilarityResult crank_jaccard(const CitationGraph& g, const MeasureConfig& cfg,
                               const EngineOptions& opts) {
  require_measure(cfg, Measure::crank);
  if (cfg.normalization != Normalization::jaccard) {
    throw ConfigError("crank_jaccard needs jaccard normalization");
  }
  return run_iterative(g, cfg, opts);
}

SimilarityResult converge(const CitationGraph& g, const MeasureConfig& cfg,
                          const EngineOptions& opts) {
  validate(cfg);
  if (!is_iterative(cfg.measure)) throw ConfigError("converge needs an iterative measure");
  if (!(cfg.decay < 1.0)) throw ConfigError("converge requires C < 1");
  if (cfg.measure == Measure::crank && cfg.normalization == Normalization::jaccard) {
    return crank_jaccard(g, cfg, opts);
  }
  return iterate_pairwise(g, cfg, opts);
}

SimilarityResult compute(const CitationGraph& g, const MeasureConfig& cfg,
                         const EngineOptions& opts) {
  validate(cfg);
  switch (cfg.measure) {
    case Measure::cocitation:
    case Measure::coupling:
    case Measure::amsler:
      return {non_iterative(g, cfg, opts), {}};
    case Measure::crank:
      if (cfg.normalization == Normalization::jaccard) return crank_jaccard(g, cfg, opts);
      return iterate_pairwise(g, cfg, opts);
    default:
      return iterate_pairwise(g, cfg, opts);
  }
}

// --- ranking ----------------------------------------------------------------

std::vector<RankedPaper> top_k(const SimilarityMatrix& m, PaperId query, std::size_t count) {
  if (query >= m.size()) {
    throw std::out_of_range("query " + std::to_string(query) + " out of range");
  }
  if (count == 0) throw ConfigError("count must be >= 1");

  std::vector<RankedPaper> positive;
  auto consider = [&](PaperId other, double v) {
    if (v > 0.0 && !m.is_na(query, other)) positive.push_back({other, v, false});
  };
  if (m.storage() == SimilarityMatrix::Storage::dense) {
    for (PaperId x = 0; x < m.size(); ++x)
      if (x != query) consider(x, m.value(query, x));
  } else {
    m.for_each_stored([&](PaperId p, PaperId q, double v) {
      if (p == query) consider(q, v);
      else if (q == query) consider(p, v);
    });
  }
  auto by_rank = [](const RankedPaper& a, const RankedPaper& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  const auto keep = std::min(count, positive.size());
  std::partial_sort(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(keep),
                    positive.end(), by_rank);
  positive.resize(keep);
  if (positive.size() == count) return positive;

  // Fill with measured zeros in ascending id order.
  std::vector<bool> taken(m.size(), false);
  for (const auto& r : positive) taken[r.id] = true;
  for (PaperId x = 0; x < m.size() && positive.size() < count; ++x) {
    if (x == query || taken[x] || m.is_na(query, x)) continue;
    if (m.value(query, x) == 0.0) positive.push_back({x, 0.0, true});
  }
  return positive;
}

// --- reductions -------------------------------------------------------------

ReductionReport reduction_check(const CitationGraph& g, double tolerance, int iterations) {
  ReductionReport report;
  const auto n = static_cast<PaperId>(g.size());

  auto compare = [&](const char* name, const SimilarityMatrix& a, const SimilarityMatrix& b,
                     int k) {
    for (PaperId p = 0; p < n; ++p) {
      for (PaperId q = p + 1; q < n; ++q) {
        ++report.pairs_compared;
        const double x = a.value(p, q), y = b.value(p, q);
        if (std::abs(x - y) > tolerance) {
          std::ostringstream os;
          os << name << " k=" << k << " pair (" << p << ',' << q << "): " << x << " vs " << y;
          report.violations.push_back(os.str());
        }
      }
    }
  };

  auto cfg_for = [](Measure m, double c, double lambda) {
    auto cfg = MeasureConfig::defaults_for(m);
    cfg.decay = c;
    cfg.lambda = lambda;
    cfg.k_max = 1;
    return cfg;
  };

  // (a), (b): one iteration with C = 1.
  {
    IterativeEngine pr1(g, cfg_for(Measure::prank, 1.0, 1.0));
    IterativeEngine sr(g, cfg_for(Measure::simrank, 1.0, 1.0));
    IterativeEngine pr0(g, cfg_for(Measure::prank, 1.0, 0.0));
    IterativeEngine rvs(g, cfg_for(Measure::rvs_simrank, 1.0, 0.0));
    pr1.step();
    sr.step();
    pr0.step();
    rvs.step();

    SimilarityMatrix closed(g.size(), pr1.current().storage());
    closed.set_na_mask(NaMask(g, NaMask::Rule::in));
    for (PaperId p = 0; p < n; ++p) {
      for (PaperId q = p + 1; q < n; ++q) {
        const auto ip = g.in(p), iq = g.in(q);
        if (ip.empty() || iq.empty()) continue;
        const double v = static_cast<double>(intersection_size(ip, iq)) /
                         (static_cast<double>(ip.size()) * static_cast<double>(iq.size()));
        if (v != 0.0) closed.set(p, q, v);
      }
    }
    compare("(a) prank(l=1) vs simrank", pr1.current(), sr.current(), 1);
    compare("(a) simrank vs normalized co-citation", sr.current(), closed, 1);
    compare("(b) prank(l=0) vs rvs_simrank", pr0.current(), rvs.current(), 1);
  }

  // (c), (d): any k, default decay.
  {
    const double c = MeasureConfig{}.decay;
    IterativeEngine pr1(g, cfg_for(Measure::prank, c, 1.0));
    IterativeEngine sr(g, cfg_for(Measure::simrank, c, 1.0));
    IterativeEngine pr0(g, cfg_for(Measure::prank, c, 0.0));
    IterativeEngine rvs(g, cfg_for(Measure::rvs_simrank, c, 0.0));
    for (int k = 1; k <= iterations; ++k) {
      pr1.step();
      sr.step();
      pr0.step();
      rvs.step();
      compare("(c) prank(l=1) vs simrank", pr1.current(), sr.current(), k);
      compare("(d) prank(l=0) vs rvs_simrank", pr0.current(), rvs.current(), k);
    }
  }
  return report;
}

}  // namespace citesim
