#include "citesim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "citesim/error.hpp"
#include "csv.hpp"

namespace citesim {

RawCorpus read_corpus(std::istream& in) {
  RawCorpus raw;
  std::string line_buf;
  std::size_t line_no = 0;
  while (std::getline(in, line_buf)) {
    ++line_no;
    const auto line = detail::trim(line_buf);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw DataError("line " + std::to_string(line_no) + ": malformed section header");
      }
      raw.fields.emplace_back(std::string(line.substr(1, line.size() - 2)),
                              std::vector<std::string>{});
      continue;
    }
    if (raw.fields.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": paper id outside a [field]");
    }
    raw.fields.back().second.emplace_back(line);
  }
  return raw;
}

std::size_t EvalCorpus::paper_count() const {
  std::size_t n = 0;
  for (const auto& [_, ids] : fields) n += ids.size();
  return n;
}

CorpusResolution resolve_corpus(const RawCorpus& raw, const CitationGraph& g,
                                std::string name) {
  CorpusResolution res;
  res.corpus.name = std::move(name);
  for (const auto& [field, ids] : raw.fields) {
    std::vector<PaperId> resolved;
    std::set<PaperId> seen;
    for (const auto& id : ids) {
      if (const auto p = g.find(id)) {
        if (seen.insert(*p).second) resolved.push_back(*p);
      } else {
        res.unresolved.push_back(id);
      }
    }
    if (resolved.size() < 2) {
      res.dropped_fields.push_back(field);
      continue;
    }
    res.corpus.fields.emplace_back(field, std::move(resolved));
  }
  if (res.corpus.fields.empty()) {
    throw DataError("corpus has no field with at least two papers present in the graph");
  }
  return res;
}

double precision_at_m(const SimilarityMatrix& m, PaperId query,
                      std::span<const PaperId> reference, std::size_t count) {
  if (query >= m.size()) {
    throw std::out_of_range("query " + std::to_string(query) + " not in graph");
  }
  if (count == 0) throw ConfigError("count must be >= 1");
  if (std::find(reference.begin(), reference.end(), query) == reference.end()) {
    throw ConfigError("query must belong to its reference list");
  }
  std::size_t hits = 0;
  for (const auto& r : top_k(m, query, count)) {
    if (r.zero_fill) continue;
    if (std::find(reference.begin(), reference.end(), r.id) != reference.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

std::optional<double> PrecisionTable::precision(std::string_view measure,
                                                std::size_t m) const {
  for (const auto& r : rows)
    if (r.measure == measure && r.m == m) return r.precision;
  return std::nullopt;
}

PrecisionTable run_benchmark(const CitationGraph& g, const EvalCorpus& corpus,
                             std::span<const MeasureConfig> configs,
                             std::span<const std::size_t> m_values,
                             const EngineOptions& opts) {
  for (const auto& cfg : configs) validate(cfg);
  for (const auto m : m_values)
    if (m == 0) throw ConfigError("m values must be >= 1");
  for (const auto& [field, ids] : corpus.fields)
    for (const auto p : ids)
      if (p >= g.size()) throw DataError("corpus field '" + field + "' references unknown id");

  PrecisionTable table;
  table.query_count = corpus.paper_count();
  if (m_values.empty()) return table;

  for (const auto& cfg : configs) {
    const auto result = compute(g, cfg, opts);
    const auto name = label(cfg);
    for (const auto m : m_values) {
      double sum = 0.0;
      for (const auto& [_, ids] : corpus.fields) {
        for (const auto query : ids) sum += precision_at_m(result.matrix, query, ids, m);
      }
      const double mean =
          table.query_count == 0 ? 0.0 : sum / static_cast<double>(table.query_count);
      table.rows.push_back({name, m, mean});
    }
  }
  return table;
}

std::string Histogram::bucket_label(std::size_t i) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << '[' << static_cast<double>(i) / 10.0 << ',' << static_cast<double>(i + 1) / 10.0
     << (i + 1 == kBuckets ? ']' : ')');
  return os.str();
}

namespace {

std::size_t bucket_of(double v) {
  auto i = static_cast<long>(std::floor(v * 10.0));
  i = std::clamp(i, 0L, 9L);
  // Correct for rounding in v * 10 against the exact edges i / 10.
  if (i > 0 && v < static_cast<double>(i) / 10.0) --i;
  if (i < 9 && v >= static_cast<double>(i + 1) / 10.0) ++i;
  return static_cast<std::size_t>(i);
}

}  // namespace

Histogram score_histogram(const SimilarityMatrix& m) {
  if (m.contract() == ScoreContract::raw_count) {
    throw ConfigError("histogram needs scores in [0,1]; raw_count matrices are unbounded");
  }
  Histogram h;
  h.total_pairs = m.pair_count();
  h.na = m.na_count();
  std::size_t nonzero = 0;
  m.for_each_stored([&](PaperId p, PaperId q, double v) {
    if (v == 0.0 || m.is_na(p, q)) return;
    ++h.buckets[bucket_of(v)];
    ++nonzero;
  });
  h.buckets[0] += h.total_pairs - h.na - nonzero;
  return h;
}

std::vector<double> top_pair_scores(const SimilarityMatrix& m, std::size_t count) {
  std::priority_queue<double, std::vector<double>, std::greater<>> best;
  std::size_t nonzero = 0;
  m.for_each_stored([&](PaperId p, PaperId q, double v) {
    if (v == 0.0 || m.is_na(p, q)) return;
    ++nonzero;
    if (best.size() < count) {
      best.push(v);
    } else if (count > 0 && v > best.top()) {
      best.pop();
      best.push(v);
    }
  });
  std::vector<double> out;
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  // Measured zeros fill the remainder.
  const std::size_t zeros = m.pair_count() - m.na_count() - nonzero;
  for (std::size_t i = 0; i < zeros && out.size() < count; ++i) out.push_back(0.0);
  return out;
}

std::vector<TracePoint> convergence_trace(const CitationGraph& g, const MeasureConfig& cfg,
                                          int iterations, const EngineOptions& opts) {
  if (iterations < 1) throw ConfigError("trace needs at least one iteration");
  IterativeEngine engine(g, cfg, opts);
  std::vector<TracePoint> trace;
  for (int k = 1; k <= iterations; ++k) {
    const double delta = engine.step();
    const auto top = top_pair_scores(engine.current(), 10);
    double mean = 0.0;
    for (const auto v : top) mean += v;
    if (!top.empty()) mean /= static_cast<double>(top.size());
    trace.push_back({k, mean, top.size(), delta});
  }
  return trace;
}

std::string_view to_string(CaseTag t) {
  switch (t) {
    case CaseTag::P1:
      return "P1";
    case CaseTag::P2:
      return "P2";
    case CaseTag::P3:
      return "P3";
  }
  return "?";
}

std::optional<CaseTag> parse_case_tag(std::string_view s) {
  if (s == "P1") return CaseTag::P1;
  if (s == "P2") return CaseTag::P2;
  if (s == "P3") return CaseTag::P3;
  return std::nullopt;
}

CaseTable case_analysis(const CitationGraph& g, std::span<const CasePair> pairs,
                        std::span<const MeasureConfig> configs, const EngineOptions& opts) {
  for (const auto& cp : pairs) {
    if (cp.p >= g.size() || cp.q >= g.size()) {
      throw DataError("case pair references a paper outside the graph");
    }
  }
  for (const auto& cfg : configs) validate(cfg);

  CaseTable table;
  table.pairs.assign(pairs.begin(), pairs.end());
  for (const auto& cfg : configs) {
    const auto result = compute(g, cfg, opts);
    table.measures.push_back(label(cfg));
    auto& row = table.scores.emplace_back();
    for (const auto& cp : pairs) row.push_back(result.matrix.score(cp.p, cp.q));
  }
  return table;
}

}  // namespace citesim
