#include "citesim/io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "citesim/error.hpp"
#include "csv.hpp"

namespace citesim {

namespace {

DataError row_error(std::size_t line, std::string_view what) {
  return DataError("line " + std::to_string(line) + ": " + std::string(what));
}

PaperId resolve(const CitationGraph& g, const std::string& id, std::size_t line) {
  const auto p = g.find(id);
  if (!p) throw row_error(line, "unknown paper id '" + id + "'");
  return *p;
}

}  // namespace

std::string format_score(double v) { return detail::format_real(v); }

void write_matrix_csv(std::ostream& out, const CitationGraph& g, const SimilarityMatrix& m,
                      double threshold) {
  out << "p,q,score\n";
  const auto n = static_cast<PaperId>(m.size());
  auto row = [&](PaperId p, PaperId q, double v) {
    out << detail::quote_csv(g.meta(p).external_id) << ','
        << detail::quote_csv(g.meta(q).external_id) << ',' << format_score(v) << '\n';
  };
  auto emit_diagonal = [&](PaperId p) {
    if (1.0 > threshold) row(p, p, 1.0);
  };
  auto emit = [&](PaperId p, PaperId q, double v) {
    if (v > threshold && !m.is_na(p, q)) row(p, q, v);
  };

  if (m.storage() == SimilarityMatrix::Storage::dense) {
    for (PaperId p = 0; p < n; ++p) {
      emit_diagonal(p);
      for (PaperId q = p + 1; q < n; ++q) emit(p, q, m.value(p, q));
    }
    return;
  }
  // Sparse rows come in (p, q) order; interleave the diagonal.
  PaperId next_diag = 0;
  m.for_each_stored([&](PaperId p, PaperId q, double v) {
    while (next_diag <= p) emit_diagonal(next_diag++);
    emit(p, q, v);
  });
  while (next_diag < n) emit_diagonal(next_diag++);
}

std::vector<MatrixRow> read_matrix_csv(std::istream& in, const CitationGraph& g) {
  std::vector<MatrixRow> rows;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    const auto line = detail::strip_cr(buf);
    if (line_no == 1) {
      if (line != "p,q,score") throw row_error(1, "expected header p,q,score");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split_csv(line);
    if (!fields || fields->size() != 3) throw row_error(line_no, "expected 3 fields");
    const auto score = detail::parse_number<double>((*fields)[2]);
    if (!score) throw row_error(line_no, "score is not a number");
    rows.push_back({resolve(g, (*fields)[0], line_no), resolve(g, (*fields)[1], line_no),
                    *score});
  }
  if (line_no == 0) throw DataError("matrix file is empty");
  return rows;
}

std::vector<std::string> verify_matrix(std::span<const MatrixRow> rows,
                                       const CitationGraph& g, const SimilarityMatrix& m,
                                       double threshold) {
  std::vector<std::string> problems;
  auto describe = [&](PaperId p, PaperId q) {
    return "(" + g.meta(p).external_id + "," + g.meta(q).external_id + ")";
  };
  std::vector<std::uint64_t> listed;
  listed.reserve(rows.size());
  for (const auto& r : rows) {
    const auto lo = std::min(r.p, r.q), hi = std::max(r.p, r.q);
    listed.push_back(static_cast<std::uint64_t>(lo) * m.size() + hi);
    if (m.is_na(r.p, r.q)) {
      problems.push_back(describe(r.p, r.q) + " is N/A but listed");
    } else if (m.value(r.p, r.q) != r.score) {
      problems.push_back(describe(r.p, r.q) + ": file " + format_score(r.score) +
                         " vs computed " + format_score(m.value(r.p, r.q)));
    }
  }
  std::sort(listed.begin(), listed.end());
  if (std::adjacent_find(listed.begin(), listed.end()) != listed.end()) {
    problems.emplace_back("duplicate rows");
  }
  auto is_listed = [&](PaperId p, PaperId q) {
    return std::binary_search(listed.begin(), listed.end(),
                              static_cast<std::uint64_t>(p) * m.size() + q);
  };
  for (PaperId p = 0; p < m.size(); ++p) {
    if (1.0 > threshold && !is_listed(p, p)) problems.push_back(describe(p, p) + " missing");
  }
  m.for_each_stored([&](PaperId p, PaperId q, double v) {
    if (v > threshold && !m.is_na(p, q) && !is_listed(p, q)) {
      problems.push_back(describe(p, q) + " missing");
    }
  });
  return problems;
}

void write_iteration_csv(std::ostream& out, const IterationReport& report) {
  out << "iteration,max_delta\n";
  for (std::size_t i = 0; i < report.max_delta_per_iteration.size(); ++i) {
    out << i + 1 << ',' << format_score(report.max_delta_per_iteration[i]) << '\n';
  }
}

void write_topk_csv(std::ostream& out, const CitationGraph& g,
                    std::span<const RankedPaper> ranked) {
  out << "rank,paper,score,zero_fill,title\n";
  std::size_t rank = 0;
  for (const auto& r : ranked) {
    const auto& meta = g.meta(r.id);
    out << ++rank << ',' << detail::quote_csv(meta.external_id) << ','
        << format_score(r.score) << ',' << (r.zero_fill ? 1 : 0) << ','
        << detail::quote_csv(meta.title) << '\n';
  }
}

void write_precision_csv(std::ostream& out, const PrecisionTable& table) {
  out << "measure,m,precision\n";
  for (const auto& r : table.rows) {
    out << detail::quote_csv(r.measure) << ',' << r.m << ',' << format_score(r.precision)
        << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bucket,count\n";
  for (std::size_t i = 0; i < Histogram::kBuckets; ++i) {
    out << detail::quote_csv(Histogram::bucket_label(i)) << ',' << h.buckets[i] << '\n';
  }
  out << "N/A," << h.na << '\n';
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
  out << "k,mean_top10\n";
  for (const auto& t : trace) out << t.k << ',' << format_score(t.mean_top10) << '\n';
}

void write_case_csv(std::ostream& out, const CitationGraph& g, const CaseTable& table) {
  out << "measure";
  for (const auto& cp : table.pairs) {
    out << ','
        << detail::quote_csv(g.meta(cp.p).external_id + "-" + g.meta(cp.q).external_id +
                             " (" + std::string(to_string(cp.tag)) + ")");
  }
  out << '\n';
  for (std::size_t i = 0; i < table.measures.size(); ++i) {
    out << detail::quote_csv(table.measures[i]);
    for (const auto& s : table.scores[i]) out << ',' << (s ? format_score(*s) : "N/A");
    out << '\n';
  }
}

std::vector<CasePair> read_case_pairs(std::istream& in, const CitationGraph& g) {
  std::vector<CasePair> pairs;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    const auto line = detail::strip_cr(buf);
    if (line_no == 1) {
      if (line != "p,q,case") throw row_error(1, "expected header p,q,case");
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split_csv(line);
    if (!fields || fields->size() != 3) throw row_error(line_no, "expected 3 fields");
    const auto tag = parse_case_tag(detail::trim((*fields)[2]));
    if (!tag) throw row_error(line_no, "case must be P1, P2 or P3");
    const auto p = resolve(g, (*fields)[0], line_no);
    const auto q = resolve(g, (*fields)[1], line_no);
    if (p == q) throw row_error(line_no, "pair must name two different papers");
    pairs.push_back({p, q, *tag});
  }
  if (pairs.empty()) throw DataError("pairs file lists no pairs");
  return pairs;
}

}  // namespace citesim
