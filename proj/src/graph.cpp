#include "citesim/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "citesim/error.hpp"
#include "csv.hpp"

namespace citesim {

namespace {

std::string line_error(std::size_t line, std::string_view what) {
  return "line " + std::to_string(line) + ": " + std::string(what);
}

}  // namespace

CitationGraph CitationGraph::from_edges(std::size_t n, std::vector<Edge> edges,
                                        std::vector<PaperMeta> meta,
                                        LoadReport* report) {
  CitationGraph g;
  const std::size_t read = edges.size();
  std::size_t loops = 0;
  std::erase_if(edges, [&](const Edge& e) {
    if (e.first >= n || e.second >= n) {
      throw std::out_of_range("edge endpoint outside [0, n)");
    }
    if (e.first == e.second) {
      ++loops;
      return true;
    }
    return false;
  });
  std::sort(edges.begin(), edges.end());
  const auto before_dedup = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (report != nullptr) {
    report->edges_read = read;
    report->self_loops_dropped = loops;
    report->duplicates_dropped = before_dedup - edges.size();
  }

  meta.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (meta[p].external_id.empty()) meta[p].external_id = std::to_string(p);
    if (!g.index_.emplace(meta[p].external_id, static_cast<PaperId>(p)).second) {
      throw DataError("duplicate external id '" + meta[p].external_id + "'");
    }
  }
  g.meta_ = std::move(meta);

  // Counting sort into CSR rows. Edges are sorted by citing id, so out rows and
  // (by stable fill order) in rows come out sorted.
  auto build = [n](const std::vector<Edge>& es, bool by_cited) {
    Adjacency a;
    a.offsets.assign(n + 1, 0);
    for (const auto& [src, dst] : es) ++a.offsets[(by_cited ? dst : src) + 1];
    for (std::size_t i = 0; i < n; ++i) a.offsets[i + 1] += a.offsets[i];
    a.ids.resize(es.size());
    std::vector<std::size_t> cursor(a.offsets.begin(), a.offsets.end() - 1);
    for (const auto& [src, dst] : es) {
      const auto key = by_cited ? dst : src;
      a.ids[cursor[key]++] = by_cited ? src : dst;
    }
    return a;
  };
  g.out_ = build(edges, false);
  g.in_ = build(edges, true);

  g.und_.offsets.assign(n + 1, 0);
  g.und_.ids.reserve(2 * edges.size());
  for (std::size_t p = 0; p < n; ++p) {
    const auto ins = g.in_.row(static_cast<PaperId>(p));
    const auto outs = g.out_.row(static_cast<PaperId>(p));
    std::set_union(ins.begin(), ins.end(), outs.begin(), outs.end(),
                   std::back_inserter(g.und_.ids));
    g.und_.offsets[p + 1] = g.und_.ids.size();
  }
  g.edges_ = std::move(edges);
  return g;
}

std::span<const PaperId> CitationGraph::view(PaperId p, LinkView v) const noexcept {
  switch (v) {
    case LinkView::in:
      return in(p);
    case LinkView::out:
      return out(p);
    case LinkView::undirected:
      break;
  }
  return undirected(p);
}

std::span<const PaperId> CitationGraph::neighbors(PaperId p, LinkView v) const {
  if (p >= size()) {
    throw std::out_of_range("paper id " + std::to_string(p) + " out of range");
  }
  return view(p, v);
}

bool CitationGraph::cites(PaperId citing, PaperId cited) const noexcept {
  const auto row = out(citing);
  return std::binary_search(row.begin(), row.end(), cited);
}

std::optional<PaperId> CitationGraph::find(std::string_view external_id) const {
  auto it = index_.find(std::string(external_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> CitationGraph::external_ids() const {
  std::vector<std::string> ids;
  ids.reserve(meta_.size());
  for (const auto& m : meta_) ids.push_back(m.external_id);
  return ids;
}

LoadResult load_graph(std::span<const std::pair<std::string, std::string>> edges,
                      std::span<const PaperMeta> meta) {
  std::unordered_map<std::string, PaperId> ids;
  std::vector<PaperMeta> nodes;
  auto intern = [&](const std::string& key) {
    if (key.empty()) throw DataError("empty external id");
    auto [it, inserted] = ids.emplace(key, static_cast<PaperId>(nodes.size()));
    if (inserted) nodes.push_back(PaperMeta{key, {}, {}});
    return it->second;
  };

  std::vector<CitationGraph::Edge> internal;
  internal.reserve(edges.size());
  for (const auto& [citing, cited] : edges) {
    const auto a = intern(citing);
    const auto b = intern(cited);
    internal.emplace_back(a, b);
  }

  const std::size_t from_edges = nodes.size();
  std::unordered_map<std::string, bool> seen_meta;
  for (const auto& m : meta) {
    if (!seen_meta.emplace(m.external_id, true).second) {
      throw DataError("duplicate metadata for '" + m.external_id + "'");
    }
    const auto p = intern(m.external_id);
    nodes[p].title = m.title;
    nodes[p].year = m.year;
  }

  LoadResult result;
  const auto n = nodes.size();
  result.graph =
      CitationGraph::from_edges(n, std::move(internal), std::move(nodes), &result.report);
  result.report.meta_only_nodes = n - from_edges;
  return result;
}

std::vector<std::pair<std::string, std::string>> read_edge_list(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError(line_error(line_no, "expected citing<TAB>cited"));
    }
    const auto citing = line.substr(0, tab);
    const auto cited = line.substr(tab + 1);
    if (cited.find('\t') != std::string_view::npos) {
      throw DataError(line_error(line_no, "too many fields"));
    }
    if (citing.empty() || cited.empty()) {
      throw DataError(line_error(line_no, "empty paper id"));
    }
    edges.emplace_back(std::string(citing), std::string(cited));
  }
  return edges;
}

std::vector<PaperMeta> read_meta_csv(std::istream& in) {
  std::vector<PaperMeta> out;
  std::string raw;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_cr(raw);
    if (header) {
      if (line != "external_id,title,year") {
        throw DataError(line_error(line_no, "expected header external_id,title,year"));
      }
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (!fields) throw DataError(line_error(line_no, "unterminated quote"));
    if (fields->size() != 3) throw DataError(line_error(line_no, "expected 3 fields"));
    PaperMeta m;
    m.external_id = (*fields)[0];
    if (m.external_id.empty()) throw DataError(line_error(line_no, "empty external_id"));
    m.title = (*fields)[1];
    const auto year_text = detail::trim((*fields)[2]);
    if (!year_text.empty()) {
      const auto year = detail::parse_number<int>(year_text);
      if (!year) throw DataError(line_error(line_no, "year is not an integer"));
      if (*year < 1900 || *year > 2100) {
        throw DataError(line_error(line_no, "year outside [1900, 2100]"));
      }
      m.year = *year;
    }
    out.push_back(std::move(m));
  }
  if (header) throw DataError("metadata file is empty (missing header)");
  return out;
}

LoadResult load_graph_files(const std::filesystem::path& edge_path,
                            const std::optional<std::filesystem::path>& meta_path) {
  std::ifstream edges_in(edge_path);
  if (!edges_in) throw DataError("cannot open " + edge_path.string());
  std::vector<std::pair<std::string, std::string>> edges;
  try {
    edges = read_edge_list(edges_in);
  } catch (const DataError& e) {
    throw DataError(edge_path.string() + ": " + e.what());
  }
  std::vector<PaperMeta> meta;
  if (meta_path) {
    std::ifstream meta_in(*meta_path);
    if (!meta_in) throw DataError("cannot open " + meta_path->string());
    try {
      meta = read_meta_csv(meta_in);
    } catch (const DataError& e) {
      throw DataError(meta_path->string() + ": " + e.what());
    }
  }
  return load_graph(edges, meta);
}

GraphStats stats(const CitationGraph& g) {
  GraphStats s;
  s.n = g.size();
  s.edge_count = g.edge_count();
  if (s.n == 0) return s;
  s.mean_in_degree = static_cast<double>(s.edge_count) / static_cast<double>(s.n);
  s.mean_out_degree = s.mean_in_degree;
  for (PaperId p = 0; p < s.n; ++p) {
    if (g.in(p).empty()) ++s.sources;
    if (g.out(p).empty()) ++s.sinks;
  }
  return s;
}

ConnectorRoles classify_connector(const CitationGraph& g, PaperId x, PaperId p,
                                  PaperId q) {
  const auto n = g.size();
  if (x >= n || p >= n || q >= n) throw std::out_of_range("paper id out of range");
  if (x == p || x == q || p == q) {
    throw ConfigError("classify_connector requires three distinct papers");
  }
  ConnectorRoles r;
  const bool p_x = g.cites(p, x), q_x = g.cites(q, x);
  const bool x_p = g.cites(x, p), x_q = g.cites(x, q);
  r.op = p_x && q_x;
  r.ip = x_p && x_q;
  r.bp = (p_x && x_q) || (q_x && x_p);
  return r;
}

}  // namespace citesim
