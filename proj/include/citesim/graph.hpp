#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace citesim {

// Dense 0-based node identity, assigned in order of first appearance.
using PaperId = std::uint32_t;

struct PaperMeta {
  std::string external_id;
  std::string title;
  std::optional<int> year;
};

enum class LinkView { in, out, undirected };

// Counts of input records that were dropped while building the graph.
struct LoadReport {
  std::size_t edges_read = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t meta_only_nodes = 0;
};

struct GraphStats {
  std::size_t n = 0;
  std::size_t edge_count = 0;
  double mean_in_degree = 0.0;
  double mean_out_degree = 0.0;
  std::size_t sources = 0;  // nodes without in-links
  std::size_t sinks = 0;    // nodes without out-links
};

// Immutable directed citation graph. An edge (citing, cited) means `citing`
// references `cited`. All three neighbor views are stored as sorted CSR rows.
class CitationGraph {
 public:
  using Edge = std::pair<PaperId, PaperId>;

  CitationGraph() = default;

  // Builds from internal ids. Self-loops and duplicate edges are dropped and
  // counted in `report` when it is non-null. Missing metadata entries get the
  // decimal id as external id.
  static CitationGraph from_edges(std::size_t n, std::vector<Edge> edges,
                                  std::vector<PaperMeta> meta = {},
                                  LoadReport* report = nullptr);

  std::size_t size() const noexcept { return meta_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  // Unchecked accessors for hot loops.
  std::span<const PaperId> in(PaperId p) const noexcept { return in_.row(p); }
  std::span<const PaperId> out(PaperId p) const noexcept { return out_.row(p); }
  std::span<const PaperId> undirected(PaperId p) const noexcept {
    return und_.row(p);
  }
  std::span<const PaperId> view(PaperId p, LinkView v) const noexcept;

  // Checked: throws std::out_of_range when p >= size().
  std::span<const PaperId> neighbors(PaperId p, LinkView v) const;

  bool cites(PaperId citing, PaperId cited) const noexcept;

  const PaperMeta& meta(PaperId p) const { return meta_.at(p); }
  std::optional<PaperId> find(std::string_view external_id) const;

  // Sorted by (citing, cited).
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  friend bool operator==(const CitationGraph& a, const CitationGraph& b) {
    return a.edges_ == b.edges_ && a.external_ids() == b.external_ids();
  }

 private:
  struct Adjacency {
    std::vector<std::size_t> offsets{0};
    std::vector<PaperId> ids;

    std::span<const PaperId> row(PaperId p) const noexcept {
      return {ids.data() + offsets[p], offsets[p + 1] - offsets[p]};
    }
  };

  std::vector<std::string> external_ids() const;

  std::vector<Edge> edges_;
  std::vector<PaperMeta> meta_;
  std::unordered_map<std::string, PaperId> index_;
  Adjacency in_;
  Adjacency out_;
  Adjacency und_;
};

struct LoadResult {
  CitationGraph graph;
  LoadReport report;
};

// Builds a graph from external-id edges. Ids are numbered in order of first
// appearance in `edges` (citing before cited), followed by nodes that appear
// only in `meta`.
LoadResult load_graph(
    std::span<const std::pair<std::string, std::string>> edges,
    std::span<const PaperMeta> meta = {});

// `citing<TAB>cited` per line; `#` comments and blank lines are skipped.
// Throws DataError naming the 1-based line number on malformed input.
std::vector<std::pair<std::string, std::string>> read_edge_list(
    std::istream& in);

// CSV with header `external_id,title,year`. Quoted fields are supported.
std::vector<PaperMeta> read_meta_csv(std::istream& in);

LoadResult load_graph_files(const std::filesystem::path& edge_path,
                            const std::optional<std::filesystem::path>& meta_path);

GraphStats stats(const CitationGraph& g);

// Roles a paper x plays for the pair (p, q). Several may hold at once.
struct ConnectorRoles {
  bool op = false;  // p -> x and q -> x
  bool ip = false;  // x -> p and x -> q
  bool bp = false;  // p -> x -> q or q -> x -> p

  bool none() const noexcept { return !op && !ip && !bp; }
  friend bool operator==(const ConnectorRoles&, const ConnectorRoles&) = default;
};

// Throws ConfigError when x, p, q are not distinct, std::out_of_range when any
// id is outside the graph.
ConnectorRoles classify_connector(const CitationGraph& g, PaperId x, PaperId p,
                                  PaperId q);

}  // namespace citesim
