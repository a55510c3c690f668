#include "citesim/fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace citesim::fixtures {

namespace {

CitationGraph from_names(std::initializer_list<std::pair<const char*, const char*>> edges,
                         std::string_view alphabet) {
  std::vector<PaperMeta> meta;
  for (const char c : alphabet) meta.push_back({std::string(1, c), {}, {}});
  std::vector<CitationGraph::Edge> es;
  for (const auto& [a, b] : edges) {
    es.emplace_back(static_cast<PaperId>(alphabet.find(a[0])),
                    static_cast<PaperId>(alphabet.find(b[0])));
  }
  return CitationGraph::from_edges(alphabet.size(), std::move(es), std::move(meta));
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// library implementations, unlike std::uniform_real_distribution.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

CitationGraph tg1() {
  return from_names({{"i", "e"},
                     {"i", "f"},
                     {"e", "b"},
                     {"f", "b"},
                     {"d", "a"},
                     {"g", "c"},
                     {"j", "d"},
                     {"j", "g"},
                     {"h", "i"}},
                    "abcdefghij");
}

CitationGraph tg2() {
  return from_names({{"g", "f"},
                     {"h", "f"},
                     {"h", "d"},
                     {"f", "c"},
                     {"c", "a"},
                     {"k", "i"},
                     {"l", "i"},
                     {"i", "b"},
                     {"d", "b"},
                     {"e", "b"},
                     {"l", "j"},
                     {"j", "e"}},
                    "abcdefghijkl");
}

CitationGraph star(std::size_t referrers) {
  std::vector<PaperMeta> meta{{"p", {}, {}}, {"q", {}, {}}};
  std::vector<CitationGraph::Edge> es;
  for (std::size_t i = 0; i < referrers; ++i) {
    const auto r = static_cast<PaperId>(i + 2);
    meta.push_back({"r" + std::to_string(i), {}, {}});
    es.emplace_back(r, 0);
    es.emplace_back(r, 1);
  }
  const auto n = meta.size();
  return CitationGraph::from_edges(n, std::move(es), std::move(meta));
}

CitationGraph random_graph(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CitationGraph::Edge> es;
  for (PaperId p = 0; p < n; ++p)
    for (PaperId q = 0; q < n; ++q)
      if (p != q && unit(rng) < density) es.emplace_back(p, q);
  return CitationGraph::from_edges(n, std::move(es));
}

CommunityFixture community_graph(std::size_t communities, std::size_t size, double p_in,
                                 double p_out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto n = communities * size;
  // age[p]: publication rank, larger is newer.
  std::vector<std::size_t> age(n);
  std::iota(age.begin(), age.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(age[i - 1], age[rng() % i]);

  std::vector<CitationGraph::Edge> es;
  for (PaperId p = 0; p < n; ++p) {
    for (PaperId q = 0; q < n; ++q) {
      if (age[p] <= age[q]) continue;
      const bool same = p / size == q / size;
      if (unit(rng) < (same ? p_in : p_out)) es.emplace_back(p, q);
    }
  }
  std::vector<PaperMeta> meta;
  for (PaperId p = 0; p < n; ++p) {
    meta.push_back({"c" + std::to_string(p / size) + "_" + std::to_string(p % size), {},
                    static_cast<int>(1990 + age[p] * 30 / std::max<std::size_t>(n, 1))});
  }

  CommunityFixture fx;
  fx.graph = CitationGraph::from_edges(n, std::move(es), std::move(meta));
  fx.corpus.name = "communities";
  for (std::size_t c = 0; c < communities; ++c) {
    std::vector<PaperId> ids(size);
    std::iota(ids.begin(), ids.end(), static_cast<PaperId>(c * size));
    fx.corpus.fields.emplace_back("community" + std::to_string(c), std::move(ids));
  }
  return fx;
}

}  // namespace citesim::fixtures
