#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "citesim/eval.hpp"
#include "citesim/graph.hpp"

namespace citesim::fixtures {

// Ten papers a..j: i->e, i->f, e->b, f->b, d->a, g->c, j->d, j->g, h->i.
// Co-citation(e,f) = 1, coupling(e,f) = 1, co-citation(a,c) = 0,
// co-citation(d,g) = 1.
CitationGraph tg1();

// Twelve papers a..l with old papers on top:
// g->f, h->f, h->d, f->c, c->a, k->i, l->i, i->b, d->b, e->b, l->j, j->e.
// (a,b) is an old pair without out-links, (k,l) a recent pair without
// in-links, and (e,l) an old/recent pair joined only by the between-paper j.
CitationGraph tg2();

// Papers p and q cited by each of `referrers` papers r0..r{k-1}.
CitationGraph star(std::size_t referrers);

// Each ordered pair (p, q), p != q, becomes an edge with probability
// `density`. Deterministic for a given seed.
CitationGraph random_graph(std::size_t n, double density, std::uint64_t seed);

struct CommunityFixture {
  CitationGraph graph;
  EvalCorpus corpus;  // one field per community
};

// `communities` groups of `size` papers with a random publication order;
// papers cite older papers of their own group with probability `p_in` and
// of other groups with probability `p_out`.
CommunityFixture community_graph(std::size_t communities, std::size_t size, double p_in,
                                 double p_out, std::uint64_t seed);

}  // namespace citesim::fixtures
