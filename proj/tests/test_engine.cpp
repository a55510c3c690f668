#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "citesim/engine.hpp"
#include "citesim/error.hpp"
#include "citesim/fixtures.hpp"
#include "oracle.hpp"

using namespace citesim;

namespace {

PaperId id(const CitationGraph& g, const char* name) { return *g.find(name); }

MeasureConfig cfg_of(Measure m, double decay = 0.8, int k_max = 10) {
  auto cfg = MeasureConfig::defaults_for(m);
  cfg.decay = decay;
  cfg.k_max = k_max;
  return cfg;
}

MeasureConfig crank_pairwise() {
  auto cfg = cfg_of(Measure::crank);
  cfg.normalization = Normalization::pairwise;
  return cfg;
}

std::vector<MeasureConfig> iterative_configs() {
  return {cfg_of(Measure::simrank), cfg_of(Measure::rvs_simrank), cfg_of(Measure::prank),
          crank_pairwise(), cfg_of(Measure::crank)};
}

double max_abs_diff(const SimilarityMatrix& m, const oracle::Mat& r) {
  double worst = 0.0;
  const auto n = static_cast<PaperId>(m.size());
  for (PaperId p = 0; p < n; ++p)
    for (PaperId q = 0; q < n; ++q) worst = std::max(worst, std::abs(m.value(p, q) - r[p][q]));
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("co-citation") {
  const auto g = fixtures::tg1();
  auto raw = cfg_of(Measure::cocitation);
  raw.normalization = Normalization::raw_count;
  const auto m = cocitation(g, raw);
  CHECK(m.contract() == ScoreContract::raw_count);
  CHECK(m.value(id(g, "e"), id(g, "f")) == 1.0);
  CHECK(m.value(id(g, "a"), id(g, "c")) == 0.0);
  CHECK(m.value(id(g, "d"), id(g, "g")) == 1.0);
  CHECK(m.value(id(g, "a"), id(g, "a")) == 1.0);

  const auto jac = cocitation(g, cfg_of(Measure::cocitation));
  CHECK(jac.contract() == ScoreContract::unit_interval);
  CHECK(jac.value(id(g, "e"), id(g, "f")) == 1.0);
  CHECK(jac.value(id(g, "a"), id(g, "c")) == 0.0);
  // Both in-sets empty.
  CHECK(jac.value(id(g, "h"), id(g, "j")) == 0.0);

  CHECK_THROWS_AS(cocitation(g, cfg_of(Measure::coupling)), ConfigError);
}

TEST_CASE("coupling") {
  const auto g = fixtures::tg1();
  auto raw = cfg_of(Measure::coupling);
  raw.normalization = Normalization::raw_count;
  CHECK(coupling(g, raw).value(id(g, "e"), id(g, "f")) == 1.0);
  CHECK(coupling(g, cfg_of(Measure::coupling)).value(id(g, "e"), id(g, "f")) == 1.0);
  CHECK(coupling(g, raw).value(3, 3) == 1.0);
}

TEST_CASE("amsler") {
  const auto g = fixtures::tg1();
  auto cfg = cfg_of(Measure::amsler);
  cfg.normalization = Normalization::raw_count;
  CHECK(amsler(g, cfg).value(id(g, "e"), id(g, "f")) == 1.0);

  for (const auto norm : {Normalization::raw_count, Normalization::jaccard}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto r = fixtures::random_graph(15, 0.2, seed);
      auto a = cfg_of(Measure::amsler);
      a.normalization = norm;
      auto ci = cfg_of(Measure::cocitation);
      ci.normalization = norm;
      auto co = cfg_of(Measure::coupling);
      co.normalization = norm;
      a.lambda = 1.0;
      CHECK(amsler(r, a) == cocitation(r, ci));
      a.lambda = 0.0;
      CHECK(amsler(r, a) == coupling(r, co));
    }
  }
}

TEST_CASE("non-iterative measures match the oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = fixtures::random_graph(20, 0.15, seed);
    const auto sets = oracle::sets_of(g);
    for (const auto m : {Measure::cocitation, Measure::coupling, Measure::amsler}) {
      for (const auto norm : {Normalization::raw_count, Normalization::jaccard}) {
        auto cfg = cfg_of(m);
        cfg.normalization = norm;
        cfg.lambda = 0.3;
        CHECK(max_abs_diff(compute(g, cfg).matrix, oracle::direct(sets, cfg)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("iterate_pairwise") {
  SUBCASE("star: one pairwise step with C = 1 gives 1/k") {
    const auto g = fixtures::star(4);
    const auto r = iterate_pairwise(g, cfg_of(Measure::simrank, 1.0, 1));
    CHECK(r.matrix.value(0, 1) == 0.25);
    CHECK(r.report.iterations_run == 1);
    CHECK_FALSE(r.report.warnings.empty());
  }

  SUBCASE("diagonal stays 1 at every iteration") {
    const auto g = fixtures::tg2();
    for (const auto& cfg : iterative_configs()) {
      IterativeEngine engine(g, cfg);
      for (int k = 0; k < 6; ++k) {
        engine.step();
        for (PaperId p = 0; p < g.size(); ++p) CHECK(engine.current().score(p, p) == 1.0);
      }
    }
  }

  SUBCASE("first SimRank step with C = 1 is normalized co-citation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto g = fixtures::random_graph(25, 0.1, seed);
      const auto m = iterate_pairwise(g, cfg_of(Measure::simrank, 1.0, 1)).matrix;
      for (PaperId p = 0; p < g.size(); ++p) {
        for (PaperId q = p + 1; q < g.size(); ++q) {
          const auto s = m.score(p, q);
          if (!s) {
            CHECK((g.in(p).empty() || g.in(q).empty()));
            continue;
          }
          const auto ip = oracle::sets_of(g).in[p], iq = oracle::sets_of(g).in[q];
          const double expect = static_cast<double>(oracle::set_and(ip, iq).size()) /
                                (static_cast<double>(ip.size()) * static_cast<double>(iq.size()));
          CHECK(*s == doctest::Approx(expect).epsilon(1e-15));
        }
      }
    }
  }

  SUBCASE("N/A rules") {
    const auto g = fixtures::tg2();
    const auto a = id(g, "a"), b = id(g, "b"), k = id(g, "k"), l = id(g, "l");
    CHECK_FALSE(iterate_pairwise(g, cfg_of(Measure::rvs_simrank)).matrix.score(a, b));
    CHECK_FALSE(iterate_pairwise(g, cfg_of(Measure::simrank)).matrix.score(k, l));
    // P-Rank is only N/A when both of its views are.
    const auto pr = iterate_pairwise(g, cfg_of(Measure::prank)).matrix;
    CHECK(pr.score(a, b).has_value());
    CHECK(pr.score(k, l).has_value());
  }

  SUBCASE("rejects bad configs") {
    const auto g = fixtures::tg1();
    auto cfg = cfg_of(Measure::simrank);
    cfg.k_max = 0;
    CHECK_THROWS_AS(iterate_pairwise(g, cfg), ConfigError);
    CHECK_THROWS_AS(iterate_pairwise(g, cfg_of(Measure::crank)), ConfigError);
    CHECK_THROWS_AS(iterate_pairwise(g, cfg_of(Measure::cocitation)), ConfigError);
  }
}

TEST_CASE("crank_jaccard") {
  SUBCASE("one step on TG1") {
    const auto g = fixtures::tg1();
    const auto r = crank_jaccard(g, cfg_of(Measure::crank, 0.8, 1));
    CHECK(r.matrix.value(id(g, "e"), id(g, "f")) == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("first step is C times the Jaccard coefficient of L") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto g = fixtures::random_graph(30, 0.08, seed);
      const auto sets = oracle::sets_of(g);
      const auto m = crank_jaccard(g, cfg_of(Measure::crank, 0.7, 1)).matrix;
      for (PaperId p = 0; p < g.size(); ++p) {
        for (PaperId q = p + 1; q < g.size(); ++q) {
          const auto u = oracle::set_or(sets.und[p], sets.und[q]).size();
          const double expect =
              u == 0 ? 0.0
                     : 0.7 * static_cast<double>(oracle::set_and(sets.und[p], sets.und[q]).size()) /
                           static_cast<double>(u);
          CHECK(std::abs(m.value(p, q) - expect) <= 1e-15);
        }
      }
    }
  }

  SUBCASE("never N/A, isolated pairs score 0") {
    const auto g = CitationGraph::from_edges(4, {{0, 1}});
    const auto m = crank_jaccard(g, cfg_of(Measure::crank)).matrix;
    CHECK(m.na_count() == 0);
    CHECK(m.score(2, 3) == 0.0);
  }

  SUBCASE("rejects pairwise normalization") {
    CHECK_THROWS_AS(crank_jaccard(fixtures::tg1(), crank_pairwise()), ConfigError);
  }
}

TEST_CASE("converge") {
  const auto g = fixtures::tg1();

  SUBCASE("smaller decay converges sooner") {
    auto slow = cfg_of(Measure::crank, 0.8, 200);
    auto fast = cfg_of(Measure::crank, 0.2, 200);
    slow.epsilon = fast.epsilon = 1e-6;
    const auto a = converge(g, slow), b = converge(g, fast);
    CHECK(a.report.converged);
    CHECK(b.report.converged);
    CHECK(b.report.iterations_run < a.report.iterations_run);
  }

  SUBCASE("huge epsilon stops after one iteration") {
    auto cfg = cfg_of(Measure::crank);
    cfg.epsilon = 2.0;
    const auto r = converge(g, cfg);
    CHECK(r.report.converged);
    CHECK(r.report.iterations_run == 1);
  }

  SUBCASE("fixed point residual") {
    auto cfg = cfg_of(Measure::crank, 0.8, 200);
    cfg.epsilon = 1e-6;
    const auto r = converge(g, cfg);
    REQUIRE(r.report.converged);
    CHECK(r.report.max_delta_per_iteration.back() < cfg.epsilon);
    IterativeEngine engine(g, cfg);
    engine.reset(r.matrix);
    CHECK(engine.step() < cfg.epsilon);
  }

  SUBCASE("requires C < 1") {
    CHECK_THROWS_AS(converge(g, cfg_of(Measure::crank, 1.0)), ConfigError);
    CHECK_THROWS_AS(converge(g, cfg_of(Measure::amsler)), ConfigError);
  }
}

TEST_CASE("top_k") {
  SimilarityMatrix m(5, SimilarityMatrix::Storage::dense);
  m.set(0, 3, 0.9);
  m.set(0, 1, 0.5);

  SUBCASE("ordering and zero filler") {
    const auto r = top_k(m, 0, 10);
    REQUIRE(r.size() == 4);
    CHECK(r[0] == RankedPaper{3, 0.9, false});
    CHECK(r[1] == RankedPaper{1, 0.5, false});
    CHECK(r[2] == RankedPaper{2, 0.0, true});
    CHECK(r[3] == RankedPaper{4, 0.0, true});
    CHECK(top_k(m, 0, 1).size() == 1);
  }

  SUBCASE("ties break by ascending id") {
    SimilarityMatrix eq(6, SimilarityMatrix::Storage::dense);
    for (PaperId q = 0; q < 5; ++q) eq.set(q, 5, 0.25);
    const auto r = top_k(eq, 5, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0].id == 0);
    CHECK(r[1].id == 1);
    CHECK(r[2].id == 2);
  }

  SUBCASE("N/A pairs are excluded") {
    const auto g = fixtures::tg2();
    const auto sr = iterate_pairwise(g, cfg_of(Measure::simrank)).matrix;
    const auto k = id(g, "k");
    // k has no in-links: every pair with k is N/A.
    CHECK(top_k(sr, k, 5).empty());
  }

  SUBCASE("TG1 fixed point against a brute-force sort") {
    const auto g = fixtures::tg1();
    auto cfg = cfg_of(Measure::crank, 0.8, 200);
    cfg.epsilon = 1e-6;
    const auto fp = converge(g, cfg).matrix;
    const auto e = id(g, "e");
    std::vector<std::pair<double, PaperId>> all;
    for (PaperId x = 0; x < g.size(); ++x)
      if (x != e) all.emplace_back(-fp.value(e, x), x);
    std::sort(all.begin(), all.end());
    const auto r = top_k(fp, e, 3);
    REQUIRE(r.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(r[i].id == all[i].second);
      CHECK(r[i].score == -all[i].first);
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(top_k(m, 7, 3), std::out_of_range);
    CHECK_THROWS_AS(top_k(m, 0, 0), ConfigError);
  }
}

TEST_CASE("reduction_check") {
  CHECK(reduction_check(fixtures::tg1()).holds());
  CHECK(reduction_check(fixtures::tg2()).holds());
  const auto empty = reduction_check(CitationGraph{});
  CHECK(empty.holds());
  CHECK(empty.pairs_compared == 0);
  // Seed recorded for reproduction.
  const auto r = reduction_check(fixtures::random_graph(30, 0.1, 20240607));
  CHECK(r.holds());
  CHECK(r.pairs_compared > 0);
}

TEST_CASE("oracle equivalence per iteration") {
  std::vector<CitationGraph> graphs{fixtures::tg1(), fixtures::tg2(), fixtures::star(3)};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    graphs.push_back(fixtures::random_graph(8 + seed * 3, 0.12, seed));
  }
  for (const auto& g : graphs) {
    const auto sets = oracle::sets_of(g);
    for (auto cfg : iterative_configs()) {
      cfg.lambda = 0.3;
      IterativeEngine engine(g, cfg);
      for (int k = 1; k <= 6; ++k) {
        engine.step();
        CAPTURE(label(cfg));
        CAPTURE(k);
        CHECK(max_abs_diff(engine.current(), oracle::iterate(sets, cfg, k)) <= 1e-10);
      }
      for (PaperId p = 0; p < g.size(); ++p)
        for (PaperId q = 0; q < g.size(); ++q)
          CHECK(engine.current().is_na(p, q) == oracle::is_na(sets, cfg, p, q));
    }
  }
}

TEST_CASE("C-Rank monotone, bounded by C, symmetric") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto g = fixtures::random_graph(10 + seed, 0.15, seed);
    const auto cfg = cfg_of(Measure::crank, 0.8);
    IterativeEngine engine(g, cfg);
    SimilarityMatrix prev = engine.current();
    for (int k = 1; k <= 10; ++k) {
      engine.step();
      const auto& cur = engine.current();
      for (PaperId p = 0; p < g.size(); ++p) {
        for (PaperId q = p + 1; q < g.size(); ++q) {
          CHECK(cur.value(p, q) - prev.value(p, q) >= -1e-12);
          CHECK(cur.value(p, q) <= 0.8 + 1e-12);
          CHECK(cur.value(p, q) >= 0.0);
          CHECK(cur.value(p, q) == cur.value(q, p));
        }
      }
      prev = cur;
    }
  }
}

TEST_CASE("uniqueness: a perturbed start reaches the same fixed point") {
  const auto g = fixtures::tg2();
  auto cfg = cfg_of(Measure::crank, 0.8, 400);
  cfg.epsilon = 1e-9;
  const auto fp = converge(g, cfg).matrix;

  IterativeEngine engine(g, cfg);
  SimilarityMatrix start(g.size(), SimilarityMatrix::Storage::dense);
  for (PaperId p = 0; p < g.size(); ++p)
    for (PaperId q = p + 1; q < g.size(); ++q) start.set(p, q, 0.95);
  engine.reset(start);
  for (int k = 0; k < cfg.k_max; ++k)
    if (engine.step() < cfg.epsilon) break;
  double worst = 0.0;
  for (PaperId p = 0; p < g.size(); ++p)
    for (PaperId q = p + 1; q < g.size(); ++q)
      worst = std::max(worst, std::abs(engine.current().value(p, q) - fp.value(p, q)));
  CHECK(worst < 10 * 1e-6);
}

TEST_CASE("sparse storage is bit-identical to dense") {
  EngineOptions sparse;
  sparse.dense_limit = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto g = fixtures::random_graph(40, 0.05, seed);
    for (const auto m : kAllMeasures) {
      auto cfg = MeasureConfig::defaults_for(m);
      cfg.k_max = 6;
      cfg.epsilon = 1e-12;
      const auto d = compute(g, cfg);
      const auto s = compute(g, cfg, sparse);
      CHECK(s.matrix.storage() == SimilarityMatrix::Storage::sparse);
      CAPTURE(label(cfg));
      CHECK(d.matrix == s.matrix);
      CHECK(d.report.max_delta_per_iteration == s.report.max_delta_per_iteration);
      CHECK(d.matrix.na_count() == s.matrix.na_count());
    }
  }
}

TEST_CASE("thread count does not change results") {
  const auto g = fixtures::random_graph(60, 0.08, 77);
  for (const auto m : kAllMeasures) {
    const auto cfg = MeasureConfig::defaults_for(m);
    for (const std::size_t limit : {std::size_t{20000}, std::size_t{0}}) {
      const auto one = compute(g, cfg, {1, limit});
      const auto many = compute(g, cfg, {4, limit});
      CHECK(one.matrix == many.matrix);
      CHECK(one.report.max_delta_per_iteration == many.report.max_delta_per_iteration);
    }
  }
}

TEST_CASE("N/A coverage ordering") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = fixtures::random_graph(20, 0.05 + 0.01 * static_cast<double>(seed), seed);
    const auto crank = compute(g, cfg_of(Measure::crank)).matrix;
    const auto sr = compute(g, cfg_of(Measure::simrank)).matrix;
    const auto rvs = compute(g, cfg_of(Measure::rvs_simrank)).matrix;
    const auto pr = compute(g, cfg_of(Measure::prank)).matrix;
    CHECK(crank.na_count() == 0);
    CHECK(pr.na_count() <= sr.na_count());
    CHECK(pr.na_count() <= rvs.na_count());
    std::size_t brute = 0;
    for (PaperId p = 0; p < g.size(); ++p)
      for (PaperId q = p + 1; q < g.size(); ++q) {
        if (pr.is_na(p, q)) CHECK((sr.is_na(p, q) && rvs.is_na(p, q)));
        brute += sr.is_na(p, q) ? 1 : 0;
      }
    CHECK(brute == sr.na_count());
  }
}

TEST_SUITE_END();
