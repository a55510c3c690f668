#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>

#include "citesim/engine.hpp"
#include "citesim/error.hpp"
#include "citesim/eval.hpp"
#include "citesim/fixtures.hpp"
#include "citesim/graph.hpp"

namespace py = pybind11;
using namespace citesim;

namespace {

MeasureConfig make_config(const std::string& measure, std::optional<std::string> normalization,
                          double decay, double lambda, int k_max, double epsilon) {
  const auto m = parse_measure(measure);
  if (!m) throw ConfigError("unknown measure '" + measure + "'");
  auto cfg = MeasureConfig::defaults_for(*m);
  if (normalization) {
    const auto n = parse_normalization(*normalization);
    if (!n) throw ConfigError("unknown normalization '" + *normalization + "'");
    cfg.normalization = *n;
  }
  cfg.decay = decay;
  cfg.lambda = lambda;
  cfg.k_max = k_max;
  cfg.epsilon = epsilon;
  validate(cfg);
  return cfg;
}

LinkView parse_view(const std::string& v) {
  if (v == "in") return LinkView::in;
  if (v == "out") return LinkView::out;
  if (v == "undirected") return LinkView::undirected;
  throw ConfigError("view must be 'in', 'out' or 'undirected'");
}

EngineOptions options(unsigned threads) {
  EngineOptions opts;
  opts.threads = threads;
  return opts;
}

py::dict report_dict(const IterationReport& r) {
  py::dict d;
  d["iterations_run"] = r.iterations_run;
  d["converged"] = r.converged;
  d["max_delta_per_iteration"] = r.max_delta_per_iteration;
  d["warnings"] = r.warnings;
  return d;
}

EvalCorpus corpus_from(const std::map<std::string, std::vector<PaperId>>& fields) {
  EvalCorpus c{"corpus", {}};
  for (const auto& [name, ids] : fields) c.fields.emplace_back(name, ids);
  return c;
}

}  // namespace

#define CONFIG_ARGS                                                                        \
  py::arg("measure"), py::arg("normalization") = py::none(), py::arg("C") = 0.8,           \
      py::arg("lam") = 0.5, py::arg("k_max") = 10, py::arg("epsilon") = 1e-4

PYBIND11_MODULE(_citesim, m) {
  m.doc() = "Citation-graph similarity measures";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<CitationGraph>(m, "Graph")
      .def_static(
          "from_edges",
          [](const std::vector<std::pair<std::string, std::string>>& edges) {
            return load_graph(edges).graph;
          },
          py::arg("edges"), "Builds a graph from (citing, cited) external-id pairs.")
      .def_static(
          "load",
          [](const std::filesystem::path& edges, std::optional<std::filesystem::path> meta) {
            return load_graph_files(edges, meta).graph;
          },
          py::arg("edges"), py::arg("meta") = py::none())
      .def_property_readonly("n", &CitationGraph::size)
      .def_property_readonly("edge_count", &CitationGraph::edge_count)
      .def("__len__", &CitationGraph::size)
      .def("find", [](const CitationGraph& g, const std::string& id) { return g.find(id); })
      .def("name",
           [](const CitationGraph& g, PaperId p) {
             if (p >= g.size()) throw py::index_error("paper id out of range");
             return g.meta(p).external_id;
           })
      .def(
          "neighbors",
          [](const CitationGraph& g, PaperId p, const std::string& view) {
            const auto s = g.neighbors(p, parse_view(view));
            return std::vector<PaperId>(s.begin(), s.end());
          },
          py::arg("p"), py::arg("view") = "undirected")
      .def("edges", [](const CitationGraph& g) {
        return std::vector<std::pair<PaperId, PaperId>>(g.edges().begin(), g.edges().end());
      })
      .def("stats", [](const CitationGraph& g) {
        const auto s = stats(g);
        py::dict d;
        d["n"] = s.n;
        d["edge_count"] = s.edge_count;
        d["mean_in_degree"] = s.mean_in_degree;
        d["mean_out_degree"] = s.mean_out_degree;
        d["sources"] = s.sources;
        d["sinks"] = s.sinks;
        return d;
      });

  py::class_<SimilarityMatrix>(m, "Matrix")
      .def_property_readonly("n", &SimilarityMatrix::size)
      .def_property_readonly("iteration", &SimilarityMatrix::iteration)
      .def_property_readonly("na_count", &SimilarityMatrix::na_count)
      .def_property_readonly("sparse", [](const SimilarityMatrix& s) {
        return s.storage() == SimilarityMatrix::Storage::sparse;
      })
      .def("score", &SimilarityMatrix::score, py::arg("p"), py::arg("q"),
           "Score of (p, q), or None when the pair is N/A.")
      .def("to_numpy", [](const SimilarityMatrix& s) {
        // N/A pairs become NaN.
        const auto n = static_cast<py::ssize_t>(s.size());
        py::array_t<double> out({n, n});
        auto a = out.mutable_unchecked<2>();
        for (PaperId p = 0; p < s.size(); ++p)
          for (PaperId q = 0; q < s.size(); ++q)
            a(p, q) = s.is_na(p, q) ? std::numeric_limits<double>::quiet_NaN() : s.value(p, q);
        return out;
      });

  m.def(
      "compute",
      [](const CitationGraph& g, const std::string& measure,
         std::optional<std::string> normalization, double decay, double lambda, int k_max,
         double epsilon, unsigned threads) {
        const auto cfg = make_config(measure, normalization, decay, lambda, k_max, epsilon);
        SimilarityResult r;
        {
          py::gil_scoped_release release;
          r = compute(g, cfg, options(threads));
        }
        return py::make_tuple(std::move(r.matrix), report_dict(r.report));
      },
      py::arg("graph"), CONFIG_ARGS, py::arg("threads") = 1,
      "Returns (matrix, iteration report).");

  m.def(
      "converge",
      [](const CitationGraph& g, const std::string& measure,
         std::optional<std::string> normalization, double decay, double lambda, int k_max,
         double epsilon, unsigned threads) {
        const auto cfg = make_config(measure, normalization, decay, lambda, k_max, epsilon);
        SimilarityResult r;
        {
          py::gil_scoped_release release;
          r = converge(g, cfg, options(threads));
        }
        return py::make_tuple(std::move(r.matrix), report_dict(r.report));
      },
      py::arg("graph"), CONFIG_ARGS, py::arg("threads") = 1);

  m.def(
      "top_k",
      [](const SimilarityMatrix& s, PaperId query, std::size_t count) {
        std::vector<std::tuple<PaperId, double, bool>> out;
        for (const auto& r : top_k(s, query, count)) out.emplace_back(r.id, r.score, r.zero_fill);
        return out;
      },
      py::arg("matrix"), py::arg("query"), py::arg("count") = 10,
      "List of (paper, score, zero_fill) by descending score.");

  m.def(
      "reduction_check",
      [](const CitationGraph& g, double tolerance) {
        const auto r = reduction_check(g, tolerance);
        return py::make_tuple(r.holds(), r.violations);
      },
      py::arg("graph"), py::arg("tolerance") = 1e-12);

  m.def(
      "precision_at_m",
      [](const SimilarityMatrix& s, PaperId query, const std::vector<PaperId>& reference,
         std::size_t count) { return precision_at_m(s, query, reference, count); },
      py::arg("matrix"), py::arg("query"), py::arg("reference"), py::arg("count"));

  m.def(
      "run_benchmark",
      [](const CitationGraph& g, const std::map<std::string, std::vector<PaperId>>& fields,
         const std::vector<std::string>& measures, const std::vector<std::size_t>& m_values,
         unsigned threads) {
        std::vector<MeasureConfig> cfgs;
        for (const auto& name : measures) {
          const auto mm = parse_measure(name);
          if (!mm) throw ConfigError("unknown measure '" + name + "'");
          cfgs.push_back(MeasureConfig::defaults_for(*mm));
        }
        const auto corpus = corpus_from(fields);
        const auto t = run_benchmark(g, corpus, cfgs, m_values, options(threads));
        std::vector<std::tuple<std::string, std::size_t, double>> rows;
        for (const auto& r : t.rows) rows.emplace_back(r.measure, r.m, r.precision);
        return rows;
      },
      py::arg("graph"), py::arg("fields"), py::arg("measures"),
      py::arg("m_values") = std::vector<std::size_t>{10, 20, 30, 40, 50},
      py::arg("threads") = 1, "List of (measure, m, mean precision).");

  m.def(
      "histogram",
      [](const SimilarityMatrix& s) {
        const auto h = score_histogram(s);
        py::dict d;
        for (std::size_t i = 0; i < Histogram::kBuckets; ++i)
          d[py::str(Histogram::bucket_label(i))] = h.buckets[i];
        d["N/A"] = h.na;
        return d;
      },
      py::arg("matrix"));

  m.def(
      "convergence_trace",
      [](const CitationGraph& g, int iterations, const std::string& measure,
         std::optional<std::string> normalization, double decay, double lambda, int k_max,
         double epsilon) {
        const auto cfg = make_config(measure, normalization, decay, lambda, k_max, epsilon);
        std::vector<std::pair<int, double>> out;
        for (const auto& t : convergence_trace(g, cfg, iterations))
          out.emplace_back(t.k, t.mean_top10);
        return out;
      },
      py::arg("graph"), py::arg("iterations"), py::arg("measure") = "crank",
      py::arg("normalization") = py::none(), py::arg("C") = 0.8, py::arg("lam") = 0.5,
      py::arg("k_max") = 10, py::arg("epsilon") = 1e-4);

  auto fx = m.def_submodule("fixtures", "Deterministic test graphs");
  fx.def("tg1", &fixtures::tg1);
  fx.def("tg2", &fixtures::tg2);
  fx.def("star", &fixtures::star, py::arg("referrers"));
  fx.def("random_graph", &fixtures::random_graph, py::arg("n"), py::arg("density"),
         py::arg("seed"));
  fx.def(
      "community_graph",
      [](std::size_t communities, std::size_t size, double p_in, double p_out,
         std::uint64_t seed) {
        auto f = fixtures::community_graph(communities, size, p_in, p_out, seed);
        std::map<std::string, std::vector<PaperId>> fields(f.corpus.fields.begin(),
                                                           f.corpus.fields.end());
        return py::make_tuple(std::move(f.graph), fields);
      },
      py::arg("communities"), py::arg("size"), py::arg("p_in"), py::arg("p_out"),
      py::arg("seed"), "Returns (graph, {field: [paper ids]}).");
}
