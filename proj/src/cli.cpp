#include "citesim/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "citesim/engine.hpp"
#include "citesim/error.hpp"
#include "citesim/eval.hpp"
#include "citesim/graph.hpp"
#include "citesim/io.hpp"
#include "csv.hpp"

namespace citesim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::compute, "compute"}, {Command::topk, "topk"},
    {Command::eval, "eval"},       {Command::histogram, "histogram"},
    {Command::trace, "trace"},     {Command::cases, "cases"},
    {Command::validate, "validate"},
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = detail::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

bool multi_measure(Command c) { return c == Command::eval || c == Command::cases; }

}  // namespace

std::string usage() {
  return "usage: citesim <compute|topk|eval|histogram|trace|cases|validate> --graph FILE "
         "[--meta FILE] [--measure NAME[,NAME...]] [--normalization raw_count|jaccard|"
         "pairwise] [--C X] [--lambda X] [--kmax N] [--epsilon X] [--query ID] "
         "[--count N] [--m LIST] [--corpus FILE] [--pairs FILE] [--matrix FILE] "
         "[--threshold X] [--threads N] --out FILE\n";
}

RunSpec parse_args(std::span<const std::string> args) {
  CLI::App app{"citation-graph similarity engine", "citesim"};
  app.set_help_flag();

  std::string command, graph, meta, measure, normalization, query, m_list, corpus, pairs,
      out, matrix;
  std::optional<double> decay, lambda, epsilon, threshold;
  std::optional<int> kmax;
  std::optional<long long> count, threads;

  app.add_option("command", command)->required();
  app.add_option("--graph", graph);
  app.add_option("--meta", meta);
  app.add_option("--measure", measure);
  app.add_option("--normalization", normalization);
  app.add_option("--C", decay);
  app.add_option("--lambda", lambda);
  app.add_option("--kmax", kmax);
  app.add_option("--epsilon", epsilon);
  app.add_option("--query", query);
  app.add_option("--count", count);
  app.add_option("--m", m_list);
  app.add_option("--corpus", corpus);
  app.add_option("--pairs", pairs);
  app.add_option("--out", out);
  app.add_option("--threads", threads);
  app.add_option("--threshold", threshold);
  app.add_option("--matrix", matrix);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunSpec spec;
  const auto cmd = std::find_if(std::begin(kCommands), std::end(kCommands),
                                [&](const auto& c) { return c.second == command; });
  if (cmd == std::end(kCommands)) throw UsageError("unknown command '" + command + "'");
  spec.command = cmd->first;

  if (graph.empty()) throw UsageError("--graph is required");
  spec.graph_path = graph;
  if (!meta.empty()) spec.meta_path = meta;
  if (!out.empty()) spec.output_path = out;
  if (!spec.output_path && spec.command != Command::validate) {
    throw UsageError("--out is required");
  }

  // Measure list.
  std::vector<std::string> names = split_list(measure);
  if (names.empty()) {
    if (multi_measure(spec.command)) {
      for (const auto m : kAllMeasures) names.emplace_back(to_string(m));
    } else if (spec.command != Command::validate || !matrix.empty()) {
      throw UsageError("--measure is required");
    }
  }
  if (names.size() > 1 && !multi_measure(spec.command)) {
    throw UsageError("--measure takes a single measure for this command");
  }
  std::optional<Normalization> norm;
  if (!normalization.empty()) {
    norm = parse_normalization(normalization);
    if (!norm) throw UsageError("--normalization: unknown value '" + normalization + "'");
  }
  for (const auto& name : names) {
    const auto m = parse_measure(name);
    if (!m) throw UsageError("--measure: unknown measure '" + name + "'");
    auto cfg = MeasureConfig::defaults_for(*m);
    if (norm) cfg.normalization = *norm;
    if (decay) cfg.decay = *decay;
    if (lambda) cfg.lambda = *lambda;
    if (kmax) cfg.k_max = *kmax;
    if (epsilon) cfg.epsilon = *epsilon;
    try {
      validate(cfg);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    spec.configs.push_back(cfg);
  }

  if (count) {
    if (*count < 1) throw UsageError("--count must be >= 1");
    spec.count = static_cast<std::size_t>(*count);
  }
  if (threads) {
    if (*threads < 0 || *threads > 1024) throw UsageError("--threads must be in [0,1024]");
    spec.threads = static_cast<unsigned>(*threads);
  }
  if (threshold) {
    if (!(*threshold >= 0.0)) throw UsageError("--threshold must be >= 0");
    spec.threshold = *threshold;
  }
  if (!m_list.empty()) {
    spec.m_values.clear();
    for (const auto& item : split_list(m_list)) {
      const auto v = detail::parse_number<long long>(item);
      if (!v || *v < 1) throw UsageError("--m: '" + item + "' is not a positive integer");
      spec.m_values.push_back(static_cast<std::size_t>(*v));
    }
  }
  spec.query = query;
  if (!corpus.empty()) spec.corpus_path = corpus;
  if (!pairs.empty()) spec.pairs_path = pairs;
  if (!matrix.empty()) spec.matrix_path = matrix;

  switch (spec.command) {
    case Command::topk:
      if (spec.query.empty()) throw UsageError("--query is required for topk");
      break;
    case Command::eval:
      if (!spec.corpus_path) throw UsageError("--corpus is required for eval");
      break;
    case Command::cases:
      if (!spec.pairs_path) throw UsageError("--pairs is required for cases");
      break;
    case Command::histogram:
      if (spec.configs.front().normalization == Normalization::raw_count) {
        throw UsageError("--normalization raw_count has no histogram: scores are unbounded");
      }
      break;
    case Command::trace:
      if (!is_iterative(spec.configs.front().measure)) {
        throw UsageError("--measure: trace needs an iterative measure");
      }
      break;
    default:
      break;
  }
  return spec;
}

namespace {

json config_json(const MeasureConfig& cfg) {
  return {{"measure", std::string(to_string(cfg.measure))},
          {"normalization", std::string(to_string(cfg.normalization))},
          {"C", cfg.decay},
          {"lambda", cfg.lambda},
          {"kmax", cfg.k_max},
          {"epsilon", cfg.epsilon}};
}

json stats_json(const GraphStats& s) {
  return {{"n", s.n},
          {"edges", s.edge_count},
          {"mean_in_degree", s.mean_in_degree},
          {"mean_out_degree", s.mean_out_degree},
          {"sources", s.sources},
          {"sinks", s.sinks}};
}

json report_json(const IterationReport& r) {
  return {{"iterations_run", r.iterations_run},
          {"converged", r.converged},
          {"max_delta_per_iteration", r.max_delta_per_iteration},
          {"warnings", r.warnings}};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void finish(std::ofstream& f, const fs::path& path) {
  f.flush();
  if (!f) throw DataError("failed writing " + path.string());
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  auto f = open_out(path);
  writer(f);
  finish(f, path);
}

fs::path sibling(const fs::path& out, std::string_view suffix) {
  return fs::path(out.string() + std::string(suffix));
}

PaperId resolve_query(const CitationGraph& g, const std::string& id) {
  const auto p = g.find(id);
  if (!p) throw DataError("unknown query paper '" + id + "'");
  return *p;
}

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const auto loaded = load_graph_files(spec.graph_path, spec.meta_path);
  const auto& g = loaded.graph;
  const EngineOptions opts{spec.threads, EngineOptions{}.dense_limit};

  json summary;
  summary["command"] = std::string(kCommands[static_cast<int>(spec.command)].second);
  summary["graph_path"] = spec.graph_path.string();
  summary["graph"] = stats_json(stats(g));
  summary["load_report"] = {{"edges_read", loaded.report.edges_read},
                            {"duplicates_dropped", loaded.report.duplicates_dropped},
                            {"self_loops_dropped", loaded.report.self_loops_dropped},
                            {"meta_only_nodes", loaded.report.meta_only_nodes}};
  summary["configs"] = json::array();
  for (const auto& cfg : spec.configs) summary["configs"].push_back(config_json(cfg));

  auto single = [&] { return spec.configs.front(); };
  auto record_result = [&](const SimilarityResult& r, const MeasureConfig& cfg) {
    summary["k"] = r.matrix.iteration();
    summary["na_count"] = r.matrix.na_count();
    if (is_iterative(cfg.measure)) {
      summary["iterations"] = report_json(r.report);
      summary["converged"] = r.report.converged;
      for (const auto& w : r.report.warnings) err << "warning: " << w << '\n';
    }
  };

  int status = kExitOk;
  switch (spec.command) {
    case Command::compute: {
      const auto cfg = single();
      const auto r = compute(g, cfg, opts);
      record_result(r, cfg);
      summary["threshold"] = spec.threshold;
      write_file(*spec.output_path,
                 [&](std::ostream& f) { write_matrix_csv(f, g, r.matrix, spec.threshold); });
      if (is_iterative(cfg.measure)) {
        write_file(sibling(*spec.output_path, ".iterations.csv"),
                   [&](std::ostream& f) { write_iteration_csv(f, r.report); });
      }
      break;
    }
    case Command::topk: {
      const auto query = resolve_query(g, spec.query);
      const auto cfg = single();
      const auto r = compute(g, cfg, opts);
      record_result(r, cfg);
      const auto ranked = top_k(r.matrix, query, spec.count);
      summary["query"] = spec.query;
      write_file(*spec.output_path, [&](std::ostream& f) { write_topk_csv(f, g, ranked); });
      break;
    }
    case Command::eval: {
      std::ifstream in(*spec.corpus_path);
      if (!in) throw DataError("cannot open " + spec.corpus_path->string());
      RawCorpus raw;
      try {
        raw = read_corpus(in);
      } catch (const DataError& e) {
        throw DataError(spec.corpus_path->string() + ": " + e.what());
      }
      const auto res = resolve_corpus(raw, g, spec.corpus_path->filename().string());
      for (const auto& id : res.unresolved) err << "warning: corpus id '" << id << "' not in graph\n";
      const auto table = run_benchmark(g, res.corpus, spec.configs, spec.m_values, opts);
      summary["query_count"] = table.query_count;
      summary["unresolved"] = res.unresolved;
      summary["dropped_fields"] = res.dropped_fields;
      write_file(*spec.output_path,
                 [&](std::ostream& f) { write_precision_csv(f, table); });
      break;
    }
    case Command::histogram: {
      const auto cfg = single();
      const auto r = compute(g, cfg, opts);
      record_result(r, cfg);
      const auto h = score_histogram(r.matrix);
      summary["total_pairs"] = h.total_pairs;
      write_file(*spec.output_path, [&](std::ostream& f) { write_histogram_csv(f, h); });
      break;
    }
    case Command::trace: {
      const auto cfg = single();
      const auto trace = convergence_trace(g, cfg, cfg.k_max, opts);
      json deltas = json::array();
      for (const auto& t : trace) deltas.push_back(t.max_delta);
      summary["max_delta_per_iteration"] = deltas;
      write_file(*spec.output_path, [&](std::ostream& f) { write_trace_csv(f, trace); });
      break;
    }
    case Command::cases: {
      std::ifstream in(*spec.pairs_path);
      if (!in) throw DataError("cannot open " + spec.pairs_path->string());
      std::vector<CasePair> pairs;
      try {
        pairs = read_case_pairs(in, g);
      } catch (const DataError& e) {
        throw DataError(spec.pairs_path->string() + ": " + e.what());
      }
      const auto table = case_analysis(g, pairs, spec.configs, opts);
      write_file(*spec.output_path,
                 [&](std::ostream& f) { write_case_csv(f, g, table); });
      break;
    }
    case Command::validate: {
      if (spec.matrix_path) {
        std::ifstream in(*spec.matrix_path);
        if (!in) throw DataError("cannot open " + spec.matrix_path->string());
        std::vector<MatrixRow> rows;
        try {
          rows = read_matrix_csv(in, g);
        } catch (const DataError& e) {
          throw DataError(spec.matrix_path->string() + ": " + e.what());
        }
        const auto cfg = single();
        const auto r = compute(g, cfg, opts);
        record_result(r, cfg);
        const auto problems = verify_matrix(rows, g, r.matrix, spec.threshold);
        summary["matrix_rows"] = rows.size();
        summary["matrix_mismatches"] = problems.size();
        for (std::size_t i = 0; i < std::min<std::size_t>(problems.size(), 20); ++i) {
          err << "mismatch: " << problems[i] << '\n';
        }
        if (!problems.empty()) status = kExitData;
      }
      if (!spec.output_path) {
        out << summary.dump(2) << '\n';
        return status;
      }
      write_file(*spec.output_path, [&](std::ostream& f) { f << summary.dump(2) << '\n'; });
      return status;
    }
  }
  write_file(sibling(*spec.output_path, ".summary.json"),
             [&](std::ostream& f) { f << summary.dump(2) << '\n'; });
  return status;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    return execute(spec, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  if (std::find(args.begin(), args.end(), "--help") != args.end() ||
      std::find(args.begin(), args.end(), "-h") != args.end()) {
    out << usage();
    return kExitOk;
  }
  RunSpec spec;
  try {
    spec = parse_args(args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << usage();
    return kExitUsage;
  }
  return run(spec, out, err);
}

}  // namespace citesim::cli
