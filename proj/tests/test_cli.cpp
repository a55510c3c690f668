#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "citesim/cli.hpp"
#include "citesim/engine.hpp"
#include "citesim/fixtures.hpp"
#include "citesim/io.hpp"

using namespace citesim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("citesim-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTg1 = "i\te\ni\tf\ne\tb\nf\tb\nd\ta\ng\tc\nj\td\nj\tg\nh\ti\n";

struct Run {
  int status;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::main_entry(args, out, err);
  return {status, out.str(), err.str()};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("parse_args") {
  SUBCASE("defaults") {
    const std::vector<std::string> args{"compute", "--graph", "g.tsv", "--measure", "crank",
                                        "--out", "o.csv"};
    const auto spec = cli::parse_args(args);
    CHECK(spec.command == cli::Command::compute);
    REQUIRE(spec.configs.size() == 1);
    CHECK(spec.configs[0].normalization == Normalization::jaccard);
    CHECK(spec.configs[0].decay == 0.8);
    CHECK(spec.configs[0].k_max == 10);
    CHECK(spec.configs[0].epsilon == 1e-4);
    CHECK(spec.threads == 1);
    CHECK(spec.m_values == std::vector<std::size_t>{10, 20, 30, 40, 50});
  }

  SUBCASE("eval defaults to every measure") {
    const std::vector<std::string> args{"eval", "--graph", "g", "--corpus", "c", "--out", "o",
                                        "--m", "5,15"};
    const auto spec = cli::parse_args(args);
    CHECK(spec.configs.size() == std::size(kAllMeasures));
    CHECK(spec.m_values == std::vector<std::size_t>{5, 15});
  }

  SUBCASE("overrides") {
    const std::vector<std::string> args{"compute", "--graph", "g", "--measure", "prank",
                                        "--C", "0.6", "--lambda", "0.25", "--kmax", "3",
                                        "--epsilon", "1e-6", "--out", "o", "--threads", "0"};
    const auto spec = cli::parse_args(args);
    CHECK(spec.configs[0].decay == 0.6);
    CHECK(spec.configs[0].lambda == 0.25);
    CHECK(spec.configs[0].k_max == 3);
    CHECK(spec.configs[0].epsilon == 1e-6);
    CHECK(spec.threads == 0);
  }

  SUBCASE("usage errors") {
    using Args = std::vector<std::string>;
    const std::vector<Args> bad{
        {},
        {"frobnicate", "--graph", "g", "--out", "o"},
        {"compute", "--measure", "crank", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank"},
        {"compute", "--graph", "g", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank,simrank", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "pagerank", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank", "--C", "1.5", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank", "--lambda", "-1", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank", "--kmax", "0", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank", "--epsilon", "0", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "simrank", "--normalization", "jaccard",
         "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank", "--bogus", "--out", "o"},
        {"compute", "--graph", "g", "--measure", "crank", "--C", "abc", "--out", "o"},
        {"topk", "--graph", "g", "--measure", "crank", "--out", "o"},
        {"topk", "--graph", "g", "--measure", "crank", "--query", "a", "--count", "0",
         "--out", "o"},
        {"eval", "--graph", "g", "--out", "o"},
        {"eval", "--graph", "g", "--corpus", "c", "--m", "0", "--out", "o"},
        {"cases", "--graph", "g", "--out", "o"},
        {"histogram", "--graph", "g", "--measure", "cocitation", "--normalization",
         "raw_count", "--out", "o"},
        {"trace", "--graph", "g", "--measure", "amsler", "--out", "o"},
    };
    for (const auto& args : bad) {
      CAPTURE(args.size() > 1 ? args[0] + " " + args.back() : std::string("-"));
      CHECK_THROWS_AS(cli::parse_args(args), cli::UsageError);
      CHECK(run_cli(args).status == cli::kExitUsage);
    }
  }

  SUBCASE("help") {
    const auto r = run_cli({"--help"});
    CHECK(r.status == cli::kExitOk);
    CHECK(r.out.find("compute") != std::string::npos);
  }
}

TEST_CASE("compute and verify round trip") {
  TempDir dir;
  const auto graph = dir.write("tg1.tsv", kTg1).string();
  for (const std::string measure :
       {"crank", "simrank", "rvs_simrank", "prank", "amsler", "cocitation", "coupling"}) {
    const auto out = (dir.path / (measure + ".csv")).string();
    CAPTURE(measure);
    auto r = run_cli({"compute", "--graph", graph, "--measure", measure, "--out", out});
    REQUIRE(r.status == cli::kExitOk);
    CHECK(fs::exists(out + ".summary.json"));
    r = run_cli({"validate", "--graph", graph, "--measure", measure, "--matrix", out});
    CHECK(r.status == cli::kExitOk);
    CHECK(r.out.find("\"matrix_mismatches\": 0") != std::string::npos);
  }

  SUBCASE("entries match the library bit for bit") {
    const auto out = (dir.path / "c.csv").string();
    REQUIRE(run_cli({"compute", "--graph", graph, "--measure", "crank", "--C", "0.7", "--kmax",
                     "7", "--out", out})
                .status == cli::kExitOk);
    const auto g = fixtures::tg1();
    auto cfg = MeasureConfig::defaults_for(Measure::crank);
    cfg.decay = 0.7;
    cfg.k_max = 7;
    const auto m = compute(g, cfg).matrix;
    std::ifstream in(out);
    // File ids follow first appearance in the edge list; map by name.
    std::istringstream tsv(kTg1);
    const auto file_graph = load_graph(read_edge_list(tsv)).graph;
    const auto rows = read_matrix_csv(in, file_graph);
    CHECK(rows.size() > 10);
    for (const auto& row : rows) {
      const auto p = *g.find(file_graph.meta(row.p).external_id);
      const auto q = *g.find(file_graph.meta(row.q).external_id);
      CHECK(row.score == m.value(p, q));
    }
    const auto iters = slurp(out + ".iterations.csv");
    CHECK(iters.rfind("iteration,max_delta\n", 0) == 0);
  }

  SUBCASE("tampered export fails verification") {
    const auto out = (dir.path / "t.csv").string();
    REQUIRE(run_cli({"compute", "--graph", graph, "--measure", "crank", "--out", out}).status ==
            cli::kExitOk);
    auto text = slurp(out);
    const auto pos = text.find("0.8");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 3, "0.7");
    std::ofstream(out) << text;
    const auto r = run_cli({"validate", "--graph", graph, "--measure", "crank", "--matrix", out});
    CHECK(r.status == cli::kExitData);
  }

  SUBCASE("threshold drops low scores") {
    const auto out = (dir.path / "th.csv").string();
    REQUIRE(run_cli({"compute", "--graph", graph, "--measure", "crank", "--threshold", "0.5",
                     "--out", out})
                .status == cli::kExitOk);
    std::ifstream in(out);
    std::istringstream tsv(kTg1);
    for (const auto& row : read_matrix_csv(in, load_graph(read_edge_list(tsv)).graph))
      CHECK(row.score > 0.5);
    CHECK(run_cli({"validate", "--graph", graph, "--measure", "crank", "--threshold", "0.5",
                   "--matrix", out})
              .status == cli::kExitOk);
  }
}

TEST_CASE("other commands") {
  TempDir dir;
  const auto graph = dir.write("tg1.tsv", kTg1).string();
  const auto out = (dir.path / "out.csv").string();

  SUBCASE("validate summary") {
    const auto r = run_cli({"validate", "--graph", graph});
    CHECK(r.status == cli::kExitOk);
    CHECK(r.out.find("\"edges\": 9") != std::string::npos);
  }

  SUBCASE("topk") {
    CHECK(run_cli({"topk", "--graph", graph, "--measure", "crank", "--query", "e", "--count",
                   "3", "--out", out})
              .status == cli::kExitOk);
    const auto text = slurp(out);
    CHECK(text.rfind("rank,paper,score,zero_fill,title\n1,f,", 0) == 0);
    CHECK(run_cli({"topk", "--graph", graph, "--measure", "crank", "--query", "nope", "--out",
                   out})
              .status == cli::kExitData);
  }

  SUBCASE("histogram and trace") {
    CHECK(run_cli({"histogram", "--graph", graph, "--measure", "crank", "--out", out}).status ==
          cli::kExitOk);
    CHECK(slurp(out).find("N/A,0") != std::string::npos);
    CHECK(run_cli({"trace", "--graph", graph, "--measure", "crank", "--kmax", "4", "--out", out})
              .status == cli::kExitOk);
    CHECK(slurp(out).rfind("k,mean_top10\n1,", 0) == 0);
  }

  SUBCASE("eval") {
    const auto corpus = dir.write("c.txt", "[f]\ne\nf\nb\n[g]\nd\ng\n").string();
    CHECK(run_cli({"eval", "--graph", graph, "--corpus", corpus, "--m", "1,2", "--out", out})
              .status == cli::kExitOk);
    const auto text = slurp(out);
    CHECK(text.rfind("measure,m,precision\n", 0) == 0);
    CHECK(text.find("crank,1,") != std::string::npos);

    const auto none = dir.write("n.txt", "[f]\nx\ny\n").string();
    CHECK(run_cli({"eval", "--graph", graph, "--corpus", none, "--out", out}).status ==
          cli::kExitData);
  }

  SUBCASE("cases") {
    const auto pairs = dir.write("p.csv", "p,q,case\ne,f,P1\na,c,P2\n").string();
    CHECK(run_cli({"cases", "--graph", graph, "--pairs", pairs, "--out", out}).status ==
          cli::kExitOk);
    CHECK(slurp(out).find("N/A") != std::string::npos);
    const auto bad = dir.write("b.csv", "p,q,case\ne,zz,P1\n").string();
    CHECK(run_cli({"cases", "--graph", graph, "--pairs", bad, "--out", out}).status ==
          cli::kExitData);
  }

  SUBCASE("data errors") {
    CHECK(run_cli({"validate", "--graph", (dir.path / "missing.tsv").string()}).status ==
          cli::kExitData);
    const auto broken = dir.write("broken.tsv", "a\tb\nc d\n").string();
    const auto r = run_cli({"validate", "--graph", broken});
    CHECK(r.status == cli::kExitData);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
}

TEST_SUITE_END();
