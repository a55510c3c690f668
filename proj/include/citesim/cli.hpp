#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "citesim/config.hpp"

namespace citesim::cli {

enum class Command { compute, topk, eval, histogram, trace, cases, validate };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  Command command = Command::validate;
  std::filesystem::path graph_path;
  std::optional<std::filesystem::path> meta_path;
  // Exactly one entry except for eval and cases, which accept a list.
  std::vector<MeasureConfig> configs;
  std::optional<std::filesystem::path> output_path;
  std::string query;
  std::size_t count = 10;
  std::vector<std::size_t> m_values{10, 20, 30, 40, 50};
  std::optional<std::filesystem::path> corpus_path;
  std::optional<std::filesystem::path> pairs_path;
  std::optional<std::filesystem::path> matrix_path;  // validate: verify an export
  unsigned threads = 1;
  double threshold = 0.0;
};

// `args` excludes the program name. Throws UsageError naming the offending
// flag.
RunSpec parse_args(std::span<const std::string> args);

// Executes a parsed spec. Returns kExitOk, kExitUsage or kExitData; messages
// go to `err`, the validate summary goes to `out` when no --out is given.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

// parse_args + run with the exit-status contract; used by the executable.
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace citesim::cli
