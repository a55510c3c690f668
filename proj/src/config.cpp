#include "citesim/config.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "citesim/error.hpp"

namespace citesim {

namespace {

constexpr std::array<std::pair<Measure, std::string_view>, 7> kMeasureNames{{
    {Measure::cocitation, "cocitation"},
    {Measure::coupling, "coupling"},
    {Measure::amsler, "amsler"},
    {Measure::simrank, "simrank"},
    {Measure::rvs_simrank, "rvs_simrank"},
    {Measure::prank, "prank"},
    {Measure::crank, "crank"},
}};

constexpr std::array<std::pair<Normalization, std::string_view>, 3> kNormNames{{
    {Normalization::raw_count, "raw_count"},
    {Normalization::jaccard, "jaccard"},
    {Normalization::pairwise, "pairwise"},
}};

}  // namespace

MeasureConfig MeasureConfig::defaults_for(Measure m) {
  MeasureConfig cfg;
  cfg.measure = m;
  switch (m) {
    case Measure::simrank:
    case Measure::rvs_simrank:
    case Measure::prank:
      cfg.normalization = Normalization::pairwise;
      break;
    default:
      cfg.normalization = Normalization::jaccard;
      break;
  }
  return cfg;
}

std::string_view to_string(Measure m) {
  for (const auto& [k, v] : kMeasureNames)
    if (k == m) return v;
  return "?";
}

std::string_view to_string(Normalization n) {
  for (const auto& [k, v] : kNormNames)
    if (k == n) return v;
  return "?";
}

std::optional<Measure> parse_measure(std::string_view s) {
  for (const auto& [k, v] : kMeasureNames)
    if (v == s) return k;
  return std::nullopt;
}

std::optional<Normalization> parse_normalization(std::string_view s) {
  for (const auto& [k, v] : kNormNames)
    if (v == s) return k;
  return std::nullopt;
}

bool is_iterative(Measure m) {
  return m == Measure::simrank || m == Measure::rvs_simrank || m == Measure::prank ||
         m == Measure::crank;
}

bool permits(Measure m, Normalization n) {
  switch (m) {
    case Measure::cocitation:
    case Measure::coupling:
    case Measure::amsler:
      return n == Normalization::raw_count || n == Normalization::jaccard;
    case Measure::simrank:
    case Measure::rvs_simrank:
    case Measure::prank:
      return n == Normalization::pairwise;
    case Measure::crank:
      return n == Normalization::jaccard || n == Normalization::pairwise;
  }
  return false;
}

bool uses_lambda(Measure m) { return m == Measure::amsler || m == Measure::prank; }

void validate(const MeasureConfig& cfg) {
  if (!(cfg.decay >= 0.0 && cfg.decay <= 1.0)) throw ConfigError("C must be in [0,1]");
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    throw ConfigError("lambda must be in [0,1]");
  }
  if (cfg.k_max < 1) throw ConfigError("kmax must be >= 1");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ConfigError("epsilon must be > 0");
  }
  if (!permits(cfg.measure, cfg.normalization)) {
    throw ConfigError("normalization " + std::string(to_string(cfg.normalization)) +
                      " is not available for " + std::string(to_string(cfg.measure)));
  }
}

std::string label(const MeasureConfig& cfg) {
  std::ostringstream os;
  os << to_string(cfg.measure);
  if (cfg.normalization != MeasureConfig::defaults_for(cfg.measure).normalization) {
    os << '-' << to_string(cfg.normalization);
  }
  if (uses_lambda(cfg.measure) && cfg.lambda != 0.5) os << "(l=" << cfg.lambda << ')';
  return os.str();
}

}  // namespace citesim
