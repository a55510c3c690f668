#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace citesim {

enum class Measure { cocitation, coupling, amsler, simrank, rvs_simrank, prank, crank };

enum class Normalization { raw_count, jaccard, pairwise };

inline constexpr Measure kAllMeasures[] = {
    Measure::cocitation, Measure::coupling,    Measure::amsler, Measure::simrank,
    Measure::rvs_simrank, Measure::prank, Measure::crank};

struct MeasureConfig {
  Measure measure = Measure::crank;
  Normalization normalization = Normalization::jaccard;
  double decay = 0.8;   // C
  double lambda = 0.5;  // in-link weight for amsler / prank
  int k_max = 10;
  double epsilon = 1e-4;

  // Config for `m` with the normalization it uses when none is requested.
  static MeasureConfig defaults_for(Measure m);
};

std::string_view to_string(Measure m);
std::string_view to_string(Normalization n);
std::optional<Measure> parse_measure(std::string_view s);
std::optional<Normalization> parse_normalization(std::string_view s);

bool is_iterative(Measure m);
bool permits(Measure m, Normalization n);
bool uses_lambda(Measure m);

// Throws ConfigError with a message naming the offending field.
void validate(const MeasureConfig& cfg);

// Short display name, e.g. "crank", "crank-pairwise", "prank(l=0.3)".
// Default normalizations are omitted; lambda shown only where it matters.
std::string label(const MeasureConfig& cfg);

}  // namespace citesim
