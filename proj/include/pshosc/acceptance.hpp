#pragma once
// The acceptance criteria as runnable checks, shared by `verify-all` and the
// acceptance test binary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pshosc/report.hpp"

namespace pshosc {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  Json details;
  double seconds = 0.0;
  std::optional<double> runtime_limit;
};

struct AcceptanceOptions {
  std::uint64_t seed = kDefaultSeed;
  /// Path of the CLI binary. When set, criterion 13 runs `verify-all` twice
  /// through it; otherwise it re-runs criteria 3, 4, 8 and 12 in process with
  /// one and two workers and compares the serialized results.
  std::string cli_path;
};

inline constexpr int kCriterionCount = 13;

std::string criterion_title(int id);

/// Throws std::invalid_argument for ids outside 1..13.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);

/// JSON of one result; seconds are included only when `timing` is set.
Json to_json(const CriterionResult& r, bool timing);

/// Parses "1,3,5-7" style selections.
std::vector<int> parse_criterion_list(const std::string& s);

}  // namespace pshosc
