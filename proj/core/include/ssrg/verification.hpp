#pragma once

// Seeded invariant sweep across every library module.  The heavyweight
// frozen-oracle suites live in the test tree; this registry drives the same
// properties through the public API at small instance counts so an
// interactive run finishes in seconds.  Checks a configuration cannot
// support are reported as skipped with a reason, never dropped silently.

#include <cstdint>
#include <string>
#include <vector>

#include "ssrg/pipeline.hpp"

namespace ssrg {

struct CheckResult {
  std::string module;    // library module the property belongs to
  std::string property;  // short functional name
  bool pass = false;
  bool skipped = false;
  std::string detail;  // measured margin, or the reason when skipped
};

// Runs the full registry.  Model-dependent checks use `model`; seeded checks
// derive their generators from `seed` and the property name, so adding a
// check never shifts another's draws.
std::vector<CheckResult> run_verification(const ModelConfig& model, std::uint64_t seed);

// True when every check passed or was skipped (skips carry their reason).
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ssrg
